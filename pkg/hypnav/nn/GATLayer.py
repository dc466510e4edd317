"""
Graph attention layer over a batch of equally sized crowd graphs
"""
import numpy as np

from hypnav.autodiff.Tensor import (Parameter, as_tensor, leaky_relu,
                                    softmax_rows, block_aggregate)
from hypnav.errors import AutodiffError
from hypnav.nn.MLP import xavier_uniform
from hypnav.nn.Module import Module

NEGATIVE_SLOPE = 0.2


class GATLayer(Module):
    """
    Single-head graph attention

    e_ij = LeakyReLU(a_src . W h_i + a_dst . W h_j), alpha_i = softmax over
    the neighbours of i, h'_i = sum_j alpha_ij W h_j.
    """

    def __init__(self, n_in, n_out, rng):
        self.weight = Parameter(xavier_uniform(rng, n_in, n_out))
        self.attn_src = Parameter(xavier_uniform(rng, n_out, 1))
        self.attn_dst = Parameter(xavier_uniform(rng, n_out, 1))

    def forward(self, nodes, n_nodes, adjacency=None):
        """
        :param nodes: Tensor of shape (B*n, d_in), graph b in rows b*n..b*n+n-1
        :param n_nodes: nodes per graph
        :param adjacency: optional boolean (n, n) mask, fully connected if None
        :return: (Tensor of shape (B*n, d_out), attention array (B*n, n))
        """
        nodes = as_tensor(nodes)
        if n_nodes <= 0 or nodes.shape[0] % n_nodes:
            raise AutodiffError("Cannot split {0} rows into graphs of {1} "
                                "nodes".format(nodes.shape[0], n_nodes))
        batch = nodes.shape[0] // n_nodes
        wh = nodes @ self.weight
        src = wh @ self.attn_src
        dst = (wh @ self.attn_dst).reshape(batch, n_nodes)
        # row (b, i) needs dst of graph b broadcast over its n columns
        dst_rows = dst.take_rows(np.repeat(np.arange(batch), n_nodes))
        scores = leaky_relu(src + dst_rows, NEGATIVE_SLOPE)
        mask = None
        if adjacency is not None:
            mask = np.tile(np.asarray(adjacency, dtype=bool), (batch, 1))
        alpha = softmax_rows(scores, mask=mask)
        return block_aggregate(alpha, wh, n_nodes), alpha.data


def gat_forward(layer, node_features, adjacency=None):
    """
    Run one GAT layer on a single graph
    :return: (Tensor of shape (N, d_out), attention array (N, N))
    """
    node_features = as_tensor(node_features)
    if node_features.shape[0] == 0:
        raise AutodiffError("Graph attention needs at least one node")
    return layer(node_features, node_features.shape[0], adjacency)
