"""
Versioned parameter container

An .npz archive mapping parameter path to a row-major float64 array, plus a
'__header__' entry holding a JSON header with the format version, the
embedding dimension and the layer sizes of every stored network.
"""
import json
import logging
import os

import numpy as np

from hypnav.errors import CheckpointError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
HEADER_KEY = '__header__'


def save_checkpoint(path, modules, embed_dim, layer_sizes):
    """
    :param path: destination file, '.npz' is appended by numpy if missing
    :param modules: dict of prefix -> Module, e.g. {'planner': p, 'curiosity': c}
    :param embed_dim: hyperbolic embedding dimension
    :param layer_sizes: JSON-serialisable description of network widths
    """
    arrays = {}
    for prefix, module in modules.items():
        for name, value in module.state_dict().items():
            arrays["{0}/{1}".format(prefix, name)] = np.ascontiguousarray(
                value, dtype=np.float64)
    header = {'format_version': FORMAT_VERSION,
              'embed_dim': int(embed_dim),
              'layer_sizes': layer_sizes,
              'modules': sorted(modules)}
    arrays[HEADER_KEY] = np.array(json.dumps(header, sort_keys=True))
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'wb') as handle:
        np.savez(handle, **arrays)
    logger.info("Wrote checkpoint %s (%d arrays)", path, len(arrays) - 1)


def read_checkpoint(path):
    """
    :return: (header dict, dict of prefix -> {parameter path: array})
    """
    if not os.path.exists(path):
        raise CheckpointError("Checkpoint {0} does not exist".format(path))
    try:
        with np.load(path, allow_pickle=False) as archive:
            if HEADER_KEY not in archive.files:
                raise CheckpointError("{0} has no header".format(path))
            header = json.loads(str(archive[HEADER_KEY]))
            arrays = {key: archive[key] for key in archive.files if key != HEADER_KEY}
    except (OSError, ValueError) as error:
        raise CheckpointError("Cannot read checkpoint {0}: {1}".format(path, error))
    if header.get('format_version') != FORMAT_VERSION:
        raise CheckpointError("Unsupported checkpoint version {0} in {1}".format(
            header.get('format_version'), path))
    states = {}
    for key, value in arrays.items():
        prefix, _, name = key.partition('/')
        states.setdefault(prefix, {})[name] = value
    return header, states


def load_checkpoint(path, modules, embed_dim):
    """
    Load parameters into existing modules after checking the embedding dim
    """
    header, states = read_checkpoint(path)
    if header['embed_dim'] != embed_dim:
        raise CheckpointError("Checkpoint embedding dim {0} does not match "
                              "configured dim {1}".format(header['embed_dim'], embed_dim))
    for prefix, module in modules.items():
        if prefix not in states:
            raise CheckpointError("Checkpoint {0} has no '{1}' parameters".format(
                path, prefix))
        module.load_state_dict(states[prefix])
    return header
