import numpy as np

from hypnav.autodiff.Tensor import no_grad

# below this magnitude the check is on absolute error, |a - n| <= floor * tol
RELATIVE_FLOOR = 1e-4
# parameters this small are checked on every entry
FULL_CHECK_SIZE = 16


def check_gradients(loss_fn, parameters, rng, h=1e-6, samples=4, floor=RELATIVE_FLOOR):
    """
    Compare backward() with central differences

    Parameters of at most FULL_CHECK_SIZE entries are checked on every entry,
    larger ones on samples random entries.

    :param loss_fn: callable building a scalar Tensor from the parameters
    :param parameters: Parameters to check
    :param samples: entries checked per large parameter
    :return: worst |analytic - numeric| / max(|analytic|, |numeric|, floor)
    """
    for param in parameters:
        param.zero_grad()
    loss_fn().backward()
    worst = 0.0
    for param in parameters:
        analytic = param.grad.copy()
        if param.data.size <= FULL_CHECK_SIZE:
            entries = np.arange(param.data.size)
        else:
            entries = rng.choice(param.data.size, size=samples, replace=False)
        for flat in entries:
            index = np.unravel_index(flat, param.data.shape)
            original = param.data[index]
            with no_grad():
                param.data[index] = original + h
                plus = loss_fn().item()
                param.data[index] = original - h
                minus = loss_fn().item()
            param.data[index] = original
            numeric = (plus - minus) / (2.0 * h)
            scale = max(abs(numeric), abs(analytic[index]), floor)
            worst = max(worst, abs(numeric - analytic[index]) / scale)
    return worst
