"""Shared helpers for the test suite."""

import numpy as np

from slowpolar.hmm import sample
from slowpolar.oracle import exact_block_datum


def random_instance(params, process, rng):
    x, y, _ = sample(process, params.length, rng)
    return x, y


def rel_err(got, exact):
    scale = np.max(np.abs(exact))
    return float(np.max(np.abs(got - exact)) / scale) if scale > 0 else float(np.max(np.abs(got)))


def datum_value(d):
    return d.table * np.exp(d.log_scale)


def helper_errors(params, process, y, decoder):
    """Relative error of every logged datum against the enumeration oracle."""
    errs = []
    for lam, phi, beta, d in decoder.datum_log:
        span = params.n0 << lam
        prefix = decoder.B[lam][beta * span:beta * span + phi].astype(np.uint8)
        exact = exact_block_datum(params, process, y, lam, beta, prefix, phi)
        errs.append(((lam, phi, beta), rel_err(datum_value(d), exact)))
    return errs
