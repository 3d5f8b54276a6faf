"""Pure numpy kernels; reference path and fallback when the compiled module is absent.

Every kernel takes a flat row-major amplitude array plus the subsystem
dimensions and returns a new array. Inputs are never modified.
"""

import numpy as np


def _split(dims, pos):
    outer = 1
    for d in dims[:pos]:
        outer *= d
    inner = 1
    for d in dims[pos + 1:]:
        inner *= d
    return outer, dims[pos], inner


def apply_matrix(amps, dims, pos, mat):
    outer, dim, inner = _split(dims, pos)
    psi = amps.reshape(outer, dim, inner)
    return np.einsum("ik,akn->ain", mat, psi).reshape(-1)


def apply_controlled(amps, dims, control, target, mats):
    """Apply ``mats[c]`` to the target axis on the slice where the control reads ``c``."""
    psi = amps.reshape(dims)
    out = np.empty_like(psi)
    index = [slice(None)] * len(dims)
    t_axis = target if target < control else target - 1
    for c in range(dims[control]):
        index[control] = c
        sub = psi[tuple(index)]
        moved = np.tensordot(mats[c], sub, axes=([1], [t_axis]))
        out[tuple(index)] = np.moveaxis(moved, 0, t_axis)
    return out.reshape(-1)


def marginal_probs(amps, dims, pos):
    outer, dim, inner = _split(dims, pos)
    weights = np.abs(amps.reshape(outer, dim, inner)) ** 2
    return weights.sum(axis=(0, 2))


def collapse(amps, dims, pos, outcome, scale):
    outer, dim, inner = _split(dims, pos)
    psi = amps.reshape(outer, dim, inner)
    out = np.zeros_like(psi)
    out[:, outcome, :] = psi[:, outcome, :] * scale
    return out.reshape(-1)
