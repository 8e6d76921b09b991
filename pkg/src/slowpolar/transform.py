"""Forward and inverse slow transform on bit vectors.

Both directions are GF(2)-linear. Each layer step is expressed as a gather
plan: output index ``i`` is ``src[i, 0] XOR src[i, 1]`` where a second source
of ``-1`` means "no second term". Plans are cached per geometry.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .geometry import PhaseClass, SlowParams, classify_phase, layer_sizes


def _medial_minus_child(params: SlowParams, layer: int, psi_prime: int) -> bool:
    return classify_phase(params, layer - 1, psi_prime) is PhaseClass.MEDIAL_MINUS


@lru_cache(maxsize=64)
def _forward_plans(params: SlowParams) -> tuple[np.ndarray, ...]:
    plans = []
    for lam in range(1, params.n + 1):
        span = params.branch_length(lam)
        half = span // 2
        src = np.full((params.length, 2), -1, dtype=np.int64)
        for beta in range(params.num_branches(lam)):
            a0 = 2 * beta * half          # flat offset of child branch 2*beta
            b0 = a0 + half                # child branch 2*beta + 1
            for phi in range(span):
                i = beta * span + phi
                cls = classify_phase(params, lam, phi)
                if cls.is_lateral:
                    src[i, 0] = (a0 if phi % 2 == 0 else b0) + phi // 2
                    continue
                pp = (phi - 1) // 2
                a, b = a0 + pp + 1, b0 + pp
                if cls is PhaseClass.MEDIAL_MINUS:
                    src[i] = (a, b)
                elif _medial_minus_child(params, lam, pp):
                    src[i, 0] = b
                else:
                    src[i, 0] = a
        plans.append(src)
    return tuple(plans)


@lru_cache(maxsize=64)
def _inverse_plans(params: SlowParams) -> tuple[np.ndarray, ...]:
    """Plans mapping layer ``lam`` back to layer ``lam - 1``, for lam = n..1."""
    plans = []
    for lam in range(params.n, 0, -1):
        span = params.branch_length(lam)
        half = span // 2
        src = np.full((params.length, 2), -1, dtype=np.int64)
        for beta in range(params.num_branches(lam)):
            a0 = 2 * beta * half
            b0 = a0 + half
            for phi in range(span):
                i = beta * span + phi
                cls = classify_phase(params, lam, phi)
                if cls.is_lateral:
                    src[(a0 if phi % 2 == 0 else b0) + phi // 2, 0] = i
                    continue
                if cls is PhaseClass.MEDIAL_MINUS:
                    continue
                # plus phase resolves the (minus, plus) pair jointly
                pp = (phi - 1) // 2
                a, b = a0 + pp + 1, b0 + pp
                if _medial_minus_child(params, lam, pp):
                    src[b, 0] = i
                    src[a] = (i, i - 1)
                else:
                    src[a, 0] = i
                    src[b] = (i, i - 1)
        plans.append(src)
    return tuple(plans)


def _apply(plan: np.ndarray, bits: np.ndarray) -> np.ndarray:
    first = bits[..., plan[:, 0]]
    second_idx = plan[:, 1]
    has_second = second_idx >= 0
    if not has_second.any():
        return first
    second = bits[..., np.where(has_second, second_idx, 0)] * has_second
    return first ^ second


def _as_bits(params: SlowParams, x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.uint8)
    if arr.shape[-1:] != (params.length,):
        raise ValueError(f"expected {params.length} bits, got shape {arr.shape}")
    if np.any(arr > 1):
        raise ValueError("bit vectors may only contain 0 and 1")
    return arr


def forward(params: SlowParams, x) -> np.ndarray:
    """Map the transform input ``x`` (layer 0) to its output ``u`` (layer n).

    Accepts a single vector or a batch with bits along the last axis.
    """
    u = _as_bits(params, x)
    for plan in _forward_plans(params):
        u = _apply(plan, u)
    return u.copy() if params.n == 0 else u


def inverse(params: SlowParams, u) -> np.ndarray:
    x = _as_bits(params, u)
    for plan in _inverse_plans(params):
        x = _apply(plan, x)
    return x.copy() if params.n == 0 else x


def layers(params: SlowParams, x) -> list[np.ndarray]:
    """All intermediate vectors ``u^(0) .. u^(n)`` of the forward transform."""
    out = [_as_bits(params, x).copy()]
    for plan in _forward_plans(params):
        out.append(_apply(plan, out[-1]))
    return out


def generator_matrix(params: SlowParams) -> np.ndarray:
    """Binary matrix ``G`` with ``forward(x) == x @ G mod 2``."""
    return forward(params, np.eye(params.length, dtype=np.uint8))
