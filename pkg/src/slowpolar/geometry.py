"""Index arithmetic for the slow polar transform.

A transform of depth ``n`` has layers ``0..n``. Layer ``lam`` is split into
``2**(n - lam)`` branches of ``2**lam * N0`` phases each, and each phase is
lateral (pass-through) or medial (minus/plus combined).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple


class PhaseClass(enum.Enum):
    LATERAL_TOP = "lateral_top"
    MEDIAL_MINUS = "medial_minus"
    MEDIAL_PLUS = "medial_plus"
    LATERAL_BOTTOM = "lateral_bottom"

    @property
    def is_lateral(self) -> bool:
        return self in (PhaseClass.LATERAL_TOP, PhaseClass.LATERAL_BOTTOM)


@dataclass(frozen=True)
class SlowParams:
    """Geometry of a slow transform.

    Parameters
    ----------
    l0 : int
        Lateral half-width at layer 0.
    m0 : int
        Medial width at layer 0; must be even and at least 2.
    n : int
        Recursion depth.
    """

    l0: int
    m0: int
    n: int

    def __post_init__(self):
        if self.l0 < 0:
            raise ValueError(f"l0 must be nonnegative, got {self.l0}")
        if self.m0 < 2 or self.m0 % 2:
            raise ValueError(f"m0 must be even and >= 2, got {self.m0}")
        if self.n < 0:
            raise ValueError(f"n must be nonnegative, got {self.n}")

    @property
    def n0(self) -> int:
        return 2 * self.l0 + self.m0

    @property
    def length(self) -> int:
        return self.n0 << self.n

    def num_branches(self, layer: int) -> int:
        self._check_layer(layer)
        return 1 << (self.n - layer)

    def branch_length(self, layer: int) -> int:
        self._check_layer(layer)
        return self.n0 << layer

    def _check_layer(self, layer: int):
        if not 0 <= layer <= self.n:
            raise ValueError(f"layer {layer} outside [0, {self.n}]")


class LayerSizes(NamedTuple):
    big_l: int
    big_m: int
    big_n: int


class PhaseBranch(NamedTuple):
    layer: int
    phase: int
    branch: int


def layer_sizes(params: SlowParams, layer: int) -> LayerSizes:
    params._check_layer(layer)
    big_l = ((params.l0 + 1) << layer) - 1
    big_m = ((params.m0 - 2) << layer) + 2
    return LayerSizes(big_l, big_m, 2 * big_l + big_m)


def classify_phase(params: SlowParams, layer: int, phase: int) -> PhaseClass:
    big_l, big_m, big_n = layer_sizes(params, layer)
    if not 0 <= phase < big_n:
        raise ValueError(f"phase {phase} outside [0, {big_n}) at layer {layer}")
    if phase < big_l:
        return PhaseClass.LATERAL_TOP
    if phase >= big_l + big_m:
        return PhaseClass.LATERAL_BOTTOM
    if (phase - big_l) % 2 == 0:
        return PhaseClass.MEDIAL_MINUS
    return PhaseClass.MEDIAL_PLUS


def phase_classes(params: SlowParams, layer: int) -> list[PhaseClass]:
    """Classes of every phase of a layer-``layer`` branch, in phase order."""
    return [classify_phase(params, layer, phi)
            for phi in range(params.branch_length(layer))]


def pb_to_index(params: SlowParams, pb: PhaseBranch) -> int:
    layer, phase, branch = pb
    span = params.branch_length(layer)
    if not 0 <= phase < span:
        raise ValueError(f"phase {phase} outside [0, {span})")
    if not 0 <= branch < params.num_branches(layer):
        raise ValueError(f"branch {branch} outside [0, {params.num_branches(layer)})")
    return phase + branch * span


def index_to_pb(params: SlowParams, layer: int, i: int) -> PhaseBranch:
    if not 0 <= i < params.length:
        raise ValueError(f"index {i} outside [0, {params.length})")
    branch, phase = divmod(i, params.branch_length(layer))
    return PhaseBranch(layer, phase, branch)


def branc_of(branch: int) -> int:
    if branch < 0:
        raise ValueError("branch must be nonnegative")
    return branch >> 1


def bit_reverse(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def bit_reversed_cyclic_order(num_brancs: int) -> list[int]:
    """Brancs listed in the cyclic order in which decoders visit them.

    >>> bit_reversed_cyclic_order(8)
    [0, 4, 2, 6, 1, 5, 3, 7]
    """
    if num_brancs < 1 or num_brancs & (num_brancs - 1):
        raise ValueError(f"num_brancs must be a power of two, got {num_brancs}")
    width = num_brancs.bit_length() - 1
    return [bit_reverse(pos, width) for pos in range(num_brancs)]
