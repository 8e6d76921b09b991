"""Data/shaping phase assignment.

A shaping (non-data) phase takes the value of a map ``F(phase, prefix)`` of
the already-decided prefix. Classic frozen zeros, common-randomness bits,
CRC bits and genie values are all expressed this way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class FrozenMap:
    """Base class for shaping maps.

    ``uses_prefix`` tells decoders whether the decided prefix must be
    materialized before calling the map.
    """

    uses_prefix = False

    def __call__(self, phase: int, prefix, p_one: float, seed: int) -> int:
        raise NotImplementedError


class FrozenZeros(FrozenMap):
    def __call__(self, phase, prefix, p_one, seed):
        return 0


class CommonRandomBits(FrozenMap):
    """Uniform bits shared by encoder and decoder through a common seed."""

    def __call__(self, phase, prefix, p_one, seed):
        return int(np.random.default_rng([seed, phase]).integers(2))


class RandomizedRounding(FrozenMap):
    """Draw the bit from the conditional supplied by the caller.

    The draw ``r`` is common randomness; the result is ``1`` iff ``r < p_one``.
    Only meaningful where the caller's conditional is the encoder's
    a-priori one (encode mode with absent observations).
    """

    def __call__(self, phase, prefix, p_one, seed):
        r = np.random.default_rng([seed, phase, 1]).random()
        return int(r < p_one)


@dataclass(frozen=True)
class GenieBits(FrozenMap):
    """Forces every shaping phase to a known word (genie-aided decoding)."""

    word: tuple

    def __call__(self, phase, prefix, p_one, seed):
        return int(self.word[phase])


def crc_remainder(bits: Sequence[int], poly: int, width: int) -> list[int]:
    """MSB-first CRC of ``bits`` with generator ``poly`` (implicit leading one)."""
    reg = 0
    top = 1 << (width - 1)
    mask = (1 << width) - 1
    for b in bits:
        fb = ((reg & top) != 0) ^ int(b)
        reg = (reg << 1) & mask
        if fb:
            reg ^= poly
    return [(reg >> (width - 1 - k)) & 1 for k in range(width)]


@dataclass(frozen=True)
class CrcBits(FrozenMap):
    """Dynamically frozen CRC: bit ``k`` of the CRC over the preceding data bits."""

    data_phases: tuple
    crc_phases: tuple
    poly: int = 0x07
    width: int = 8
    uses_prefix = True

    def __call__(self, phase, prefix, p_one, seed):
        if phase not in self.crc_phases:
            return 0
        k = self.crc_phases.index(phase)
        data = [prefix[j] for j in self.data_phases if j < phase]
        return crc_remainder(data, self.poly, self.width)[k]

    def check(self, u) -> bool:
        data = [u[j] for j in self.data_phases]
        return crc_remainder(data, self.poly, self.width) == [int(u[j]) for j in self.crc_phases]


@dataclass(frozen=True)
class ShapingRule:
    """Per-phase role: data, or shaping through ``frozen``.

    Parameters
    ----------
    data_mask : tuple of bool
        ``data_mask[phi]`` is True for data phases.
    frozen : FrozenMap
        Map used for every non-data phase.
    """

    data_mask: tuple
    frozen: FrozenMap = field(default_factory=FrozenZeros)

    @classmethod
    def from_data_phases(cls, length: int, data_phases, frozen: FrozenMap | None = None):
        mask = [False] * length
        for phi in data_phases:
            if not 0 <= phi < length:
                raise ValueError(f"data phase {phi} outside [0, {length})")
            mask[phi] = True
        return cls(tuple(mask), frozen if frozen is not None else FrozenZeros())

    @property
    def length(self) -> int:
        return len(self.data_mask)

    @property
    def data_phases(self) -> list[int]:
        return [phi for phi, d in enumerate(self.data_mask) if d]

    def is_data(self, phase: int) -> bool:
        return self.data_mask[phase]

    def check_length(self, length: int):
        if self.length != length:
            raise ValueError(f"shaping covers {self.length} phases, transform has {length}")

    def encode(self, message, seed: int = 0) -> np.ndarray:
        """Build the transform output ``u`` directly from message bits.

        Only valid for maps that ignore the conditional (``p_one``).
        """
        message = list(message)
        if len(message) != sum(self.data_mask):
            raise ValueError(f"expected {sum(self.data_mask)} message bits, got {len(message)}")
        if isinstance(self.frozen, RandomizedRounding):
            raise ValueError("randomized rounding needs the SC encoder")
        u = []
        it = iter(message)
        for phi, is_data in enumerate(self.data_mask):
            u.append(int(next(it)) if is_data else self.frozen(phi, u, 0.5, seed))
        return np.array(u, dtype=np.uint8)


def with_crc(length: int, data_phases, crc_width: int = 8, poly: int = 0x07) -> ShapingRule:
    """Turn the last ``crc_width`` data phases into dynamically frozen CRC phases."""
    data_phases = sorted(data_phases)
    if len(data_phases) <= crc_width:
        raise ValueError("not enough data phases for the CRC")
    payload, crc = tuple(data_phases[:-crc_width]), tuple(data_phases[-crc_width:])
    return ShapingRule.from_data_phases(length, payload, CrcBits(payload, crc, poly, crc_width))


def read_data_phases(path) -> list[int]:
    text = Path(path).read_text().split()
    return sorted(int(tok) for tok in text)


def write_data_phases(path, phases) -> None:
    Path(path).write_text("".join(f"{p}\n" for p in sorted(phases)))
