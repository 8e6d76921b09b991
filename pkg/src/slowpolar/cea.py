"""Cyclic exponential array.

A container of ``2**lam`` objects whose writes advance cyclically: after a
write at ``i`` the next write is at ``i`` (overwrite) or ``i + 1 mod 2**lam``
(advance). Values are spread over tiers ``current[tau]`` of ``2**tau`` slots
plus a ``previous`` array of ``2**lam`` slots such that every advancing write
replaces exactly one of these arrays.

Arrays are never mutated in place; an advancing write builds a fresh list for
its target array. Cloning therefore only copies the list of array handles,
and a write through one clone can never be seen through another.
"""

from __future__ import annotations


class CeaError(RuntimeError):
    """Illegal write index or read of a never-written position."""


PREVIOUS = "previous"


def changed_array(before_last: int, write_index: int):
    """Array replaced by an advancing write from ``before_last`` to ``write_index``.

    Returns ``"previous"`` for the wrap to index 0, else the tier number
    ``tau``: the highest bit set in ``write_index`` and clear in ``before_last``.
    """
    if write_index == 0:
        return PREVIOUS
    return (write_index & ~before_last).bit_length() - 1


class Cea:
    """Cyclic exponential array of ``2**size_log`` opaque objects."""

    __slots__ = ("size_log", "size", "last", "last_value", "tiers", "previous",
                 "wrapped", "versions", "copies")

    def __init__(self, size_log: int):
        if size_log < 0:
            raise ValueError("size_log must be nonnegative")
        self.size_log = size_log
        self.size = 1 << size_log
        self.last: int | None = None
        self.last_value = None
        self.tiers: list = [None] * size_log
        self.previous = None
        self.wrapped = False
        # instrumentation: one counter per internal array, tiers first
        self.versions = [0] * (size_log + 1)
        self.copies = 0

    def clone(self) -> "Cea":
        other = object.__new__(Cea)
        other.size_log = self.size_log
        other.size = self.size
        other.last = self.last
        other.last_value = self.last_value
        other.tiers = list(self.tiers)
        other.previous = self.previous
        other.wrapped = self.wrapped
        other.versions = list(self.versions)
        other.copies = self.copies
        return other

    def readable(self, j: int) -> bool:
        if self.last is None or not 0 <= j < self.size:
            return False
        return j <= self.last or self.wrapped

    def read(self, j: int):
        last = self.last
        if last is None or not 0 <= j < self.size:
            raise CeaError(f"read({j}) on an array with last write {last}")
        if j == last:
            return self.last_value
        if j > last:
            if not self.wrapped:
                raise CeaError(f"position {j} was never written")
            return self.previous[j]
        tau = (last & ~j).bit_length() - 1
        return self.tiers[tau][j & ((1 << tau) - 1)]

    def write(self, i: int, obj) -> None:
        last = self.last
        if last is None:
            if i != 0:
                raise CeaError(f"first write must be at index 0, got {i}")
            self.last, self.last_value = 0, obj
        elif i == last:
            self.last_value = obj
        elif i == (last + 1) % self.size:
            self._relocate(i)
            self.last, self.last_value = i, obj
        else:
            raise CeaError(f"write({i}) after write({last}); legal: {last}, {(last + 1) % self.size}")

    def advance(self, obj) -> None:
        """Advancing write to ``last + 1 mod size``, even when ``size == 1``."""
        if self.last is None:
            self.write(0, obj)
            return
        i = (self.last + 1) % self.size
        self._relocate(i)
        self.last, self.last_value = i, obj

    def _relocate(self, i: int) -> None:
        if i == 0:
            self.previous = [self.read(j) for j in range(self.size)]
            self.wrapped = True
            self.versions[-1] += 1
            self.copies += self.size
            return
        tau = (i & -i).bit_length() - 1
        base = i - (1 << tau)
        self.tiers[tau] = [self.read(base + k) for k in range(1 << tau)]
        self.versions[tau] += 1
        self.copies += 1 << tau

    def arrays(self):
        """Internal arrays currently held: tiers then previous (for audits)."""
        return [*self.tiers, self.previous]


def copies_per_cycle(size_log: int) -> int:
    """Object copies made by one full cycle of ``2**size_log`` advancing writes."""
    return size_log * (1 << size_log) // 2 + (1 << size_log)
