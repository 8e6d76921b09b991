"""Successive-cancellation list decoding with branch-indexed, shared storage.

Each path keeps, for every layer below the top, one bit store and one datum
store. A store holds only the latest ``(phase, value)`` per branch; entries of
the two branches of a branc share one cell of a :class:`~slowpolar.cea.Cea`,
at the bit-reversed position of the branc. Brancs are visited in that cyclic
order, so every write is a legal CEA write, and forking a path clones each
CEA by copying a handful of array handles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cea import Cea
from .geometry import SlowParams, bit_reverse, phase_classes
from .hmm import Datum, HmmProcess, advance_forward, backward_messages, base_datum
from .sc import (MM, ScDecoder, combine_lateral, combine_minus, combine_plus,
                 decision_weights, metric_increments, zero_other)
from .shaping import CrcBits, ShapingRule
from .transform import inverse


@dataclass(frozen=True)
class ListConfig:
    """List size and final selection rule.

    ``crc`` switches selection to CRC-passing paths first.
    """

    list_size: int = 1
    crc: CrcBits | None = None

    def __post_init__(self):
        if self.list_size < 1:
            raise ValueError("list_size must be at least 1")


class ListEntry(NamedTuple):
    u_hat: np.ndarray
    x_hat: np.ndarray
    log_metric: float


class PathState:
    """One list hypothesis."""

    __slots__ = ("metric", "bits", "data", "top_bit", "top_datum", "tracker", "decisions")

    def clone(self) -> "PathState":
        other = PathState()
        other.metric = self.metric
        other.bits = [c.clone() for c in self.bits]
        other.data = [c.clone() for c in self.data]
        other.top_bit = self.top_bit
        other.top_datum = self.top_datum
        other.tracker = [list(slots) for slots in self.tracker]
        other.decisions = self.decisions
        return other

    def u_hat(self) -> list[int]:
        out = []
        node = self.decisions
        while node is not None:
            out.append(node[0])
            node = node[1]
        return out[::-1]


def clone_path(path: PathState) -> PathState:
    return path.clone()


def select_survivors(metrics: list[float], list_size: int) -> list[int]:
    """Indices of the ``list_size`` largest metrics (ties to smaller index), in index order."""
    order = sorted(range(len(metrics)), key=lambda k: (-metrics[k], k))
    return sorted(order[:list_size])


class SclDecoder:
    """List decoder over a hidden-Markov process.

    Parameters
    ----------
    params : SlowParams
    process : HmmProcess
    y : sequence of int or None
        Observations of length ``N`` (None means absent).
    """

    def __init__(self, params: SlowParams, process: HmmProcess, y=None):
        self.params = params
        self.process = process
        n, N, n0 = params.n, params.length, params.n0
        if y is not None:
            y = np.asarray(y, dtype=np.int64)
            if y.shape != (N,):
                raise ValueError(f"expected {N} observations, got {y.shape}")
        self.y = [None] * N if y is None else [int(v) for v in y]
        self.classes = [phase_classes(params, lam) for lam in range(n + 1)]
        self.lateral = [[c.is_lateral for c in row] for row in self.classes]
        self.positions = [[bit_reverse(b, n - lam - 1) for b in range(1 << (n - lam - 1))]
                          for lam in range(n)]
        self.backward = [backward_messages(process, self.y[b * n0:(b + 1) * n0])
                         for b in range(1 << n)]
        self.phase = 0
        self.paths = [self._initial_path()]
        self.trace: list[dict] = []

    # storage ---------------------------------------------------------------

    def store_read(self, path: PathState, kind: str, lam: int, beta: int):
        """Latest ``(phase, value)`` of a branch, or None if never written."""
        if lam == self.params.n:
            return path.top_bit if kind == "bit" else path.top_datum
        cea = (path.bits if kind == "bit" else path.data)[lam]
        return cea.read(self.positions[lam][beta >> 1])[beta & 1]

    def store_write(self, path: PathState, kind: str, lam: int, beta: int, phase: int, value):
        if lam == self.params.n:
            old = path.top_bit if kind == "bit" else path.top_datum
            if old is not None and phase <= old[0]:
                raise RuntimeError(f"top {kind} phase {phase} after {old[0]}")
            if kind == "bit":
                path.top_bit = (phase, value)
            else:
                path.top_datum = (phase, value)
            return
        cea = (path.bits if kind == "bit" else path.data)[lam]
        pos = self.positions[lam][beta >> 1]
        cell = cea.read(pos)
        old = cell[beta & 1]
        if old is not None and phase <= old[0]:
            raise RuntimeError(f"{kind} ({lam}, {beta}): phase {phase} after {old[0]}")
        entry = (phase, value)
        cea.write(pos, (entry, cell[1]) if beta & 1 == 0 else (cell[0], entry))

    def _initial_path(self) -> PathState:
        params, process = self.params, self.process
        n, n0 = params.n, params.n0
        eye = np.eye(process.num_states)
        level = [base_datum(process, eye, self.y[b * n0], self.backward[b][0])
                 for b in range(1 << n)]
        path = PathState()
        path.metric = 0.0
        path.bits, path.data = [], []
        for lam in range(n):
            if lam > 0:
                level = [combine_lateral(level[2 * b], level[2 * b + 1], True)
                         for b in range(len(level) // 2)]
            size_log = n - lam - 1
            bits, data = Cea(size_log), Cea(size_log)
            for pos in range(1 << size_log):
                branc = bit_reverse(pos, size_log)
                bits.write(pos, (None, None))
                data.write(pos, ((0, level[2 * branc]), (0, level[2 * branc + 1])))
            path.bits.append(bits)
            path.data.append(data)
        path.top_bit = None
        path.top_datum = None
        path.tracker = [[None, None] for _ in range(n)]
        path.decisions = None
        return path

    # probability recursion -------------------------------------------------

    def _child(self, path, lam, beta, phase) -> Datum:
        entry = self.store_read(path, "datum", lam, beta)
        if entry[0] != phase:
            raise RuntimeError(f"datum ({lam}, {beta}) at phase {entry[0]}, needed {phase}")
        return entry[1]

    def calc_p(self, path: PathState, lam: int, phi: int, beta: int) -> None:
        span = self.params.n0 << lam
        entry = self.store_read(path, "datum", lam, beta)
        if entry is not None and entry[0] == phi:
            return
        if phi == span:
            bit = self.store_read(path, "bit", lam, beta)
            self.store_write(path, "datum", lam, beta, span, zero_other(entry[1], bit[1]))
            return
        if lam == 0:
            bit = self.store_read(path, "bit", 0, beta)
            if entry[0] != phi - 1 or bit[0] != phi - 1:
                raise RuntimeError(f"layer-0 branch {beta} not aligned for phase {phi}")
            i = beta * span + phi
            fwd = advance_forward(self.process, entry[1].forward, bit[1], self.y[i - 1])
            datum = base_datum(self.process, fwd, self.y[i], self.backward[beta][phi])
            self.store_write(path, "datum", 0, beta, phi, datum)
            return
        if phi == 0:
            self.calc_p(path, lam - 1, 0, 2 * beta)
            self.calc_p(path, lam - 1, 0, 2 * beta + 1)
        else:
            for slot in path.tracker[lam - 1]:
                if slot is not None:
                    self.calc_p(path, lam - 1, slot[0] + 1, slot[1])
        if self.lateral[lam][phi]:
            psi = phi // 2
            if phi % 2 == 0:
                datum = combine_lateral(self._child(path, lam - 1, 2 * beta, psi),
                                        self._child(path, lam - 1, 2 * beta + 1, psi), True)
            else:
                datum = combine_lateral(self._child(path, lam - 1, 2 * beta + 1, psi),
                                        self._child(path, lam - 1, 2 * beta, psi + 1), False)
        else:
            pp = (phi - 1) // 2
            a = self._child(path, lam - 1, 2 * beta, pp + 1)
            b = self._child(path, lam - 1, 2 * beta + 1, pp)
            if self.classes[lam][phi] is MM:
                datum = combine_minus(a, b)
            else:
                delta = self.store_read(path, "bit", lam, beta)
                if delta[0] != phi - 1:
                    raise RuntimeError(f"plus phase {phi} without its minus decision")
                datum = combine_plus(a, b, delta[1], self.classes[lam - 1][pp] is MM)
        self.store_write(path, "datum", lam, beta, phi, datum)

    # bit propagation -------------------------------------------------------

    def update_b(self, path: PathState, lam: int, phi: int, beta: int, bit: int, prev_bit) -> None:
        """Propagate ``bit`` at ``(lam, phi, beta)``; ``prev_bit`` is the bit of phase ``phi - 1``."""
        if lam == 0:
            return
        if self.classes[lam][phi] is MM:
            return
        below = lam - 1
        if self.lateral[lam][phi]:
            psi = phi // 2
            child = 2 * beta + (phi % 2)
            before = self.store_read(path, "bit", below, child)
            self.store_write(path, "bit", below, child, psi, bit)
            path.tracker[below][0] = (psi, child)
            self.update_b(path, below, psi, child, bit, None if before is None else before[1])
            return
        pp = (phi - 1) // 2
        summed = bit ^ prev_bit
        if self.classes[below][pp] is MM:
            a_bit, b_bit = summed, bit
        else:
            a_bit, b_bit = bit, summed
        before_b = self.store_read(path, "bit", below, 2 * beta + 1)
        before_a = self.store_read(path, "bit", below, 2 * beta)
        self.store_write(path, "bit", below, 2 * beta + 1, pp, b_bit)
        self.store_write(path, "bit", below, 2 * beta, pp + 1, a_bit)
        path.tracker[below][0] = (pp, 2 * beta + 1)
        path.tracker[below][1] = (pp + 1, 2 * beta)
        self.update_b(path, below, pp, 2 * beta + 1, b_bit, None if before_b is None else before_b[1])
        self.update_b(path, below, pp + 1, 2 * beta, a_bit, None if before_a is None else before_a[1])

    # main loop ---------------------------------------------------------------

    def top_datum(self, path: PathState) -> Datum:
        self.calc_p(path, self.params.n, self.phase, 0)
        return path.top_datum[1]

    def commit(self, path: PathState, bit: int) -> None:
        n, phi = self.params.n, self.phase
        prev = path.top_bit
        self.store_write(path, "bit", n, 0, phi, bit)
        for slots in path.tracker:
            slots[0] = slots[1] = None
        self.update_b(path, n, phi, 0, bit, None if prev is None else prev[1])
        path.decisions = (bit, path.decisions)

    def step(self, shaping: ShapingRule, list_size: int, seed: int = 0) -> None:
        phi = self.phase
        pi = self.process.pi
        weights = [decision_weights(self.top_datum(p), pi) for p in self.paths]
        if shaping.is_data(phi):
            metrics, parents = [], []
            for k, (path, (q0, q1)) in enumerate(zip(self.paths, weights)):
                inc0, inc1 = metric_increments(q0, q1)
                metrics += [path.metric + inc0, path.metric + inc1]
                parents += [(k, 0), (k, 1)]
            keep = select_survivors(metrics, list_size)
            chosen = []
            used = set()
            for c in keep:
                k, bit = parents[c]
                path = self.paths[k]
                if k in used:
                    path = path.clone()
                used.add(k)
                chosen.append((path, bit, metrics[c]))
            # clones are taken before any survivor is committed
            for path, bit, metric in chosen:
                path.metric = metric
                self.commit(path, bit)
            self.paths = [c[0] for c in chosen]
        else:
            for path, (q0, q1) in zip(self.paths, weights):
                p_one = q1 / (q0 + q1) if q0 + q1 > 0 else 0.5
                prefix = path.u_hat() if shaping.frozen.uses_prefix else None
                bit = int(shaping.frozen(phi, prefix, p_one, seed))
                path.metric += metric_increments(q0, q1)[bit]
                self.commit(path, bit)
        self.trace.append({"phase": phi, "data": shaping.is_data(phi),
                           "metrics": [p.metric for p in self.paths]})
        self.phase += 1

    def run(self, shaping: ShapingRule, config: ListConfig, seed: int = 0) -> list[ListEntry]:
        shaping.check_length(self.params.length)
        while self.phase < self.params.length:
            self.step(shaping, config.list_size, seed)
        return self.results(config)

    def results(self, config: ListConfig) -> list[ListEntry]:
        out = []
        for path in self.paths:
            u = np.array(path.u_hat(), dtype=np.uint8)
            out.append(ListEntry(u, inverse(self.params, u), path.metric))
        return rank_entries(out, config)


def rank_entries(entries: list[ListEntry], config: ListConfig) -> list[ListEntry]:
    order = sorted(range(len(entries)), key=lambda k: (-entries[k].log_metric, k))
    if config.crc is not None:
        order.sort(key=lambda k: not config.crc.check(entries[k].u_hat))
    return [entries[k] for k in order]


def scl_run(params: SlowParams, process: HmmProcess, y, shaping: ShapingRule,
            config: ListConfig | int = 1, seed: int = 0) -> list[ListEntry]:
    """List-decode ``y``; returns the final list, best entry first."""
    if isinstance(config, int):
        config = ListConfig(config)
    return SclDecoder(params, process, y).run(shaping, config, seed)


def reference_list_decode(params: SlowParams, process: HmmProcess, y, shaping: ShapingRule,
                          config: ListConfig | int = 1, seed: int = 0) -> list[ListEntry]:
    """List decoder that deep-copies phase-indexed SC state at every fork.

    Same decisions and pruning as :func:`scl_run`, no shared storage.
    """
    if isinstance(config, int):
        config = ListConfig(config)
    N = params.length
    shaping.check_length(N)
    pi = process.pi
    paths = [(ScDecoder(params, process, y), 0.0)]
    for phi in range(N):
        weights = [decision_weights(dec.top_datum(), pi) for dec, _ in paths]
        if shaping.is_data(phi):
            metrics, parents = [], []
            for k, ((dec, metric), (q0, q1)) in enumerate(zip(paths, weights)):
                inc0, inc1 = metric_increments(q0, q1)
                metrics += [metric + inc0, metric + inc1]
                parents += [(k, 0), (k, 1)]
            nxt = []
            for c in select_survivors(metrics, config.list_size):
                k, bit = parents[c]
                dec = paths[k][0].clone()
                dec.commit(bit)
                nxt.append((dec, metrics[c]))
            paths = nxt
        else:
            nxt = []
            for (dec, metric), (q0, q1) in zip(paths, weights):
                p_one = q1 / (q0 + q1) if q0 + q1 > 0 else 0.5
                prefix = dec.B[params.n][:phi].tolist() if shaping.frozen.uses_prefix else None
                bit = int(shaping.frozen(phi, prefix, p_one, seed))
                dec.commit(bit)
                nxt.append((dec, metric + metric_increments(q0, q1)[bit]))
            paths = nxt
    entries = [ListEntry(dec.B[params.n].astype(np.uint8), dec.B[0].astype(np.uint8), metric)
               for dec, metric in paths]
    return rank_entries(entries, config)


__all__ = ["ListConfig", "ListEntry", "PathState", "SclDecoder", "clone_path",
           "reference_list_decode", "scl_run", "select_survivors"]
