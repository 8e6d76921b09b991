"""Reference successive-cancellation coder with phase-indexed arrays.

Every layer keeps a bit array ``B[lam]`` and a datum array ``P[lam]`` over all
``N`` flat indices. The list decoder in :mod:`slowpolar.scl` stores the same
quantities indexed by branch only and is tested against this module.

Datum combination rules
-----------------------
Branch ``beta`` of layer ``lam`` is built from children ``A = 2*beta`` and
``B = 2*beta + 1`` of layer ``lam - 1``, adjacent in time. With datums
conditioned on the entry state, the parent table is a matrix product over the
boundary state ``m``:

* lateral phase hosted by child ``H``, other child ``O`` marginalized over its
  bit: ``dH[u] @ margO`` (host A) or ``margO @ dH[u]`` (host B);
* minus phase: ``sum_b dA[u^b] @ dB[b]``;
* plus phase after minus decision ``delta``: ``dA[delta^u] @ dB[u]`` when the
  child phase ``psi'`` is a minus phase, else ``dA[u] @ dB[delta^u]``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .geometry import PhaseClass, SlowParams, classify_phase, phase_classes
from .hmm import BranchEngine, Datum, HmmProcess, normalized
from .shaping import ShapingRule

LT, MM, MP, LB = (PhaseClass.LATERAL_TOP, PhaseClass.MEDIAL_MINUS,
                  PhaseClass.MEDIAL_PLUS, PhaseClass.LATERAL_BOTTOM)


def combine_lateral(host: Datum, other: Datum, host_first: bool) -> Datum:
    t = other.table
    marg = t[0] + t[1]
    table = host.table @ marg if host_first else marg @ host.table
    return normalized(table, host.log_scale + other.log_scale)


def combine_minus(a: Datum, b: Datum) -> Datum:
    A, B = a.table, b.table
    table = np.empty_like(A)
    table[0] = A[0] @ B[0] + A[1] @ B[1]
    table[1] = A[1] @ B[0] + A[0] @ B[1]
    return normalized(table, a.log_scale + b.log_scale)


def combine_plus(a: Datum, b: Datum, delta: int, child_is_minus: bool) -> Datum:
    A, B = a.table, b.table
    table = np.empty_like(A)
    if child_is_minus:
        table[0] = A[delta] @ B[0]
        table[1] = A[1 - delta] @ B[1]
    else:
        table[0] = A[0] @ B[delta]
        table[1] = A[1] @ B[1 - delta]
    return normalized(table, a.log_scale + b.log_scale)


def zero_other(d: Datum, bit: int) -> Datum:
    """Copy of ``d`` with every entry of the undecided bit set to zero."""
    table = d.table.copy()
    table[1 - bit] = 0.0
    return Datum(table, d.log_scale, d.forward)


def decision_weights(d: Datum, pi: np.ndarray) -> tuple[float, float]:
    """``q_u = sum_{s, s'} pi(s) d[u, s, s']`` for the top-layer datum."""
    q = d.table.sum(axis=2) @ pi
    return float(q[0]), float(q[1])


def metric_increments(q0: float, q1: float) -> tuple[float, float]:
    total = q0 + q1
    if total <= 0:
        return -math.inf, -math.inf
    return (math.log(q0 / total) if q0 > 0 else -math.inf,
            math.log(q1 / total) if q1 > 0 else -math.inf)


class ScResult(NamedTuple):
    u_hat: np.ndarray
    x_hat: np.ndarray


class ScDecoder:
    """Successive-cancellation encoder/decoder over a hidden-Markov process.

    Parameters
    ----------
    params : SlowParams
    process : HmmProcess
    y : sequence of int or None
        Observations of length ``N``; None runs with absent observations.
    trace : bool
        Record every bit and datum write as ``(kind, layer, phase, branch)``
        in :attr:`events`, and keep each computed datum in :attr:`datum_log`.
    """

    def __init__(self, params: SlowParams, process: HmmProcess, y=None, trace: bool = False):
        self.params = params
        self.process = process
        n, N, n0 = params.n, params.length, params.n0
        if y is not None:
            y = np.asarray(y, dtype=np.int64)
            if y.shape != (N,):
                raise ValueError(f"expected {N} observations, got {y.shape}")
            if y.min(initial=0) < 0 or y.max(initial=0) >= process.num_outputs:
                raise ValueError("observation outside the output alphabet")
        self.y = y
        self.classes = [phase_classes(params, lam) for lam in range(n + 1)]
        self.B = [np.full(N, -1, dtype=np.int8) for _ in range(n + 1)]
        self.P: list[list[Datum | None]] = [[None] * N for _ in range(n + 1)]
        self.zeroed = [np.zeros(N, dtype=bool) for _ in range(n + 1)]
        self.engines = [BranchEngine(process, None if y is None else y[b * n0:(b + 1) * n0], n0)
                        for b in range(1 << n)]
        self.tracker = [[None, None] for _ in range(n)]
        self.trace = trace
        self.events: list[tuple] = []
        self.datum_log: list[tuple] = []
        self.p_one = np.full(N, np.nan)
        self.phase = 0
        for b, engine in enumerate(self.engines):
            self._store(0, 0, b, engine.update_base_probs(0))

    # bookkeeping -----------------------------------------------------------

    def _store(self, lam, phi, beta, datum):
        self.P[lam][beta * (self.params.n0 << lam) + phi] = datum
        if self.trace:
            self.events.append(("P", lam, phi, beta))
            self.datum_log.append((lam, phi, beta, datum))

    def _set_bit(self, lam, phi, beta, bit):
        i = beta * (self.params.n0 << lam) + phi
        if self.B[lam][i] >= 0:
            raise RuntimeError(f"bit ({lam}, {phi}, {beta}) written twice")
        self.B[lam][i] = bit
        if self.trace:
            self.events.append(("B", lam, phi, beta))

    def _bit(self, lam, phi, beta) -> int:
        b = int(self.B[lam][beta * (self.params.n0 << lam) + phi])
        if b < 0:
            raise RuntimeError(f"bit ({lam}, {phi}, {beta}) read before it was set")
        return b

    def _datum(self, lam, phi, beta) -> Datum:
        span = self.params.n0 << lam
        if phi == span:
            # a complete child contributes its zeroed final datum
            i = beta * span + phi - 1
            if not self.zeroed[lam][i]:
                raise RuntimeError(f"final datum of ({lam}, {beta}) not zeroed")
            return self.P[lam][i]
        d = self.P[lam][beta * span + phi]
        if d is None:
            raise RuntimeError(f"datum ({lam}, {phi}, {beta}) missing")
        return d

    def reset_tracker(self):
        for slots in self.tracker:
            slots[0] = slots[1] = None

    # probability recursion -------------------------------------------------

    def recursively_calc_p(self, lam: int, phi: int, beta: int) -> None:
        span = self.params.n0 << lam
        if phi == span:
            i = beta * span + phi - 1
            if not self.zeroed[lam][i]:
                self.P[lam][i] = zero_other(self.P[lam][i], self._bit(lam, phi - 1, beta))
                self.zeroed[lam][i] = True
                if self.trace:
                    self.events.append(("P", lam, phi - 1, beta))
            return
        if self.P[lam][beta * span + phi] is not None:
            return
        if lam == 0:
            if phi > 0:
                prev = self._bit(0, phi - 1, beta)
                self._store(0, phi, beta, self.engines[beta].update_base_probs(phi, prev))
            return
        if phi == 0:
            self.recursively_calc_p(lam - 1, 0, 2 * beta)
            self.recursively_calc_p(lam - 1, 0, 2 * beta + 1)
        else:
            for slot in self.tracker[lam - 1]:
                if slot is not None:
                    self.recursively_calc_p(lam - 1, slot[0] + 1, slot[1])
        if self.classes[lam][phi].is_lateral:
            datum = self.lateral_prob(lam, phi, beta)
        else:
            datum = self.medial_prob(lam, phi, beta)
        self._store(lam, phi, beta, datum)

    def lateral_prob(self, lam: int, phi: int, beta: int) -> Datum:
        psi = phi // 2
        if phi % 2 == 0:
            return combine_lateral(self._datum(lam - 1, psi, 2 * beta),
                                   self._datum(lam - 1, psi, 2 * beta + 1), True)
        return combine_lateral(self._datum(lam - 1, psi, 2 * beta + 1),
                               self._datum(lam - 1, psi + 1, 2 * beta), False)

    def medial_prob(self, lam: int, phi: int, beta: int) -> Datum:
        pp = (phi - 1) // 2
        a = self._datum(lam - 1, pp + 1, 2 * beta)
        b = self._datum(lam - 1, pp, 2 * beta + 1)
        if self.classes[lam][phi] is MM:
            return combine_minus(a, b)
        delta = self._bit(lam, phi - 1, beta)
        return combine_plus(a, b, delta, self.classes[lam - 1][pp] is MM)

    # bit propagation -------------------------------------------------------

    def recursively_update_b(self, lam: int, phi: int, beta: int) -> None:
        if lam == 0:
            return
        cls = self.classes[lam][phi]
        if cls is MM:
            return
        bit = self._bit(lam, phi, beta)
        if cls.is_lateral:
            psi = phi // 2
            child = 2 * beta + (phi % 2)
            self._set_bit(lam - 1, psi, child, bit)
            self.tracker[lam - 1][0] = (psi, child)
            self.recursively_update_b(lam - 1, psi, child)
            return
        pp = (phi - 1) // 2
        summed = bit ^ self._bit(lam, phi - 1, beta)
        if self.classes[lam - 1][pp] is MM:
            self._set_bit(lam - 1, pp + 1, 2 * beta, summed)
            self._set_bit(lam - 1, pp, 2 * beta + 1, bit)
        else:
            self._set_bit(lam - 1, pp, 2 * beta + 1, summed)
            self._set_bit(lam - 1, pp + 1, 2 * beta, bit)
        self.tracker[lam - 1][0] = (pp, 2 * beta + 1)
        self.tracker[lam - 1][1] = (pp + 1, 2 * beta)
        self.recursively_update_b(lam - 1, pp, 2 * beta + 1)
        self.recursively_update_b(lam - 1, pp + 1, 2 * beta)

    # main loop ---------------------------------------------------------------

    def top_datum(self) -> Datum:
        """Datum of the current top-layer phase, computing it if needed."""
        self.recursively_calc_p(self.params.n, self.phase, 0)
        return self.P[self.params.n][self.phase]

    def commit(self, bit: int) -> None:
        """Fix the current top-layer phase to ``bit`` and propagate it."""
        n, phi = self.params.n, self.phase
        self._set_bit(n, phi, 0, int(bit))
        self.reset_tracker()
        self.recursively_update_b(n, phi, 0)
        self.phase += 1

    def run(self, shaping: ShapingRule, message=None, seed: int = 0) -> ScResult:
        N = self.params.length
        shaping.check_length(N)
        message = None if message is None else [int(b) for b in message]
        if message is not None and len(message) != sum(shaping.data_mask):
            raise ValueError(f"expected {sum(shaping.data_mask)} message bits, got {len(message)}")
        stream = iter(message) if message is not None else None
        pi = self.process.pi
        while self.phase < N:
            phi = self.phase
            q0, q1 = decision_weights(self.top_datum(), pi)
            self.p_one[phi] = q1 / (q0 + q1) if q0 + q1 > 0 else 0.5
            if not shaping.is_data(phi):
                prefix = self.B[self.params.n][:phi].tolist() if shaping.frozen.uses_prefix else None
                bit = shaping.frozen(phi, prefix, self.p_one[phi], seed)
            elif stream is not None:
                bit = next(stream)
            else:
                bit = 1 if q1 > q0 else 0
            self.commit(bit)
        return ScResult(self.B[self.params.n].astype(np.uint8), self.B[0].astype(np.uint8))

    def clone(self) -> "ScDecoder":
        """Independent deep copy of the decoding state (datums are immutable)."""
        other = object.__new__(ScDecoder)
        other.__dict__.update(self.__dict__)
        other.B = [b.copy() for b in self.B]
        other.P = [list(p) for p in self.P]
        other.zeroed = [z.copy() for z in self.zeroed]
        engines = []
        for e in self.engines:
            c = object.__new__(BranchEngine)
            c.__dict__.update(e.__dict__)
            c.forward = e.forward.copy()
            engines.append(c)
        other.engines = engines
        other.tracker = [list(s) for s in self.tracker]
        other.events = list(self.events)
        other.datum_log = list(self.datum_log)
        other.p_one = self.p_one.copy()
        return other


def sc_run(params: SlowParams, process: HmmProcess, y, shaping: ShapingRule,
           mode: str = "decode", message=None, seed: int = 0) -> ScResult:
    """Run successive cancellation over all ``N`` phases.

    ``mode="decode"`` picks data bits by maximum a-posteriori decision (ties
    to 0); ``mode="encode"`` takes them from ``message``. Shaping phases use
    ``shaping.frozen`` in both modes.
    """
    if mode not in ("decode", "encode"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "encode" and message is None:
        raise ValueError("encode mode needs message bits")
    decoder = ScDecoder(params, process, y)
    return decoder.run(shaping, message if mode == "encode" else None, seed)
