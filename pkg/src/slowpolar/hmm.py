"""Finite-state hidden-Markov input/output processes and layer-0 probabilities.

A process is a kernel ``K[s_prev, x, y, s] = P(X_i=x, Y_i=y, S_i=s | S_{i-1}=s_prev)``
over a binary input, a finite output alphabet and a finite state set, together
with the law ``pi`` of the initial state ``S_{-1}``.

Probability tables over ``(u, s, s')`` are held in :class:`Datum`. They are
conditioned on the state entering their block (``s``) and jointly report the
state leaving it (``s'``), so two adjacent blocks chain by a matrix product
over the shared boundary state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_TOL = 1e-12


class Datum:
    """A normalized table ``d[u, s, s']`` plus the log of the removed scale.

    Instances are never mutated after construction. The class keeps a count
    of live instances so memory audits can measure peak datum residency.
    """

    __slots__ = ("table", "log_scale", "forward")

    live = 0
    peak = 0

    def __init__(self, table: np.ndarray, log_scale: float = 0.0, forward=None):
        self.table = table
        self.log_scale = log_scale
        # layer-0 datums carry the forward message they were derived from
        self.forward = forward
        live = Datum.live = Datum.live + 1
        if live > Datum.peak:
            Datum.peak = live

    def __del__(self):
        Datum.live -= 1

    @classmethod
    def reset_peak(cls) -> int:
        cls.peak = cls.live
        return cls.live

    def __repr__(self):
        return f"Datum(log_scale={self.log_scale:.4g}, table={self.table.tolist()})"


def normalized(table: np.ndarray, log_scale: float, forward=None) -> Datum:
    total = table.sum()
    if total > 0:
        return Datum(table / total, log_scale + math.log(total), forward)
    # zero-probability hypothesis; kept as an all-zero table
    return Datum(table, -math.inf, forward)


@dataclass(frozen=True, eq=False)
class HmmProcess:
    """Finite-state joint input/output process.

    Parameters
    ----------
    kernel : ndarray, shape (S, 2, Y, S)
        ``kernel[s_prev, x, y, s]``; each ``kernel[s_prev]`` sums to one.
    pi : ndarray, shape (S,)
        Distribution of the state before the first symbol.
    """

    kernel: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        kernel = np.array(self.kernel, dtype=float)
        pi = np.array(self.pi, dtype=float)
        if kernel.ndim != 4 or kernel.shape[1] != 2 or kernel.shape[0] != kernel.shape[3]:
            raise ValueError(f"kernel must have shape (S, 2, Y, S), got {kernel.shape}")
        if pi.shape != (kernel.shape[0],):
            raise ValueError("pi must have one entry per state")
        if np.any(kernel < 0) or not np.all(np.isfinite(kernel)):
            raise ValueError("kernel entries must be finite and nonnegative")
        if np.any(np.abs(kernel.sum(axis=(1, 2, 3)) - 1) > _TOL):
            raise ValueError("kernel rows must sum to 1")
        if np.any(pi < 0) or abs(pi.sum() - 1) > _TOL:
            raise ValueError("pi must be a probability vector")
        kernel.flags.writeable = False
        pi.flags.writeable = False
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "pi", pi)
        # cached views used on hot paths
        object.__setattr__(self, "_by_input", np.ascontiguousarray(kernel.transpose(1, 2, 0, 3)))
        object.__setattr__(self, "_absent", np.ascontiguousarray(kernel.sum(axis=2).transpose(1, 0, 2)))

    @property
    def num_states(self) -> int:
        return self.kernel.shape[0]

    @property
    def num_outputs(self) -> int:
        return self.kernel.shape[2]

    def emission(self, x: int, y) -> np.ndarray:
        """Matrix ``[t, t'] = P(X=x, Y=y, S'=t' | S=t)``; ``y=None`` marginalizes."""
        if y is None:
            return self._absent[x]
        return self._by_input[x, y]

    def transition(self, y=None) -> np.ndarray:
        """Matrix ``[t, t'] = P(Y=y, S'=t' | S=t)`` with the input marginalized."""
        return self.emission(0, y) + self.emission(1, y)

    def state_chain(self) -> np.ndarray:
        return self.kernel.sum(axis=(1, 2))

    def to_json(self) -> dict:
        return {
            "states": self.num_states,
            "pi": self.pi.tolist(),
            "outputs": self.num_outputs,
            "kernel": self.kernel.tolist(),
        }

    @classmethod
    def from_json(cls, spec: dict) -> "HmmProcess":
        kernel = np.array(spec["kernel"], dtype=float)
        expected = (spec["states"], 2, spec["outputs"], spec["states"])
        if kernel.shape != expected:
            raise ValueError(f"kernel shape {kernel.shape} does not match {expected}")
        pi = spec.get("pi")
        if pi is None:
            pi = stationary_distribution(kernel.sum(axis=(1, 2)))
        return cls(kernel, pi)

    @classmethod
    def load(cls, path) -> "HmmProcess":
        return cls.from_json(json.loads(Path(path).read_text()))


def stationary_distribution(chain: np.ndarray) -> np.ndarray:
    """Unique stationary law of a row-stochastic matrix, or ValueError."""
    chain = np.asarray(chain, dtype=float)
    k = chain.shape[0]
    system = np.vstack([chain.T - np.eye(k), np.ones((1, k))])
    if np.linalg.matrix_rank(system[:-1]) != k - 1:
        raise ValueError("state chain has no unique stationary distribution; pass pi")
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    pi = np.clip(pi, 0, None)
    return pi / pi.sum()


def _check_prob(name, p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


def memoryless_bsc(p: float) -> HmmProcess:
    """Uniform-input binary symmetric channel with crossover ``p``."""
    _check_prob("p", p)
    kernel = np.empty((1, 2, 2, 1))
    for x in (0, 1):
        for y in (0, 1):
            kernel[0, x, y, 0] = 0.5 * (p if x != y else 1 - p)
    return HmmProcess(kernel, [1.0])


def gilbert_elliott(g2b: float, b2g: float, p_good: float, p_bad: float,
                    pi=None) -> HmmProcess:
    """Two-state burst channel with uniform input.

    State 0 is good and state 1 is bad. The crossover probability of symbol
    ``i`` is set by the state ``S_i`` entered at that symbol.
    """
    for name, value in (("g2b", g2b), ("b2g", b2g), ("p_good", p_good), ("p_bad", p_bad)):
        _check_prob(name, value)
    chain = np.array([[1 - g2b, g2b], [b2g, 1 - b2g]])
    flip = (p_good, p_bad)
    kernel = np.empty((2, 2, 2, 2))
    for sp in range(2):
        for s in range(2):
            for x in (0, 1):
                for y in (0, 1):
                    kernel[sp, x, y, s] = 0.5 * chain[sp, s] * (flip[s] if x != y else 1 - flip[s])
    if pi is None:
        if g2b + b2g == 0:
            raise ValueError("both states are absorbing; pass pi")
        pi = np.array([b2g, g2b]) / (g2b + b2g)
    return HmmProcess(kernel, pi)


def sample(process: HmmProcess, n_symbols: int, rng: np.random.Generator):
    """Draw ``(x, y, states)`` of length ``n_symbols`` from the joint process."""
    if n_symbols < 1:
        raise ValueError("n_symbols must be positive")
    k, _, m, _ = process.kernel.shape
    flat = process.kernel.reshape(k, -1)
    cdf = np.cumsum(flat, axis=1)
    draws = rng.random(n_symbols)
    state = int(rng.choice(k, p=process.pi))
    x = np.empty(n_symbols, dtype=np.uint8)
    y = np.empty(n_symbols, dtype=np.int64)
    states = np.empty(n_symbols, dtype=np.int64)
    for i in range(n_symbols):
        idx = min(int(np.searchsorted(cdf[state], draws[i], side="right")), flat.shape[1] - 1)
        xi, rest = divmod(idx, m * k)
        yi, state = divmod(rest, k)
        x[i], y[i], states[i] = xi, yi, state
    return x, y, states


def sample_channel(process: HmmProcess, x, rng: np.random.Generator):
    """Draw outputs and states for a fixed input sequence ``x``.

    Uses the channel law ``P(Y_i, S_i | X_i, S_{i-1})`` implied by the kernel.
    """
    x = np.asarray(x)
    k, _, m, _ = process.kernel.shape
    state = int(rng.choice(k, p=process.pi))
    draws = rng.random(len(x))
    y = np.empty(len(x), dtype=np.int64)
    states = np.empty(len(x), dtype=np.int64)
    for i, xi in enumerate(x):
        row = process.kernel[state, xi].reshape(-1)
        total = row.sum()
        if total <= 0:
            raise ValueError(f"input {xi} has zero probability in state {state}")
        idx = min(int(np.searchsorted(np.cumsum(row), draws[i] * total, side="right")), row.size - 1)
        y[i], state = divmod(idx, k)
        states[i] = state
    return y, states


def joint_prob(process: HmmProcess, x, y=None) -> float:
    """Exact ``P(X=x, Y=y)`` by the forward recursion (``y=None`` marginalizes Y)."""
    x = np.asarray(x)
    if y is not None and len(y) != len(x):
        raise ValueError("x and y lengths differ")
    alpha = process.pi.copy()
    for i, xi in enumerate(x):
        alpha = alpha @ process.emission(int(xi), None if y is None else int(y[i]))
    return float(alpha.sum())


def backward_messages(process: HmmProcess, y_block) -> np.ndarray:
    """``b[phi, t, s'] = P(y_{phi+1..}, S_last=s' | S_phi=t)`` with inputs marginalized."""
    length = len(y_block)
    k = process.num_states
    out = np.empty((length, k, k))
    out[-1] = np.eye(k)
    for phi in range(length - 2, -1, -1):
        out[phi] = process.transition(y_block[phi + 1]) @ out[phi + 1]
    return out


def advance_forward(process: HmmProcess, forward: np.ndarray, bit: int, y) -> np.ndarray:
    """Extend ``a[s, t] = P(decided prefix, S_now=t | S_entry=s)`` by one symbol."""
    return forward @ process.emission(bit, y)


def base_datum(process: HmmProcess, forward: np.ndarray, y, backward: np.ndarray) -> Datum:
    if y is None:
        table = forward @ process._absent @ backward
    else:
        table = forward @ process._by_input[:, y] @ backward
    return normalized(table, 0.0, forward)


class BranchEngine:
    """Incremental layer-0 probabilities for one block of ``N0`` symbols.

    Parameters
    ----------
    process : HmmProcess
    y_block : sequence of int, or None
        Observations of the block; ``None`` means absent (encoding).
    length : int
        Block length; required when ``y_block`` is None.
    """

    def __init__(self, process: HmmProcess, y_block=None, length: int | None = None):
        if y_block is None:
            if length is None:
                raise ValueError("length is required for absent observations")
            y_block = [None] * length
        else:
            y_block = [int(v) for v in y_block]
            if length is not None and len(y_block) != length:
                raise ValueError(f"observation window has {len(y_block)} symbols, expected {length}")
        self.process = process
        self.y = y_block
        self.backward = backward_messages(process, y_block)
        self.forward = np.eye(process.num_states)
        self.phase = -1

    def update_base_probs(self, phase: int, prev_bit: int | None = None) -> Datum:
        if phase != self.phase + 1:
            raise RuntimeError(f"phase {phase} requested after phase {self.phase}")
        if phase > 0:
            if prev_bit is None:
                raise RuntimeError("previous decision is required after phase 0")
            self.forward = advance_forward(self.process, self.forward, prev_bit, self.y[phase - 1])
        self.phase = phase
        return base_datum(self.process, self.forward, self.y[phase], self.backward[phase])


def init_branch(process: HmmProcess, y_or_absent, branch_extent) -> BranchEngine:
    """Engine for the symbols ``branch_extent`` (a range) of ``y_or_absent``."""
    extent = range(branch_extent.start, branch_extent.stop) if isinstance(branch_extent, range) \
        else range(*branch_extent)
    if y_or_absent is None:
        return BranchEngine(process, None, len(extent))
    return BranchEngine(process, [y_or_absent[i] for i in extent])
