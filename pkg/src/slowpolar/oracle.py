"""Brute-force ground truth for small transforms.

Every input word ``x`` in ``{0,1}^N`` is enumerated together with its
transform ``u`` and the table ``J[x, s, s'] = P(X=x, Y=y, S_last=s' | S_{-1}=s)``
obtained by a state-path forward recursion. Datums, MAP words and posteriors
are then sums over rows of that table.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import SlowParams
from .hmm import HmmProcess
from .shaping import ShapingRule
from .transform import generator_matrix

DEFAULT_MAX_LENGTH = 20


class BudgetExceeded(RuntimeError):
    """The requested enumeration exceeds the configured size cap."""


def all_words(length: int) -> np.ndarray:
    idx = np.arange(1 << length, dtype=np.int64)
    shifts = np.arange(length - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8)


def path_table(process: HmmProcess, words: np.ndarray, y=None) -> np.ndarray:
    """``J[r, s, s']`` for every row ``r`` of ``words`` (entry-conditional)."""
    k = process.num_states
    alpha = np.broadcast_to(np.eye(k), (len(words), k, k)).copy()
    for i in range(words.shape[1]):
        yi = None if y is None else int(y[i])
        e0, e1 = process.emission(0, yi), process.emission(1, yi)
        ones = words[:, i] == 1
        nxt = alpha @ e0
        nxt[ones] = alpha[ones] @ e1
        alpha = nxt
    return alpha


def state_path_joint(process: HmmProcess, x, y=None, pi=None) -> np.ndarray:
    """``P(S_{-1}=s, X=x, Y=y, S_last=s')`` by explicit enumeration of state paths."""
    k = process.num_states
    pi = process.pi if pi is None else pi
    out = np.zeros((k, k))
    n = len(x)
    for path in np.ndindex(*([k] * (n + 1))):
        w = pi[path[0]]
        for i in range(n):
            ker = process.kernel[path[i], int(x[i])]
            w *= ker[int(y[i]), path[i + 1]] if y is not None else ker[:, path[i + 1]].sum()
        out[path[0], path[-1]] += w
    return out


@dataclass
class OracleInstance:
    """Exhaustive model of one transform instance.

    Parameters
    ----------
    params : SlowParams
    process : HmmProcess
    y : sequence of int or None
        Observation block (None means absent).
    max_length : int
        Largest ``N`` the instance will enumerate.
    """

    params: SlowParams
    process: HmmProcess
    y: object = None
    max_length: int = DEFAULT_MAX_LENGTH
    _x: np.ndarray = field(default=None, init=False, repr=False)
    _u: np.ndarray = field(default=None, init=False, repr=False)
    _j: np.ndarray = field(default=None, init=False, repr=False)

    def __post_init__(self):
        N = self.params.length
        if N > self.max_length:
            raise BudgetExceeded(f"N={N} exceeds oracle cap {self.max_length}")
        if self.y is not None and len(self.y) != N:
            raise ValueError(f"expected {N} observations")

    def _tables(self):
        if self._x is None:
            self._x = all_words(self.params.length)
            g = generator_matrix(self.params).astype(np.int64)
            self._u = ((self._x.astype(np.int64) @ g) & 1).astype(np.uint8)
            self._j = path_table(self.process, self._x, self.y)
        return self._x, self._u, self._j

    def _prefix_rows(self, prefix) -> np.ndarray:
        _, u, _ = self._tables()
        prefix = np.asarray(prefix, dtype=np.uint8)
        if len(prefix) == 0:
            return np.ones(len(u), dtype=bool)
        return np.all(u[:, :len(prefix)] == prefix, axis=1)

    def exact_datum(self, prefix, phase: int, conditional: bool = False) -> np.ndarray:
        """Table ``[u, s, s']`` of ``P(U_phase=u, S_{-1}=s, S_last=s'; prefix, y)``.

        With ``conditional=True`` the entry-state weight ``pi(s)`` is left
        out, giving the probability conditioned on ``S_{-1}=s``.
        """
        if len(prefix) != phase or not 0 <= phase < self.params.length:
            raise ValueError("prefix length must equal the phase")
        _, u, j = self._tables()
        rows = self._prefix_rows(prefix)
        k = self.process.num_states
        out = np.zeros((2, k, k))
        for bit in (0, 1):
            out[bit] = j[rows & (u[:, phase] == bit)].sum(axis=0)
        if not conditional:
            out *= self.process.pi[None, :, None]
        return out

    def word_joints(self) -> np.ndarray:
        """``P(U=u, Y=y)`` indexed by the integer value of ``u`` (MSB = phase 0)."""
        _, u, j = self._tables()
        weights = (j.sum(axis=2) @ self.process.pi)
        shifts = np.arange(self.params.length - 1, -1, -1)
        keys = (u.astype(np.int64) << shifts).sum(axis=1)
        out = np.zeros(1 << self.params.length)
        out[keys] = weights
        return out

    def evidence(self) -> float:
        return float(self.word_joints().sum())

    def ranked_words(self, shaping: ShapingRule, seed: int = 0, max_data: int = 20):
        """All shaping-consistent words with exact posteriors, best first.

        Returns a list of ``(data word, u, posterior)``.
        """
        N = self.params.length
        shaping.check_length(N)
        data = shaping.data_phases
        if len(data) > max_data:
            raise BudgetExceeded(f"{len(data)} data phases exceed cap {max_data}")
        joints = self.word_joints()
        total = joints.sum()
        shifts = np.arange(N - 1, -1, -1)
        out = []
        for word in all_words(len(data)) if data else np.zeros((1, 0), dtype=np.uint8):
            it = iter(word.tolist())
            u = []
            for phi in range(N):
                u.append(next(it) if shaping.is_data(phi) else int(shaping.frozen(phi, u, 0.5, seed)))
            key = int((np.array(u, dtype=np.int64) << shifts).sum())
            out.append((tuple(word.tolist()), np.array(u, dtype=np.uint8), joints[key] / total))
        out.sort(key=lambda item: -item[2])
        return out

    def exact_map_word(self, shaping: ShapingRule, seed: int = 0):
        word, _, posterior = self.ranked_words(shaping, seed)[0]
        return word, posterior


def exact_block_datum(params: SlowParams, process: HmmProcess, y, layer: int, branch: int,
                      prefix, phase: int) -> np.ndarray:
    """Entry-conditional datum of one branch of an intermediate layer.

    The branch covers symbols ``branch * N_layer .. (branch + 1) * N_layer - 1``
    and is itself a slow transform of depth ``layer``.
    """
    sub = SlowParams(params.l0, params.m0, layer)
    span = sub.length
    block = None if y is None else list(y[branch * span:(branch + 1) * span])
    return OracleInstance(sub, process, block).exact_datum(prefix, phase, conditional=True)
