"""Monte-Carlo campaigns, code construction and CEA benchmarks."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cea import Cea, copies_per_cycle
from .geometry import SlowParams
from .hmm import HmmProcess, gilbert_elliott, memoryless_bsc, sample, sample_channel
from .sc import ScDecoder
from .scl import ListConfig, SclDecoder
from .shaping import GenieBits, ShapingRule, read_data_phases, with_crc
from .transform import forward, inverse

RESULT_FIELDS = ("channel", "N", "rate", "list_size", "trials", "frame_errors",
                 "bit_errors", "fer", "ber", "elapsed_ms", "seed")


def parse_channel(spec: str) -> HmmProcess:
    """``bsc:P``, ``ge:G2B,B2G,P_GOOD,P_BAD`` or a path to a process JSON file."""
    kind, _, args = spec.partition(":")
    if kind == "bsc" and args:
        return memoryless_bsc(float(args))
    if kind in ("ge", "gilbert_elliott") and args:
        values = [float(v) for v in args.split(",")]
        if len(values) != 4:
            raise ValueError("gilbert_elliott needs g2b,b2g,p_good,p_bad")
        return gilbert_elliott(*values)
    path = Path(spec)
    if path.exists():
        return HmmProcess.load(path)
    raise ValueError(f"unrecognized channel {spec!r}")


def trial_rng(seed: int, *counters: int) -> np.random.Generator:
    """Independent stream for one trial, derived from the master seed by counters."""
    return np.random.default_rng([seed, *counters])


@dataclass
class SimConfig:
    """One campaign: every channel crossed with every list size."""

    l0: int
    m0: int
    n: int
    channels: list = field(default_factory=lambda: ["bsc:0.05"])
    list_sizes: list = field(default_factory=lambda: [1])
    trials: int = 100
    seed: int = 0
    data_phases: list | None = None
    data_phase_file: str | None = None
    rate: float | None = None
    train_trials: int = 200
    crc_width: int = 0
    timing: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.rate is not None and not 0.0 <= self.rate <= 1.0:
            raise ValueError("rate must lie in [0, 1]")

    @property
    def params(self) -> SlowParams:
        return SlowParams(self.l0, self.m0, self.n)

    @classmethod
    def from_json(cls, path) -> "SimConfig":
        return cls(**json.loads(Path(path).read_text()))


@dataclass
class ResultRow:
    channel: str
    N: int
    rate: float
    list_size: int
    trials: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    elapsed_ms: float | None
    seed: int


def estimate_phase_errors(params: SlowParams, process: HmmProcess, trials: int,
                          seed: int) -> np.ndarray:
    """Genie-aided SC error rate of every phase, from sampled input/output pairs."""
    N = params.length
    errors = np.zeros(N)
    for t in range(trials):
        x, y, _ = sample(process, N, trial_rng(seed, t))
        u = forward(params, x)
        decoder = ScDecoder(params, process, y)
        decoder.run(ShapingRule((False,) * N, GenieBits(tuple(int(v) for v in u))))
        guesses = (decoder.p_one > 0.5).astype(np.uint8)
        errors += guesses != u
    return errors / trials


def construct(params: SlowParams, process: HmmProcess, rate: float, train_trials: int,
              seed: int) -> list[int]:
    """Phases with the lowest estimated error rates (ties to lower phase)."""
    if train_trials < 100:
        raise ValueError("construction needs at least 100 training trials")
    estimates = estimate_phase_errors(params, process, train_trials, seed)
    k = math.ceil(rate * params.length)
    order = sorted(range(params.length), key=lambda phi: (estimates[phi], phi))
    return sorted(order[:k])


def build_shaping(config: SimConfig, process: HmmProcess) -> ShapingRule:
    N = config.params.length
    if config.data_phases is not None:
        phases = list(config.data_phases)
    elif config.data_phase_file is not None:
        phases = read_data_phases(config.data_phase_file)
    elif config.rate is not None:
        phases = construct(config.params, process, config.rate, config.train_trials, config.seed)
    else:
        raise ValueError("need data phases, a data-phase file, or a target rate")
    if config.crc_width:
        return with_crc(N, phases, config.crc_width)
    return ShapingRule.from_data_phases(N, phases)


def run_trial(params: SlowParams, process: HmmProcess, shaping: ShapingRule,
              list_size: int, rng: np.random.Generator, seed: int = 0):
    """One encode, channel, decode round.

    Returns ``(message, decoded message, list)`` where the list is best first.
    """
    k = sum(shaping.data_mask)
    message = rng.integers(0, 2, k, dtype=np.uint8)
    u = shaping.encode(message, seed)
    x = inverse(params, u)
    y, _ = sample_channel(process, x, rng)
    crc = getattr(shaping.frozen, "check", None) and shaping.frozen
    entries = SclDecoder(params, process, y).run(shaping, ListConfig(list_size, crc), seed)
    data = np.array(shaping.data_phases, dtype=np.int64)
    return message, entries[0].u_hat[data], entries


def simulate(config: SimConfig) -> list[ResultRow]:
    params = config.params
    rows = []
    for c, channel in enumerate(config.channels):
        process = parse_channel(channel)
        shaping = build_shaping(config, process)
        k = len(shaping.data_phases)
        for list_size in config.list_sizes:
            start = time.perf_counter()
            frame_errors = bit_errors = 0
            for t in range(config.trials):
                message, decoded, _ = run_trial(params, process, shaping, list_size,
                                                trial_rng(config.seed, c, t), config.seed)
                wrong = int(np.count_nonzero(message != decoded))
                bit_errors += wrong
                frame_errors += wrong > 0
            elapsed = (time.perf_counter() - start) * 1e3 if config.timing else None
            rows.append(ResultRow(
                channel=channel, N=params.length, rate=k / params.length,
                list_size=list_size, trials=config.trials, frame_errors=frame_errors,
                bit_errors=bit_errors, fer=frame_errors / config.trials,
                ber=bit_errors / (config.trials * k) if k else 0.0,
                elapsed_ms=elapsed, seed=config.seed))
    return rows


def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RESULT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        record = asdict(row)
        if record["elapsed_ms"] is None:
            record["elapsed_ms"] = ""
        writer.writerow(record)
    return buf.getvalue()


def cea_bench(size_logs, cycles: int = 1) -> list[dict]:
    """Copy counts and time per advancing write over full CEA cycles."""
    report = []
    for lam in size_logs:
        if not 0 <= lam <= 24:
            raise ValueError("size_log must lie in [0, 24]")
        cea = Cea(lam)
        cea.write(0, 0)
        # complete the first cycle so every measured cycle starts at a wrap
        for k in range(1, cea.size):
            cea.write(k, k)
        before = cea.copies
        start = time.perf_counter()
        writes = cycles * cea.size
        for k in range(writes):
            cea.advance(k)
        elapsed = time.perf_counter() - start
        report.append({
            "size_log": lam,
            "copies_per_cycle": (cea.copies - before) // cycles,
            "expected": copies_per_cycle(lam),
            "seconds_per_write": elapsed / writes,
        })
    return report
