"""
Decoding over a Gilbert-Elliott burst channel
=============================================

Build a code for a channel with memory, send random messages through it and
compare successive cancellation with list decoding on identical noise.
"""

import numpy as np

from slowpolar import SlowParams, ShapingRule, gilbert_elliott
from slowpolar.sim import construct, run_trial, trial_rng

# a bursty channel: rare switches into a bad state with 30% crossover
channel = gilbert_elliott(g2b=0.1, b2g=0.3, p_good=0.02, p_bad=0.3)
print("stationary state law:", np.round(channel.pi, 3))

# N0 = 16 with four layers gives N = 256
params = SlowParams(1, 14, 4)

# pick the 64 most reliable phases by genie-aided decoding of sampled blocks
data = construct(params, channel, rate=0.25, train_trials=200, seed=1)
rule = ShapingRule.from_data_phases(params.length, data)
print("data phases:", data[:12], "...")

# each trial draws its own generator, so both list sizes see the same noise
trials = 100
errors = {1: 0, 4: 0}
for t in range(trials):
    for list_size in errors:
        message, decoded, _ = run_trial(params, channel, rule, list_size, trial_rng(1, t))
        errors[list_size] += bool(np.any(message != decoded))

for list_size, count in errors.items():
    print(f"list size {list_size}: frame error rate {count / trials:.2f}")
