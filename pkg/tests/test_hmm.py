import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slowpolar.hmm import (BranchEngine, Datum, HmmProcess, gilbert_elliott, init_branch,
                           joint_prob, memoryless_bsc, normalized, sample, sample_channel,
                           stationary_distribution)
from slowpolar.oracle import state_path_joint


def test_bsc_kernel_entries():
    assert memoryless_bsc(0.1).kernel[0, 1, 0, 0] == pytest.approx(0.05)
    assert np.allclose(memoryless_bsc(0.5).kernel, 0.25)


def test_ge_without_bad_state_is_bsc():
    ge = gilbert_elliott(0, 0, 0.1, 0.4, pi=[1, 0])
    x = [0, 1, 1, 0]
    for y in itertools.product((0, 1), repeat=4):
        assert joint_prob(ge, x, y) == pytest.approx(joint_prob(memoryless_bsc(0.1), x, y))


def test_validation():
    with pytest.raises(ValueError):
        memoryless_bsc(1.5)
    with pytest.raises(ValueError):
        HmmProcess(np.full((1, 2, 2, 1), 0.3), [1.0])
    with pytest.raises(ValueError):
        HmmProcess(np.full((1, 2, 2, 1), 0.25), [0.5, 0.5])


def test_json_roundtrip(tmp_path, ge):
    path = tmp_path / "ge.json"
    import json
    path.write_text(json.dumps(ge.to_json()))
    back = HmmProcess.load(path)
    assert np.allclose(back.kernel, ge.kernel) and np.allclose(back.pi, ge.pi)


def test_stationary():
    chain = np.array([[0.9, 0.1], [0.3, 0.7]])
    pi = stationary_distribution(chain)
    assert np.allclose(pi @ chain, pi) and pi.sum() == pytest.approx(1)


def test_joint_prob_examples(ge):
    assert joint_prob(memoryless_bsc(0.1), [0, 0], [0, 0]) == pytest.approx(0.2025)
    total = sum(joint_prob(ge, x) for x in itertools.product((0, 1), repeat=5))
    assert total == pytest.approx(1.0)
    x, y = [1, 0, 1], [1, 1, 1]
    assert joint_prob(ge, x, y) == pytest.approx(state_path_joint(ge, x, y).sum(), rel=1e-12)


def test_sample_edge_cases(rng):
    x, y, _ = sample(memoryless_bsc(0.0), 50, rng)
    assert np.array_equal(x, y)
    one_state = HmmProcess(np.full((1, 2, 2, 1), 0.25), [1.0])
    assert sample(one_state, 3, rng)[2].tolist() == [0, 0, 0]
    sticky = gilbert_elliott(0.0, 0.0, 0.1, 0.4, pi=[1, 0])
    assert not sample(sticky, 40, rng)[2].any()
    y, states = sample_channel(sticky, np.zeros(40, dtype=np.uint8), rng)
    assert not states.any() and len(y) == 40


def test_sample_frequencies():
    rng = np.random.default_rng(3)
    x, y, _ = sample(memoryless_bsc(0.2), 20000, rng)
    assert abs(np.mean(x != y) - 0.2) < 0.015
    assert abs(np.mean(x) - 0.5) < 0.015


def test_backward_noiseless_and_absent():
    noiseless = memoryless_bsc(0.0)
    eng = BranchEngine(noiseless, [0, 1, 1, 0])
    # inputs are marginalized, so each later symbol contributes P(y) = 1/2
    assert np.allclose(eng.backward[:, 0, 0], [0.5 ** (3 - phi) for phi in range(4)])
    # absent observations: backward messages are chain powers
    ge = gilbert_elliott(0.1, 0.3, 0.02, 0.3)
    eng = BranchEngine(ge, None, 4)
    chain = ge.state_chain()
    for phi in range(4):
        assert np.allclose(eng.backward[phi], np.linalg.matrix_power(chain, 3 - phi))


def brute_datum(process, y, prefix, phase):
    """Entry-conditional P(x_phase=u, prefix, y, S_last=s' | S_entry=s) by enumeration."""
    k = process.num_states
    out = np.zeros((2, k, k))
    rest = len(y) - phase - 1
    for u in (0, 1):
        for tail in itertools.product((0, 1), repeat=rest):
            x = list(prefix) + [u] + list(tail)
            for s in range(k):
                pi = np.eye(k)[s]
                out[u, s] += state_path_joint(process, x, y, pi)[s]
    return out


def test_base_datum_vs_enumeration(ge, rng):
    y = [0, 1, 1, 0]
    x = rng.integers(0, 2, 4)
    eng = init_branch(ge, y, range(0, 4))
    for phi in range(4):
        d = eng.update_base_probs(phi, None if phi == 0 else int(x[phi - 1]))
        exact = brute_datum(ge, y, x[:phi], phi)
        got = d.table * np.exp(d.log_scale)
        assert np.max(np.abs(got - exact)) <= 1e-12 * np.max(exact)


def test_base_datum_bsc_ratio():
    eng = BranchEngine(memoryless_bsc(0.1), [0, 0, 0, 0])
    d = eng.update_base_probs(0)
    assert d.table[0, 0, 0] / d.table[1, 0, 0] == pytest.approx(9.0)
    sym = BranchEngine(memoryless_bsc(0.1), None, 4).update_base_probs(0)
    assert np.allclose(sym.table[0], sym.table[1])


def test_engine_enforces_order(bsc):
    eng = BranchEngine(bsc, [0, 1, 0, 1])
    eng.update_base_probs(0)
    with pytest.raises(RuntimeError):
        eng.update_base_probs(2, 0)
    with pytest.raises(RuntimeError):
        eng.update_base_probs(1)


def test_normalized_zero_table():
    d = normalized(np.zeros((2, 1, 1)), 0.0)
    assert d.log_scale == -np.inf
    assert isinstance(d, Datum)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 0.5), st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.5))
def test_ge_kernel_is_stochastic(g2b, b2g, pg, pb):
    ge = gilbert_elliott(g2b, max(b2g, 1e-3), pg, pb)
    assert np.allclose(ge.kernel.sum(axis=(1, 2, 3)), 1)
    # inputs are uniform in every state
    assert np.allclose(ge.kernel.sum(axis=(2, 3)), 0.5)
