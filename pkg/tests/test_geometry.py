import pytest
from hypothesis import given, strategies as st

from slowpolar.geometry import (PhaseClass, SlowParams, bit_reverse, bit_reversed_cyclic_order,
                                branc_of, classify_phase, index_to_pb, layer_sizes, pb_to_index,
                                phase_classes)

params_st = st.builds(SlowParams, st.integers(0, 4), st.integers(1, 3).map(lambda k: 2 * k), st.integers(0, 4))


def test_sizes_small():
    p = SlowParams(1, 2, 1)
    assert p.n0 == 4 and p.length == 8
    assert layer_sizes(p, 0) == (1, 2, 4)
    assert layer_sizes(p, 1) == (3, 2, 8)


@pytest.mark.parametrize("bad", [(-1, 2, 1), (1, 3, 1), (1, 2, -1)])
def test_rejects_bad_params(bad):
    with pytest.raises(ValueError):
        SlowParams(*bad)


def test_classes_layer_one():
    p = SlowParams(1, 2, 1)
    got = [classify_phase(p, 1, phi) for phi in range(8)]
    assert got == ([PhaseClass.LATERAL_TOP] * 3 + [PhaseClass.MEDIAL_MINUS, PhaseClass.MEDIAL_PLUS]
                   + [PhaseClass.LATERAL_BOTTOM] * 3)


@given(params_st, st.data())
def test_sizes_partition_branch(params, data):
    lam = data.draw(st.integers(0, params.n))
    big_l, big_m, big_n = layer_sizes(params, lam)
    assert 2 * big_l + big_m == big_n == params.branch_length(lam)
    assert big_m % 2 == 0
    classes = phase_classes(params, lam)
    assert sum(c == PhaseClass.MEDIAL_MINUS for c in classes) == big_m // 2
    assert sum(c.is_lateral for c in classes) == 2 * big_l


@given(params_st, st.data())
def test_index_roundtrip(params, data):
    lam = data.draw(st.integers(0, params.n))
    i = data.draw(st.integers(0, params.length - 1))
    pb = index_to_pb(params, lam, i)
    assert pb_to_index(params, pb) == i
    assert branc_of(pb.branch) == pb.branch >> 1


@given(st.integers(0, 12), st.data())
def test_bit_reverse_involution(width, data):
    v = data.draw(st.integers(0, (1 << width) - 1))
    assert bit_reverse(bit_reverse(v, width), width) == v


def test_bit_reversed_order():
    assert list(bit_reversed_cyclic_order(8)) == [0, 4, 2, 6, 1, 5, 3, 7]
    assert list(bit_reversed_cyclic_order(1)) == [0]
