from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from framekit.constructions import orthogonal_sum_frame, structured_frame, tight_frame, with_order
from framekit.core import DimProfile, FusionFrame, ffp, ffp_lower_bound, random_unitary
from framekit.errors import DimensionDeficit, NotInClassE, NotSorted, StructureMismatch
from framekit.irregularity import (
    check_IJ_prediction,
    decompose,
    fundamental_inequality,
    irregularity,
    minimum_value,
    predicted_IJ,
)

I2 = np.eye(2)


def frame_411():
    return FusionFrame.from_bases([I2[:, [0]], I2[:, [1]], I2[:, [1]]], [2.0, 1.0, 1.0])


def scan(d, L, c):
    """Independent oracle: evaluate the predicate from scratch at every j."""
    return [(d - sum(L[: j + 1])) * c[j] <= sum(Lk * ck for Lk, ck in zip(L[j + 1 :], c[j + 1 :])) for j in range(len(c))]


def min_value_oracle(d, L, c):
    """Exact minimum from the first j where the predicate holds (Fractions)."""
    N0 = scan(d, L, c).index(True) + 1
    head = sum(L[: N0 - 1])
    pre = sum(Fraction(ck) ** 2 * Lk for ck, Lk in zip(c[: N0 - 1], L[: N0 - 1]))
    suf = sum(Fraction(ck) * Lk for ck, Lk in zip(c[N0 - 1 :], L[N0 - 1 :]))
    return N0, pre + suf * suf / (d - head)


@st.composite
def instances(draw, integer=True):
    K = draw(st.integers(1, 8))
    L = [draw(st.integers(1, 6)) for _ in range(K)]
    d = draw(st.integers(1, sum(L)))
    if integer:
        c = sorted((draw(st.integers(1, 50)) for _ in range(K)), reverse=True)
    else:
        c = sorted((draw(st.floats(0.01, 100.0)) for _ in range(K)), reverse=True)
    return d, L, c


# --- irregularity ----------------------------------------------------------


@pytest.mark.parametrize("L", [(1, 1, 1), (2, 2), (3,), (1, 2, 3, 1)])
def test_equal_weights_are_regular(L):
    for d in range(1, sum(L) + 1):
        assert irregularity(d, L, [2.5] * len(L)).N0 == 1


def test_irregularity_411():
    res = irregularity(2, (1, 1, 1), (4.0, 1.0, 1.0))
    assert res.predicate_trace[:2] == (False, True)
    assert res.N0 == 2 and res.irregularity == 1


def test_irregularity_single_member():
    for d in range(1, 6):
        assert irregularity(d, (d,), (7.0,)).N0 == 1


def test_irregularity_errors():
    with pytest.raises(NotSorted):
        irregularity(2, (1, 1), (1.0, 2.0))
    with pytest.raises(DimensionDeficit):
        irregularity(4, (1, 2), (2.0, 1.0))


@given(instances())
def test_single_flip_exact(inst):
    d, L, c = inst
    res = irregularity(d, L, c)
    assert list(res.predicate_trace) == scan(d, L, c)
    N0 = res.N0
    assert not any(res.predicate_trace[: N0 - 1])
    assert all(res.predicate_trace[N0 - 1 :])


@given(instances(integer=False))
def test_single_flip_floats(inst):
    d, L, c = inst
    res = irregularity(d, L, c)
    tail = lambda j: sum(Lk * ck for Lk, ck in zip(L[j + 1 :], c[j + 1 :]))
    for j, holds in enumerate(res.predicate_trace):
        lhs = (d - sum(L[: j + 1])) * c[j]
        if j < res.N0 - 1:
            assert lhs > tail(j) - 1e-12 * max(1.0, abs(lhs))
        else:
            assert lhs <= tail(j) + 1e-12 * max(1.0, abs(lhs))


def test_irregularity_with_fractions():
    c = [Fraction(7, 3), Fraction(1, 2), Fraction(1, 2)]
    assert irregularity(2, (1, 1, 1), c).N0 == scan(2, (1, 1, 1), c).index(True) + 1


# --- fundamental inequality ------------------------------------------------


def test_fundamental_inequality_examples():
    assert fundamental_inequality(DimProfile(3, (2, 2), (1.0, 1.0)))
    assert not fundamental_inequality(DimProfile(2, (1, 1, 1), (4.0, 1.0, 1.0)))
    assert fundamental_inequality(DimProfile(4, (4,), (3.0,)))


def test_fundamental_inequality_tie_is_exact():
    # 8c equals c + 3c + 2c + c + c exactly, but not in float summation
    c = 1.264627982503028
    p = DimProfile(8, (1, 3, 2, 1, 1), (c,) * 5)
    assert fundamental_inequality(p)
    assert minimum_value(p) == ffp_lower_bound(p)


@given(st.lists(st.floats(0.01, 10.0), min_size=1, max_size=6), st.data())
def test_fundamental_inequality_iff_regular_floats(w2, data):
    dims = [data.draw(st.integers(1, 4)) for _ in w2]
    d = data.draw(st.integers(1, sum(dims)))
    p = DimProfile(d, tuple(dims), tuple(w2))
    from framekit.irregularity import profile_N0

    assert fundamental_inequality(p) == (profile_N0(p)[0] == 1)


@given(instances())
def test_fundamental_inequality_iff_regular(inst):
    d, L, c = inst
    p = DimProfile(d, tuple(L), tuple(float(x) for x in c))
    assert fundamental_inequality(p) == (irregularity(d, L, c).N0 == 1)


# --- minimum value ---------------------------------------------------------


def test_minimum_value_411():
    assert minimum_value(DimProfile(2, (1, 1, 1), (4.0, 1.0, 1.0))) == 20.0
    assert ffp(frame_411()) == 20.0


def test_minimum_value_regular_profile():
    assert minimum_value(DimProfile(2, (1, 1, 1), (1.0, 1.0, 1.0))) == pytest.approx(4.5, abs=1e-15)


@pytest.mark.parametrize("dims", [(1, 1), (2, 1, 3), (4,), (1, 1, 1, 1, 1)])
def test_minimum_value_orthogonal_sum(dims):
    d = sum(dims)
    assert minimum_value(DimProfile(d, dims, (1.0,) * len(dims))) == pytest.approx(d, rel=1e-15)
    w2 = tuple(float(x) for x in range(len(dims), 0, -1))
    expected = sum(c * c * L for c, L in zip(w2, dims))
    assert minimum_value(DimProfile(d, dims, w2)) == pytest.approx(expected, rel=1e-14)


def test_minimum_value_sorts_internally():
    a = minimum_value(DimProfile(2, (1, 1, 1), (1.0, 4.0, 1.0)))
    assert a == 20.0


def test_minimum_value_dimension_deficit():
    with pytest.raises(DimensionDeficit):
        minimum_value(DimProfile(5, (1, 2), (1.0, 1.0)))


@given(instances())
def test_minimum_value_against_exact_oracle(inst):
    d, L, c = inst
    p = DimProfile(d, tuple(L), tuple(float(x) for x in c))
    N0, exact = min_value_oracle(d, L, c)
    value = minimum_value(p)
    assert value == pytest.approx(float(exact), rel=1e-12)
    bound = ffp_lower_bound(p)
    if N0 == 1:
        assert value == bound
    else:
        assert value > bound + 1e-10 * bound


@given(st.integers(0, 2**32 - 1), st.sampled_from(["real", "complex"]))
def test_structured_frames_attain_minimum_value(seed, field):
    sf = structured_frame(np.random.default_rng(seed), field=field)
    assert ffp(sf.frame) == pytest.approx(minimum_value(sf.frame.profile), rel=1e-9)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["real", "complex"]))
def test_tight_frames_satisfy_fundamental_inequality(seed, field):
    F = tight_frame(np.random.default_rng(seed), field=field).frame
    assert fundamental_inequality(F.profile)


# --- I_J prediction and decomposition --------------------------------------


def test_IJ_prediction_tight_frame(rng):
    F = tight_frame(rng, d=4).frame
    assert predicted_IJ(F) == list(range(F.K))
    assert check_IJ_prediction(F)


def test_IJ_prediction_411():
    assert predicted_IJ(frame_411()) == [1, 2]
    assert check_IJ_prediction(frame_411())


def test_IJ_prediction_orthogonal_sum_decreasing_weights():
    F = orthogonal_sum_frame(4, (1, 2, 1), (3.0, 2.0, 1.0))
    # I_J is the lightest member alone; the irregularity scan says the same
    assert predicted_IJ(F) == [2]
    assert check_IJ_prediction(F)


def test_IJ_prediction_requires_class_membership():
    I3 = np.eye(3)
    F = FusionFrame.from_bases([I3[:, :2], I3[:, [0, 2]]], [1.0, 1.0])
    with pytest.raises(NotInClassE):
        check_IJ_prediction(F)


def test_decompose_tight_frame(rng):
    F = tight_frame(rng, d=3).frame
    dc = decompose(F)
    assert dc.N0 == 1 and dc.prefix == ()
    assert sorted(dc.suffix) == list(range(F.K))
    assert dc.complement_residual <= 1e-9


def test_decompose_411():
    dc = decompose(frame_411())
    assert dc.prefix == (0,) and dc.suffix == (1, 2)
    assert dc.alpha == pytest.approx(2.0, abs=1e-15)
    assert dc.complement_residual <= 1e-15


def test_decompose_is_rotation_invariant(rng):
    F = frame_411()
    for field in ("real", "complex"):
        U = random_unitary(2, rng, field)
        a, b = decompose(F), decompose(F.transformed(U))
        assert (a.N0, a.prefix, a.suffix) == (b.N0, b.prefix, b.suffix)
        assert b.alpha == pytest.approx(a.alpha, abs=1e-9)
        assert abs(b.complement_residual - a.complement_residual) <= 1e-9
        assert abs(b.prefix_orthogonality - a.prefix_orthogonality) <= 1e-9


def test_decompose_names_failing_clause():
    F = FusionFrame.from_bases([I2[:, [0]], I2[:, [0]], I2[:, [1]]], [1.0, 1.0, 1.0])
    with pytest.raises(StructureMismatch) as exc:
        decompose(F)
    assert exc.value.clause == "direct_sum"


@given(st.integers(0, 2**32 - 1))
def test_decompose_structured_frames_any_member_order(seed):
    rng = np.random.default_rng(seed)
    sf = structured_frame(rng)
    order = list(rng.permutation(sf.frame.K))
    shuffled = with_order(sf, order)
    dc = decompose(shuffled.frame)
    assert dc.N0 == sf.N0
    assert sorted(dc.prefix) == sorted(i for g in shuffled.prefix_groups for i in g)
    assert dc.alpha == pytest.approx(sf.alpha, rel=1e-9)
    assert check_IJ_prediction(shuffled.frame)
