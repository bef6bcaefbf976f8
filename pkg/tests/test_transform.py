from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ORACLE_STAGES, separable_dwt, symmetric_dwt
from wavelift.polyphase import MatrixKindParams, StepKind, build_matrix, identity
from wavelift.laurent import LaurentPoly1
from wavelift.schemes import TABLE_ORDER, build_scheme
from wavelift.transform import (
    BoundaryMode,
    OddDimensionError,
    QuadGrid,
    apply_step,
    apply_steps,
    forward,
    inverse,
    multi_level_forward,
    multi_level_inverse,
    polyphase_merge,
    polyphase_split,
    thread_count,
)
from wavelift.wavelets import WAVELET_NAMES, conv2d_filters, get_wavelet

P53 = LaurentPoly1({0: F(-1, 2), -1: F(-1, 2)})
TOL = {"cdf53": 1e-12, "dd137": 1e-12, "cdf97": 1e-9}


def rand(shape, seed=0):
    return np.random.default_rng(seed).random(shape)


def dyadic(shape, seed=0):
    return np.random.default_rng(seed).integers(0, 256, shape) / 256.0


# -- split / merge ------------------------------------------------------------


def test_split_of_two_by_two():
    q = polyphase_split([[1.0, 2.0], [3.0, 4.0]])
    assert [float(p[0, 0]) for p in q.planes] == [1.0, 2.0, 3.0, 4.0]


def test_split_of_ramp_matches_decimation():
    img = np.arange(16.0).reshape(4, 4)
    q = polyphase_split(img)
    np.testing.assert_array_equal(q.LL, [[0, 2], [8, 10]])
    np.testing.assert_array_equal(q.HL, [[1, 3], [9, 11]])
    np.testing.assert_array_equal(q.LH, [[4, 6], [12, 14]])
    np.testing.assert_array_equal(q.HH, [[5, 7], [13, 15]])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**31))
def test_merge_inverts_split(h, w, seed):
    img = rand((2 * h, 2 * w), seed)
    np.testing.assert_array_equal(polyphase_merge(polyphase_split(img)), img)


def test_odd_dimensions_rejected():
    with pytest.raises(OddDimensionError):
        polyphase_split(np.zeros((4, 5)))
    with pytest.raises(OddDimensionError):
        forward(np.zeros((3, 4)))
    with pytest.raises(ValueError):
        polyphase_split(np.zeros(8))


def test_quadgrid_validation():
    with pytest.raises(ValueError):
        QuadGrid(np.zeros((3, 2, 2)))
    with pytest.raises(ValueError):
        QuadGrid.from_planes(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)))


# -- single steps ---------------------------------------------------------------


def test_identity_step_leaves_grid_unchanged():
    q = polyphase_split(rand((8, 8)))
    np.testing.assert_array_equal(apply_step(q, identity()).planes, q.planes)


def test_predict_annihilates_constants():
    q = polyphase_split(np.full((8, 8), 3.0))
    out = apply_step(q, build_matrix(StepKind.T_H, MatrixKindParams(P53, None)))
    assert np.all(out.HL == 0) and np.all(out.HH == 0)
    assert np.all(out.LL == 3.0) and np.all(out.LH == 3.0)


def test_monolithic_predict_on_impulse():
    planes = np.zeros((4, 8, 8))
    planes[0, 0, 0] = 1.0
    out = apply_step(QuadGrid(planes), build_matrix(StepKind.T_MONO, MatrixKindParams(P53, None)))
    hh = np.zeros((8, 8))
    hh[[0, 0, 7, 7], [0, 7, 0, 7]] = 0.25  # exponent -1 lands one cell back, wrapped
    np.testing.assert_array_equal(out.HH, hh)
    hl = np.zeros((8, 8))
    hl[0, [0, 7]] = -0.5
    np.testing.assert_array_equal(out.HL, hl)
    np.testing.assert_array_equal(out.LH, hl.T)


def test_symmetric_step_by_step_equals_single_pass():
    img = rand((16, 12), 3)
    scheme = build_scheme("iwahashi", "dd137")
    q = polyphase_split(img)
    for step in scheme.steps:
        q = apply_step(q, step, BoundaryMode.SYMMETRIC)
    ref = forward(img, scheme, boundary="symmetric")
    assert q.max_abs_difference(ref) < 1e-13


# -- forward against the loop oracle --------------------------------------------------


@pytest.mark.parametrize("wavelet", WAVELET_NAMES)
@pytest.mark.parametrize("shape", [(8, 8), (12, 16)])
def test_forward_matches_separable_oracle(wavelet, shape):
    img = rand(shape, 7)
    ref = separable_dwt(img, ORACLE_STAGES[wavelet])
    for kind in TABLE_ORDER:
        got = forward(img, kind, wavelet)
        np.testing.assert_allclose(got.planes, ref, atol=1e-12, err_msg=kind.value)


@pytest.mark.parametrize("wavelet", WAVELET_NAMES)
@pytest.mark.parametrize("shape", [(8, 8), (10, 14)])
def test_symmetric_forward_matches_mirrored_oracle(wavelet, shape):
    img = rand(shape, 11)
    ref = symmetric_dwt(img, ORACLE_STAGES[wavelet])
    for kind in TABLE_ORDER:
        got = forward(img, kind, wavelet, "symmetric")
        np.testing.assert_allclose(got.planes, ref, atol=1e-12, err_msg=kind.value)


@pytest.mark.parametrize("wavelet", ["cdf53", "dd137"])
@pytest.mark.parametrize("boundary", ["periodic", "symmetric"])
def test_dyadic_inputs_give_bit_identical_schemes(wavelet, boundary):
    img = dyadic((32, 32), 5)
    ref = forward(img, "sweldens", wavelet, boundary)
    for kind in TABLE_ORDER:
        assert np.array_equal(forward(img, kind, wavelet, boundary).planes, ref.planes), kind.value


@pytest.mark.parametrize("wavelet", WAVELET_NAMES)
def test_cross_scheme_agreement_random(wavelet):
    img = rand((32, 32), 2)
    for boundary in ("periodic", "symmetric"):
        ref = forward(img, "sweldens", wavelet, boundary)
        for kind in TABLE_ORDER:
            assert forward(img, kind, wavelet, boundary).max_abs_difference(ref) <= TOL[wavelet]


def test_constant_image():
    q = forward(np.full((16, 16), 0.75), "monolithic", "cdf53")
    assert np.all(q.LL == 0.75)
    assert np.all(q.planes[1:] == 0)


def test_convolution_impulse_response_is_filter():
    img = np.zeros((16, 16))
    img[0, 0] = 1.0
    q = forward(img, "convolution", "cdf53")
    f_ll = conv2d_filters(get_wavelet("cdf53"))[0]
    expected = np.zeros((8, 8))
    for (em, en), c in f_ll.items():
        if em % 2 == 0 and en % 2 == 0:
            expected[(en // 2) % 8, (em // 2) % 8] += float(c)
    np.testing.assert_array_equal(q.LL, expected)


def test_every_impulse_matches_convolution():
    worst = 0.0
    for r in range(16):
        for c in range(16):
            img = np.zeros((16, 16))
            img[r, c] = 1.0
            a = forward(img, "sweldens", "cdf53")
            b = forward(img, "convolution", "cdf53")
            worst = max(worst, a.max_abs_difference(b))
    assert worst <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.floats(-3, 3), st.floats(-3, 3), st.sampled_from(WAVELET_NAMES))
def test_linearity(seed, a, b, wavelet):
    x, y = rand((32, 32), seed), rand((32, 32), seed + 1)
    lhs = forward(a * x + b * y, "explosive", wavelet).planes
    rhs = a * forward(x, "explosive", wavelet).planes + b * forward(y, "explosive", wavelet).planes
    scale = max(1.0, float(np.max(np.abs(rhs))))
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * scale


def test_scaling_multiplies_ll_and_hh():
    img = rand((16, 16), 4)
    plain = forward(img, "sweldens", "cdf97")
    scaled = forward(img, "sweldens", "cdf97", apply_scaling=True)
    z = get_wavelet("cdf97").zeta
    np.testing.assert_allclose(scaled.LL, plain.LL * z**2, rtol=1e-15)
    np.testing.assert_array_equal(scaled.HL, plain.HL)
    np.testing.assert_array_equal(scaled.LH, plain.LH)
    np.testing.assert_allclose(scaled.HH, plain.HH / z**2, rtol=1e-15)


# -- inverse -------------------------------------------------------------------------


def test_zero_grid_inverts_to_zero():
    assert np.all(inverse(QuadGrid(np.zeros((4, 4, 4))), "cdf97") == 0)


@pytest.mark.parametrize("wavelet", WAVELET_NAMES)
@pytest.mark.parametrize("boundary", ["periodic", "symmetric"])
@pytest.mark.parametrize("shape", [(8, 8), (16, 16), (64, 32)])
def test_perfect_reconstruction(wavelet, boundary, shape):
    img = rand(shape, 9)
    for kind in ("sweldens", "polyphase_star", "convolution"):
        for scaling in (False, True):
            q = forward(img, kind, wavelet, boundary, scaling)
            assert np.max(np.abs(inverse(q, wavelet, boundary, scaling) - img)) <= 1e-9


def test_inverse_of_equal_grids_is_equal():
    img = dyadic((16, 16), 1)
    a = inverse(forward(img, "monolithic", "cdf53"), "cdf53")
    b = inverse(forward(img, "sweldens", "cdf53"), "cdf53")
    assert np.array_equal(a, b)
    assert np.array_equal(a, img)


# -- pyramids ------------------------------------------------------------------------


def test_single_level_pyramid_equals_forward():
    img = rand((16, 16), 6)
    pyr = multi_level_forward(img, 1, "monolithic", "dd137")
    q = forward(img, "monolithic", "dd137")
    np.testing.assert_array_equal(pyr.approx, q.LL)
    np.testing.assert_array_equal(pyr.details[0][2], q.HH)


def test_pyramid_shapes():
    pyr = multi_level_forward(rand((8, 8)), 2)
    assert pyr.levels == 2
    assert pyr.details[0][0].shape == (4, 4)
    assert pyr.details[1][0].shape == (2, 2) and pyr.approx.shape == (2, 2)


@pytest.mark.parametrize("wavelet", WAVELET_NAMES)
@pytest.mark.parametrize("boundary", ["periodic", "symmetric"])
def test_pyramid_round_trip(wavelet, boundary):
    img = rand((64, 32), 8)
    for levels in (1, 2, 3):
        pyr = multi_level_forward(img, levels, "explosive_star", wavelet, boundary, True)
        assert np.max(np.abs(multi_level_inverse(pyr, wavelet, boundary, True) - img)) <= 1e-9


def test_pyramid_divisibility():
    with pytest.raises(OddDimensionError):
        multi_level_forward(rand((12, 12)), 3)
    with pytest.raises(ValueError):
        multi_level_forward(rand((8, 8)), 0)


# -- threading -----------------------------------------------------------------------


def test_thread_count_is_deterministic(monkeypatch):
    img = rand((512, 512), 12)
    scheme = build_scheme("polyphase", "cdf97")
    monkeypatch.setenv("WAVELIFT_THREADS", "1")
    serial = forward(img, scheme)
    monkeypatch.setenv("WAVELIFT_THREADS", "4")
    threaded = forward(img, scheme)
    assert np.array_equal(serial.planes, threaded.planes)


def test_thread_count_parsing(monkeypatch):
    monkeypatch.setenv("WAVELIFT_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("WAVELIFT_THREADS", "0")
    assert thread_count() >= 1
    monkeypatch.setenv("WAVELIFT_THREADS", "many")
    with pytest.raises(ValueError):
        thread_count()


def test_apply_steps_runs_a_whole_scheme():
    img = rand((16, 16), 13)
    scheme = build_scheme("sweldens", "cdf53")
    q = apply_steps(polyphase_split(img), scheme.steps, workers=1)
    assert q.max_abs_difference(forward(img, scheme)) == 0.0


def test_boundary_parsing():
    assert BoundaryMode.parse("Symmetric") is BoundaryMode.SYMMETRIC
    with pytest.raises(ValueError):
        BoundaryMode.parse("zero")
