from fractions import Fraction as F

import pytest

from oracles import CDF53, impulse_filters_1d, tap_product
from wavelift.laurent import HORIZONTAL, VERTICAL, LaurentPoly1, LaurentPoly2, orient
from wavelift.polyphase import (
    HH,
    HL,
    LH,
    LL,
    MatrixKindParams,
    MissingOperatorError,
    StepKind,
    build_1d_polyphase,
    build_matrix,
    compose,
    conv2d_polyphase,
    identity,
    interleave_phases,
    lifting_product_1d,
    matmul,
    verify_scheme_identity,
)
from wavelift.wavelets import analysis_filters, conv2d_filters, get_wavelet

P53 = LaurentPoly1({0: F(-1, 2), -1: F(-1, 2)})
U53 = LaurentPoly1({0: F(1, 4), 1: F(1, 4)})


def mk(kind, p=P53, u=U53):
    return build_matrix(kind, MatrixKindParams(p, u))


def test_predict_step_structure():
    m = mk(StepKind.T_H)
    assert m[HL, LL] == orient(P53, HORIZONTAL)
    assert m[HH, LH] == orient(P53, HORIZONTAL)
    assert m.written_components() == {HL, HH}
    assert m.nonlocal_reads() == {LL: {(-1, 0)}, LH: {(-1, 0)}}


def test_vertical_update_uses_transposed_operator():
    m = mk(StepKind.S_V)
    assert m[LL, LH] == orient(U53, VERTICAL)
    assert m[HL, HH] == orient(U53, VERTICAL)
    assert m.written_components() == {LL, HL}


def test_monolithic_predict_impulse_pattern():
    # the LL -> HH entry is P(z_m) P(z_n): four taps of 1/4 for cdf53
    hh_from_ll = mk(StepKind.T_MONO)[HH, LL]
    expected = tap_product({(0, 0): F(-1, 2), (-1, 0): F(-1, 2)}, {(0, 0): F(-1, 2), (0, -1): F(-1, 2)})
    assert hh_from_ll.terms == expected
    assert expected == {(0, 0): F(1, 4), (-1, 0): F(1, 4), (0, -1): F(1, 4), (-1, -1): F(1, 4)}


def test_missing_operator_is_reported():
    with pytest.raises(MissingOperatorError):
        build_matrix(StepKind.T_H, MatrixKindParams(None, U53))
    with pytest.raises(MissingOperatorError):
        build_matrix(StepKind.N_FULL, MatrixKindParams(P53, None))
    with pytest.raises(ValueError):
        build_matrix(StepKind.PRODUCT, MatrixKindParams(P53, U53))


def test_identity_is_neutral():
    m = mk(StepKind.N_FULL)
    assert matmul(identity(), m).entries == m.entries
    assert matmul(m, identity()).entries == m.entries
    assert identity().is_identity()
    assert not m.is_identity()


def test_compose_puts_first_step_rightmost():
    a, b = mk(StepKind.T_H), mk(StepKind.S_H)
    assert compose([a, b]).entries == matmul(b, a).entries
    assert compose([a, b]).entries != compose([b, a]).entries


def test_separable_steps_compose_to_reference():
    steps = [mk(k) for k in (StepKind.T_H, StepKind.T_V, StepKind.S_H, StepKind.S_V)]
    rep = verify_scheme_identity(steps, mk(StepKind.N_FULL))
    assert rep.passed and rep.exact and rep.first_mismatch is None


def test_wrong_order_is_detected():
    steps = [mk(k) for k in (StepKind.S_H, StepKind.S_V, StepKind.T_H, StepKind.T_V)]
    rep = verify_scheme_identity(steps, mk(StepKind.N_FULL))
    assert not rep.passed
    assert rep.first_mismatch is not None
    assert rep.max_deviation > 0


def test_float_comparison_uses_tolerance():
    steps = [mk(StepKind.T_MONO), mk(StepKind.S_MONO)]
    rep = verify_scheme_identity([s.to_float() for s in steps], mk(StepKind.N_FULL).to_float())
    assert rep.passed and not rep.exact
    assert rep.to_dict()["passed"] is True


def test_fused_steps_equal_their_separable_factors():
    th, tv, sh, sv = (mk(k) for k in (StepKind.T_H, StepKind.T_V, StepKind.S_H, StepKind.S_V))
    assert compose([th, tv]).entries == mk(StepKind.T_MONO).entries
    assert compose([sh, sv]).entries == mk(StepKind.S_MONO).entries


def test_one_dimensional_round_trip_of_phases():
    g0, g1 = analysis_filters(get_wavelet("dd137"))
    assert interleave_phases(build_1d_polyphase(g0, g1)) == (g0, g1)


def test_lifting_product_has_unit_determinant():
    for name in ("cdf53", "dd137"):
        assert lifting_product_1d(get_wavelet(name)).determinant() == LaurentPoly1.one()


def test_analysis_filters_match_impulse_responses():
    g0, g1 = impulse_filters_1d(CDF53)
    ours0, ours1 = analysis_filters(get_wavelet("cdf53"))
    assert {k: float(v) for k, v in ours0.terms.items()} == g0
    assert {k: float(v) for k, v in ours1.terms.items()} == g1


def test_convolution_polyphase_equals_reference_matrix():
    spec = get_wavelet("cdf53")
    conv = conv2d_polyphase(conv2d_filters(spec))
    assert conv.entries == mk(StepKind.N_FULL).entries


def test_float_and_exact_matrices_do_not_mix():
    with pytest.raises(TypeError):
        matmul(mk(StepKind.T_H), mk(StepKind.T_V).to_float())


def test_render_names_components():
    text = mk(StepKind.T_H).render()
    assert text.splitlines()[1].startswith("HL <- LL:")


def test_two_variable_entries():
    m = mk(StepKind.N_FULL)
    assert all(isinstance(e, LaurentPoly2) for row in m.entries for e in row)
    assert m.max_shift() == 1  # V = PU + 1 spans exponents -1..1 for cdf53
