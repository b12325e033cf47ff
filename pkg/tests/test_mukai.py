import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sdverify.mukai import (
    InvariantViolation,
    MukaiVector,
    PolarizationRecord,
    Rejected,
    chi_L_equals_ell,
    d_v,
    fiber_restriction,
    kummer_dims,
    m_from_dv,
    mukai_pairing,
    ogrady_tower,
    orthogonal,
    orthogonal_partner_m,
    parse_divisor,
    parse_vector,
    product_chi,
    stability_range_advisory,
    verlinde_count,
    verlinde_data,
)
from sdverify.varieties import genus_surface

V = MukaiVector.of(3, 1, 3, -1)
ZERO = MukaiVector.of(1, 0, 0, 0)


def _t(v):
    a, b = v.sigma_f
    return (v.rank, a, b, v.chi)


def test_parse_and_text_round_trip():
    for text in ["3:(1σ+3f):-1", "1:(0σ+0f):0", "-2:(4σ-7f):5"]:
        v = parse_vector(text)
        assert v.to_text() == text
        assert parse_vector(v.to_text()) == v
    assert parse_vector("3:(σ+3f):-1") == V == parse_vector("3:(s+3f):-1")
    assert parse_vector("0:(0):1") == MukaiVector.of(0, 0, 0, 1)


@pytest.mark.parametrize("bad", ["", "3:(σ+3f)", "3:(σ+3q):-1", "a:(σ):1", "3:(σ++f):1"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_vector(bad)


def test_parse_divisor():
    assert parse_divisor("2σ-f") == (2, -1)
    assert parse_divisor("-f+3s") == (3, -1)
    assert parse_divisor("0") == (0, 0)


def test_json_round_trip():
    for v in (V, ZERO, MukaiVector.of(2, -3, 5, 7, genus_surface(3))):
        assert MukaiVector.from_json(v.to_json()) == v
        assert all(isinstance(x, str) for x in (v.to_json()["rank"], v.to_json()["chi"]))


def test_ch_and_chi_consistency():
    assert V.ch2 == -1
    assert MukaiVector.from_ch(V.ch()) == V
    s = genus_surface(3)
    w = MukaiVector.of(2, 1, 4, -3, s)
    assert w.ch2 == -3 + 2
    assert MukaiVector.from_ch(w.ch(), s) == w


def test_product_chi_examples():
    assert product_chi(V, V) == 0
    assert product_chi(ZERO, ZERO) == 0
    for r, m, chi, s, n, chi2 in [(2, 1, -1, 3, 4, 0), (1, -2, 2, 5, 3, -3)]:
        v, w = MukaiVector.of(r, 1, m, chi), MukaiVector.of(s, 1, n, chi2)
        assert product_chi(v, w) == r * chi2 + s * chi + m + n


def test_product_chi_rejects_mixed_surfaces():
    with pytest.raises(Rejected):
        product_chi(V, MukaiVector.of(1, 0, 0, 0, genus_surface(2)))


@settings(max_examples=200, deadline=None)
@given(*[st.integers(-6, 6)] * 8)
def test_pairings_match_lattice_oracle(r, a, b, chi, s, c, e, psi):
    v, w = MukaiVector.of(r, a, b, chi), MukaiVector.of(s, c, e, psi)
    assert product_chi(v, w) == oracles.euler_product(_t(v), _t(w)) == product_chi(w, v)
    assert mukai_pairing(v, w) == a * e + b * c - r * psi - s * chi
    assert d_v(v) == oracles.mukai_self_half(*_t(v))
    assert product_chi(v + w, w) == product_chi(v, w) + product_chi(w, w)


def test_d_v_values():
    assert d_v(V) == 6
    assert d_v(ZERO) == 0
    for r in range(1, 5):
        for m in range(-3, 4):
            for chi in range(-3, 3):
                v = MukaiVector.of(r, 1, m, chi)
                assert d_v(v) == m - r * chi
                assert m_from_dv(v) == m


def test_d_v_needs_abelian_surface():
    with pytest.raises(Rejected):
        d_v(MukaiVector.of(1, 1, 1, 1, genus_surface(2)))


def test_orthogonal_partner():
    for r, m, chi, s, chi2 in [(3, 3, -1, 3, -1), (2, 0, -2, 5, 1)]:
        n = orthogonal_partner_m(r, m, chi, s, chi2)
        assert orthogonal(MukaiVector.of(r, 1, m, chi), MukaiVector.of(s, 1, n, chi2))


def test_verlinde_instance():
    data = verlinde_data(V, V)
    assert data.c1_L == (6, 18)
    assert data.chi_L == 108 and data.dsum == 12
    assert verlinde_count(V, V) == 8316 == 9 * 924
    assert verlinde_count(V, V) == oracles.verlinde(_t(V), _t(V))


def test_verlinde_minus_instance():
    data = verlinde_data(V, V, "minus")
    assert data.c1_L == (6, 2)
    assert verlinde_count(V, V, "minus") == 924


def test_verlinde_rejections():
    with pytest.raises(Rejected):
        verlinde_count(V, ZERO)  # not orthogonal
    with pytest.raises(Rejected):
        verlinde_count(ZERO, ZERO)  # d_v + d_w = 0
    with pytest.raises(Rejected):
        verlinde_count(V, V, "sideways")


@pytest.mark.parametrize("r", range(2, 7))
def test_verlinde_per_point_is_torsion_count(r):
    for chi in (-1, -2):
        v = MukaiVector.of(r, 1, -r * chi, chi)
        assert verlinde_data(v, v).per_point == r * r == oracles.torsion_count([r * r] * 2, r)


def test_verlinde_symmetric_on_sweep():
    for r, s in [(2, 3), (3, 5), (4, 1)]:
        for chi, chi2 in [(-1, -2), (-3, 0)]:
            for m in range(0, 6):
                v = MukaiVector.of(r, 1, m, chi)
                w = MukaiVector.of(s, 1, orthogonal_partner_m(r, m, chi, s, chi2), chi2)
                if d_v(v) < 0 or d_v(w) < 0 or d_v(v) + d_v(w) == 0:
                    continue
                assert verlinde_count(v, w) == verlinde_count(w, v) == oracles.verlinde(_t(v), _t(w))


def test_chi_L_equals_ell():
    assert chi_L_equals_ell(V, V).status == "pass"
    for r in (3, 4, 5):
        for chi in (-1, -2, -3, -4):
            v = MukaiVector.of(r, 1, -r * chi, chi)
            assert chi_L_equals_ell(v, v).ok
    with pytest.raises(Rejected):
        chi_L_equals_ell(V, MukaiVector.of(2, 1, 5, -1))


def test_ogrady_tower():
    tower = ogrady_tower(-1, 6, 4)
    assert _t(tower[0]) == (1, 1, 5, -1)
    assert product_chi(tower[0], MukaiVector.of(1, 0, 1, 0)) == 0
    for k, v in enumerate(tower, 1):
        assert v.rank == k and v.d == 1 and d_v(v) == 6
        assert v.twist(0, 1).chi == 0
    with pytest.raises(Rejected):
        ogrady_tower(0, 0, 3)


def test_fiber_restriction():
    assert (fiber_restriction(3, False).rank, fiber_restriction(3, False).degree) == (3, 1)
    fr = fiber_restriction(3, True)
    assert fr.summands == ((2, 1), (1, 0)) and (fr.rank, fr.degree) == (3, 1)
    fr1 = fiber_restriction(1, True)
    assert fr1.summands == ((0, 1), (1, 0)) and fr1.degenerate


def test_kummer_dims():
    k = kummer_dims(V)
    assert (k.kummer_dim, k.moduli_dim, k.etale_degree) == (10, 14, 1296)
    assert kummer_dims(1).kummer_dim == 0
    assert kummer_dims(2).etale_degree == 16
    with pytest.raises(Rejected):
        kummer_dims(0)


def test_advisory_and_polarization():
    assert stability_range_advisory(MukaiVector.of(2, 1, 10, 0))
    assert not stability_range_advisory(MukaiVector.of(3, 1, 0, 0))
    p = PolarizationRecord()
    assert "N" in str(p)
    with pytest.raises(Rejected):
        p.value()


def test_invariant_violation_is_assertion():
    assert issubclass(InvariantViolation, AssertionError)
