from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sdverify.exterior import (
    AlgebraElement,
    ContextMismatch,
    GeneratorSet,
    LinearPullback,
    basis,
    exp,
    fiber_integrate,
    homogeneous_part,
    integrate,
    merge_sign,
    pullback,
    pushforward_along,
)
from sdverify.varieties import ProductModel, elliptic, surface_model

X = surface_model()
CTX = X.ctx
g = X.g


def test_generator_set_rejects_duplicates():
    with pytest.raises(ValueError):
        GeneratorSet(["a", "b", "a"])


def test_adjacent_generators():
    assert g("b1") * g("b2") == AlgebraElement.monomial(CTX, ["b1", "b2"])
    assert (g("b1") * g("b2")).coeff(["b1", "b2"]) == 1


def test_swapped_generators_pick_up_sign():
    assert g("b2") * g("b1") == -(g("b1") * g("b2"))
    assert g("f1") * g("f1") == 0


def test_even_classes_commute():
    lhs = (g("b1") * g("b2")) * (g("f1") * g("f2"))
    assert lhs == X.orientation()
    assert lhs == (g("f1") * g("f2")) * (g("b1") * g("b2"))


def test_poincare_square_on_pair():
    EE = ProductModel.of(elliptic("B"), elliptic("B").primed())
    h = EE.g
    c1 = h("b1") * h("b2'") - h("b2") * h("b1'")
    assert c1 * c1 == AlgebraElement.monomial(EE.ctx, ["b1", "b2", "b1'", "b2'"], -2)


def test_context_mismatch():
    other = GeneratorSet(["u", "v"])
    with pytest.raises(ContextMismatch):
        g("b1") * AlgebraElement.gen(other, "u")
    with pytest.raises(ContextMismatch):
        g("b1") + AlgebraElement.gen(other, "u")


def test_invalid_monomial_rejected():
    with pytest.raises(ValueError):
        AlgebraElement(GeneratorSet(["u"]), {0b10: 1})


def test_no_zero_coefficients_stored():
    a = AlgebraElement(CTX, {0: 0, 1: Fraction(1, 2)})
    assert list(a.terms) == [1]
    assert (a - a).terms == {}


def test_homogeneous_part():
    sigma, omega = X.pt("F"), X.orientation()
    a = X.one() + sigma + omega * 3
    assert homogeneous_part(a, 2) == sigma
    assert homogeneous_part(a, 0) == X.one()
    assert sum((homogeneous_part(a, k) for k in range(5)), X.zero()) == a
    with pytest.raises(ValueError):
        homogeneous_part(a, 5)


def test_integrate_orientation_and_intersections():
    sigma, f = X.pt("F"), X.pt("B")
    assert integrate(X.orientation()) == 1
    assert integrate(sigma * f) == 1
    assert integrate(sigma * sigma) == 0
    assert integrate(f * f) == 0
    assert integrate(sigma) == 0


def test_exp_of_divisor():
    sigma, f = X.pt("F"), X.pt("B")
    D = sigma * 3 + f * 4
    assert exp(D) == X.one() + D + sigma * f * 12
    with pytest.raises(ValueError):
        exp(X.one())


def test_multiplication_by_n_on_point():
    E = ProductModel.of(elliptic("E"))
    for n in range(-3, 4):
        assert pullback(E.orientation(), [[n, 0], [0, n]], E.ctx) == E.orientation() * (n * n)


def test_pullback_is_multiplicative():
    M = [[1, 2, 0, 0], [0, 1, 0, 0], [0, 0, 3, 1], [0, 0, 1, 0]]
    a, b = g("b1") + g("f2"), g("b2") * g("f1") + 2
    assert pullback(a * b, M, CTX) == pullback(a, M, CTX) * pullback(b, M, CTX)


def test_pullback_dimension_mismatch():
    with pytest.raises(ValueError):
        LinearPullback([[1, 0]], CTX, CTX)
    with pytest.raises(ValueError):
        LinearPullback([[1, 0]] * 4, CTX, CTX)


def test_fiber_integrate_surface():
    sigma, f, omega = X.pt("F"), X.pt("B"), X.orientation()
    B = ProductModel.of(elliptic("B"))
    assert fiber_integrate(sigma, ["f1", "f2"]) == B.one()
    assert fiber_integrate(omega, ["f1", "f2"]) == B.orientation()
    assert fiber_integrate(f, ["f1", "f2"]) == B.zero()


def test_fiber_integrate_poincare():
    E = elliptic("E")
    EE = ProductModel.of(E, E.primed())
    chP = exp(EE.c1_poincare("E", "E'"))
    Ep = ProductModel.of(E.primed())
    assert fiber_integrate(chP, E.names) == -Ep.orientation()
    assert fiber_integrate(EE.pt("E") * chP, E.names) == Ep.one()


def test_fiber_integrate_unknown_generator():
    with pytest.raises(ValueError):
        fiber_integrate(X.one(), ["zz"])


def test_pushforward_identity():
    ident = LinearPullback([[int(i == j) for j in range(4)] for i in range(4)], CTX, CTX)
    a = g("b1") * g("f2") * 3 + 1
    assert pushforward_along(a, ident) == a


def test_pushforward_graph_of_multiplication():
    B = elliptic("B")
    BB = ProductModel.of(B, B.primed())
    src = ProductModel.of(B)
    for r in range(1, 5):
        # j(x) = (r x, x)
        j = LinearPullback([[r, 0], [0, r], [1, 0], [0, 1]], src.ctx, BB.ctx)
        cls = pushforward_along(src.one(), j)
        assert integrate(cls * BB.pt("B")) == r * r


def test_pushforward_of_origin():
    E = ProductModel.of(elliptic("E"))
    o = GeneratorSet([])
    inc = LinearPullback([[], []], o, E.ctx)
    assert pushforward_along(AlgebraElement.scalar(o, 1), inc) == E.orientation()


def test_merge_sign_matches_permutation_parity():
    for a in range(16):
        for b in range(16):
            if a & b:
                assert merge_sign(a, b) == 0
                continue
            seq = [i for i in range(4) if a >> i & 1] + [i for i in range(4) if b >> i & 1]
            assert merge_sign(a, b) == oracles.perm_sign(seq)


def test_basis_spans():
    assert len(basis(CTX)) == 16
    assert sum(basis(CTX), X.zero()).terms == {m: 1 for m in range(16)}


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.integers(0, 15), st.integers(-4, 4), max_size=5),
       st.dictionaries(st.integers(0, 15), st.integers(-4, 4), max_size=5))
def test_product_agrees_with_sorting_oracle(ta, tb):
    a, b = AlgebraElement(CTX, ta), AlgebraElement(CTX, tb)
    idx = lambda m: tuple(i for i in range(4) if m >> i & 1)  # noqa: E731
    got = {idx(m): c for m, c in (a * b).terms.items()}
    assert got == oracles.wedge({idx(m): c for m, c in a.terms.items()}, {idx(m): c for m, c in b.terms.items()})


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.integers(0, 15), st.integers(-4, 4), max_size=5))
def test_projection_formula_fiber(ta):
    a = AlgebraElement(CTX, ta)
    B = ProductModel.of(elliptic("B"))
    for b in basis(B.ctx):
        lifted = X.lift(b, B)
        assert fiber_integrate(a * lifted, ["f1", "f2"]) == fiber_integrate(a, ["f1", "f2"]) * b
