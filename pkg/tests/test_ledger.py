from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sdverify.ledger import (
    ChainStepError,
    FGAbelianGroup,
    LineBundleOnCurve,
    SplitSurfaceBundleLedger,
    abelian_variety_model,
    brute_force_solutions,
    canonical_ab,
    cyclic_product,
    det,
    det_chain_prop1A,
    diagonal,
    matmul,
    root_locus,
    section_shape,
    smith,
    solve_in_group,
    symbol_group,
    torsion_count,
    torsion_count_variety,
)


def _check_smith(M):
    U, D, V = smith(M)
    assert matmul(matmul(U, M), V) == D
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    d = diagonal(D)
    for i in range(len(D)):
        for j in range(len(D[0])):
            if i != j:
                assert D[i][j] == 0
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert nz == oracles.invariant_factors(M)
    return d


def test_smith_examples():
    assert _check_smith([[2, 0], [0, 3]]) == [1, 6]
    assert _check_smith([[1, 0], [0, 1]]) == [1, 1]
    assert _check_smith([[1, 3], [0, -1]]) == [1, 1]
    assert _check_smith([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_smith_rectangular_and_zero():
    assert _check_smith([[0, 0, 0], [0, 0, 0]]) == [0, 0]
    assert _check_smith([[4, 6]]) == [2]
    assert _check_smith([[3], [6]]) == [3]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3).flatmap(lambda k: st.integers(1, 3).flatmap(
    lambda l: st.lists(st.lists(st.integers(-9, 9), min_size=l, max_size=l), min_size=k, max_size=k))))
def test_smith_property(M):
    _check_smith(M)


def test_group_invariants():
    G = FGAbelianGroup(2, [[2, 0], [0, 3]])
    assert G.invariants_str() == "Z/6"
    assert G.order() == 6
    H = FGAbelianGroup(3, [[2, 0, 0]])
    assert H.free_rank == 2 and H.order() is None
    assert symbol_group(["p", "q"]).invariants_str() == "Z x Z"


def test_element_normal_form_unique():
    G = FGAbelianGroup(2, [[2, 4], [0, 6]])
    a = G.element([1, 1])
    assert a == G.element([3, 5]) == G.element([1, 7])
    assert (a * G.order()).is_zero()
    assert len(set(G.elements())) == G.order() == 12


def test_solver_examples():
    G = symbol_group(["p"])
    z = G.zero()
    for a, r, b, d in [(1, 3, 0, 1), (2, 3, -1, 2)]:
        sol = solve_in_group([[a, r], [b, -d]], [z, z], G)
        assert sol.unique and all(x.is_zero() for x in sol.particular)
    T = cyclic_product([2, 2])
    sol = solve_in_group([[2, 0], [0, 2]], [T.zero(), T.zero()], T)
    assert sol.count == 16 == len(sol.enumerate())
    E2 = cyclic_product([2])
    assert solve_in_group([[2, 0], [0, 2]], [E2.zero(), E2.zero()], E2).count == 4


def test_solver_inconsistent():
    G = cyclic_product([4])
    sol = solve_in_group([[2]], [G.element([1])], G)
    assert not sol.consistent and sol.enumerate() == set()


def test_solver_infinite():
    G = symbol_group(["p"])
    sol = solve_in_group([[1, 1]], [G.zero()], G)
    assert sol.consistent and sol.count is None
    with pytest.raises(ValueError):
        sol.enumerate()


def test_solver_vs_library_brute_force():
    for mods in ([2, 4], [3, 3], [6], [2, 2, 2]):
        G = cyclic_product(mods)
        els = list(G.elements())
        for A in ([[2, 3], [1, -1]], [[1, 2], [0, -1]], [[0, 0]]):
            rhs = [els[5 % len(els)] for _ in A]
            assert solve_in_group(A, rhs, G).enumerate() == brute_force_solutions(A, rhs, G)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from([2, 3, 4, 6]), min_size=1, max_size=2),
       st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=1, max_size=2),
       st.data())
def test_solver_property(mods, A, data):
    els = oracles.group_elements(mods)
    rhs = [data.draw(st.sampled_from(els)) for _ in A]
    G = cyclic_product(mods)
    sol = solve_in_group(A, [G.element(list(c)) for c in rhs], G)
    got = {tuple(tuple(c % m for c, m in zip(x.coords(), mods)) for x in s) for s in sol.enumerate()}
    assert got == oracles.solutions(A, rhs, mods)


def test_torsion_counts():
    assert torsion_count_variety(1, 3) == 9
    assert torsion_count_variety(2, 2) == 16
    assert torsion_count_variety(1, 1) == 1
    for g in (1, 2):
        for r in (2, 3):
            assert torsion_count(abelian_variety_model(g, r * r), r) == oracles.torsion_count([r * r] * (2 * g), r)


def test_line_bundle_ledger_laws():
    G = symbol_group(["p", "q"])
    p, q = G.gen("p"), G.gen("q")
    L1, L2, L3 = LineBundleOnCurve.point(p, 2), LineBundleOnCurve.degree_zero(q), LineBundleOnCurve.origin(G, -3)
    one = LineBundleOnCurve.trivial(G)
    assert L1 * L2 == L2 * L1
    assert (L1 * L2) * L3 == L1 * (L2 * L3)
    assert L1 * one == L1
    assert L1.dual().dual() == L1
    assert (L1 * L1.dual()) == one
    assert L1.translate(q) == LineBundleOnCurve(2, p * 2 - q * 2)
    assert L1.pull_mult(3) == LineBundleOnCurve(18, p * 6)


def test_split_ledger_ns():
    G = symbol_group(["p"])
    N = SplitSurfaceBundleLedger.from_divisor(G, 2, 5)
    assert N.ns == (2, 5)
    tw = SplitSurfaceBundleLedger.twist(G.gen("p"), G.zero())
    assert (N * tw).ns == (2, 5)
    assert (N * tw).residual() == (G.gen("p"), G.zero())
    assert N.dual().dual() == N


def test_det_chain_instance():
    res = det_chain_prop1A(3, 1, 3, -1)
    assert (res.params["a"], res.params["b"], res.params["d_v"]) == (1, 0, 6)
    assert res.fixed_det.total.ns == (-1, -3)
    assert res.fixed_det_fm.total.ns == (-3, -1)
    assert res.solution.unique
    assert all(x.is_zero() for x in res.solution.particular)


def test_det_chain_general_ab():
    res = det_chain_prop1A(3, 2, 5, -1, a=2, b=-1)
    assert res.solution.unique and all(x.is_zero() for x in res.solution.particular)


def test_det_chain_with_zero_sum_points():
    G = symbol_group(["p", "mu"])
    p = G.gen("p")
    Z = [(p, p), (-p, -p)] + [(G.zero(), G.zero())] * 4
    res = det_chain_prop1A(3, 1, 3, -1, G=G, Z=Z, mu=G.zero())
    assert all(v.is_zero() for v in res.constraints.values())


def test_det_chain_rejects_bad_input():
    with pytest.raises(ValueError):
        det_chain_prop1A(3, 1, 3, -1, a=1, b=1)
    with pytest.raises(ValueError):
        det_chain_prop1A(3, 1, 3, -1, Z=[])


def test_chain_step_error_is_assertion():
    assert issubclass(ChainStepError, AssertionError)


def test_canonical_ab():
    for r in range(2, 9):
        for d in range(1, 9):
            if gcd(r, d) == 1:
                a, b = canonical_ab(r, d)
                assert a * d + b * r == 1 and 0 < a < r
    with pytest.raises(ValueError):
        canonical_ab(4, 2)
    with pytest.raises(ValueError):
        canonical_ab(1, 1)


def test_section_shapes():
    assert section_shape(3, 4).h0 == 12
    s = section_shape(0, 5)
    assert s.h0 == 5 and s.constraint == "z_1 + ... + z_b = o_B"
    s = section_shape(1, 4)
    assert s.h0 == 4 and s.shape.startswith("sigma") and s.constraint
    with pytest.raises(ValueError):
        section_shape(-1, 2)


def test_root_locus():
    G1 = abelian_variety_model(1, 9)
    assert root_locus(G1.element([3, 0]), 3).count == 9
    assert root_locus(G1.zero(), 3).count == torsion_count(G1, 3)
    G2 = abelian_variety_model(2, 4)
    assert root_locus(G2.zero(), 2).count == 16
