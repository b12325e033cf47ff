"""Finitely generated abelian groups, curve line-bundle bookkeeping, and the
determinant-chain replays that pin down points on the base curve.

Points of B, F and Pic^0 are elements of finitely generated abelian groups.
Symbolic ("generic") points are free generators; torsion only appears through
explicit relations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, prod
from typing import Iterable, Sequence


# -- Smith normal form --------------------------------------------------------


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def smith(M: Sequence[Sequence[int]]):
    """Return (U, D, V) with U*M*V = D, D diagonal, d_i | d_{i+1}, d_i >= 0.

    U and V are unimodular.  Full pivoting on the smallest nonzero entry.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    if any(len(row) != n for row in A):
        raise ValueError("ragged matrix")
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row dst += k * row src
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in A:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
            rest = [(abs(A[i][t]), i, "r") for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), j, "c") for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, k, kind = min(rest)
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    D = A
    assert matmul(matmul(U, [list(r) for r in M]), V) == D if m and n else True
    return U, D, V


def diagonal(D) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def det(M) -> int:
    n = len(M)
    if n == 0:
        return 1
    U, D, V = smith(M)
    d = prod(diagonal(D)) if len(D[0]) == n else 0
    return d * _unimodular_det(U) * _unimodular_det(V)


def _unimodular_det(M) -> int:
    # Bareiss fraction-free elimination; exact for integer matrices.
    A = [list(r) for r in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def inverse_unimodular(M):
    """Exact inverse of a unimodular integer matrix (Gauss-Jordan over Z)."""
    n = len(M)
    A = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        p = next(i for i in range(c, n) if A[i][c] in (1, -1) or A[i][c])
        # reduce column c to a unit by Euclid on rows c..n-1
        while True:
            rows = [i for i in range(c, n) if A[i][c]]
            piv = min(rows, key=lambda i: abs(A[i][c]))
            A[c], A[piv] = A[piv], A[c]
            done = True
            for i in range(c + 1, n):
                if A[i][c]:
                    q = A[i][c] // A[c][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[c])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[c][c] not in (1, -1):
            raise ValueError("matrix is not unimodular")
        if A[c][c] == -1:
            A[c] = [-x for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                q = A[i][c]
                A[i] = [a - q * b for a, b in zip(A[i], A[c])]
        del p
    return [row[n:] for row in A]


# -- groups --------------------------------------------------------------------


class FGAbelianGroup:
    """Z^n modulo the row span of an integer relation matrix.

    Elements are kept in Smith coordinates: ``c = e * V`` with entry ``i``
    reduced modulo the i-th invariant factor (free coordinates left alone).
    """

    def __init__(self, names: Sequence[str] | int, relations: Sequence[Sequence[int]] = ()):
        if isinstance(names, int):
            names = [f"e{i}" for i in range(names)]
        self.names = tuple(names)
        n = len(self.names)
        self.relations = tuple(tuple(int(x) for x in r) for r in relations)
        if any(len(r) != n for r in self.relations):
            raise ValueError("relation rows must have one entry per generator")
        if self.relations and n:
            U, D, V = smith(self.relations)
            d = diagonal(D)
        else:
            V, d = _identity(n), []
        self.V = V
        self.V_inv = inverse_unimodular(V) if n else []
        self.moduli = tuple(list(d) + [0] * (n - len(d)))  # 0 means a free Z summand

    def __repr__(self):
        return f"FGAbelianGroup({self.invariants_str()})"

    def __eq__(self, other):
        return isinstance(other, FGAbelianGroup) and (self.names, self.relations) == (other.names, other.relations)

    def __hash__(self):
        return hash((self.names, self.relations))

    def invariants_str(self):
        parts = [f"Z/{e}" for e in self.moduli if e > 1] + ["Z" for e in self.moduli if e == 0]
        return " x ".join(parts) or "0"

    @property
    def free_rank(self) -> int:
        return sum(1 for e in self.moduli if e == 0)

    @property
    def torsion_invariants(self) -> list[int]:
        return [e for e in self.moduli if e > 1]

    def order(self) -> int | None:
        if self.free_rank:
            return None
        return prod(e for e in self.moduli if e)

    def _normal(self, c):
        return tuple(x % e if e else x for x, e in zip(c, self.moduli))

    def element(self, coords: Sequence[int] | dict) -> "GroupElement":
        if isinstance(coords, dict):
            vec = [0] * len(self.names)
            for k, v in coords.items():
                vec[self.names.index(k)] += int(v)
            coords = vec
        coords = list(coords)
        if len(coords) != len(self.names):
            raise ValueError("coordinate vector has the wrong length")
        c = [sum(coords[k] * self.V[k][j] for k in range(len(coords))) for j in range(len(coords))]
        return GroupElement(self, self._normal(c))

    def from_smith(self, c: Sequence[int]) -> "GroupElement":
        return GroupElement(self, self._normal(list(c)))

    def zero(self) -> "GroupElement":
        return GroupElement(self, tuple(0 for _ in self.names))

    def gen(self, name: str) -> "GroupElement":
        return self.element({name: 1})

    def elements(self) -> Iterable["GroupElement"]:
        if self.order() is None:
            raise ValueError("cannot enumerate an infinite group")
        ranges = [range(e) if e else range(1) for e in self.moduli]
        for c in itertools.product(*ranges):
            yield GroupElement(self, tuple(c))


@dataclass(frozen=True)
class GroupElement:
    parent: FGAbelianGroup
    c: tuple[int, ...]

    def _same(self, other):
        if not isinstance(other, GroupElement) or other.parent != self.parent:
            raise ValueError("elements of different groups")

    def __add__(self, other):
        self._same(other)
        return self.parent.from_smith([a + b for a, b in zip(self.c, other.c)])

    def __neg__(self):
        return self.parent.from_smith([-a for a in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        return self.parent.from_smith([int(k) * a for a in self.c])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.c)

    def coords(self) -> list[int]:
        """A representative in the original generators."""
        P = self.parent
        n = len(P.names)
        return [sum(self.c[k] * P.V_inv[k][j] for k in range(n)) for j in range(n)]

    def as_dict(self) -> dict[str, int]:
        return {n: x for n, x in zip(self.parent.names, self.coords()) if x}

    def __repr__(self):
        d = self.as_dict()
        if not d:
            return "0"
        return " + ".join(f"{v}*{k}" if v != 1 else k for k, v in d.items())


def symbol_group(names: Iterable[str]) -> FGAbelianGroup:
    """Free abelian group on named generic points."""
    return FGAbelianGroup(list(names))


def cyclic_product(moduli: Sequence[int]) -> FGAbelianGroup:
    n = len(moduli)
    rels = [[m if i == j else 0 for j in range(n)] for i, m in enumerate(moduli) if m]
    return FGAbelianGroup(n, rels)


def abelian_variety_model(g: int, N: int) -> FGAbelianGroup:
    """Finite stand-in for the N-torsion-rich part of a g-dimensional abelian variety: (Z/N)^{2g}."""
    return cyclic_product([N] * (2 * g))


# -- linear systems over a group ----------------------------------------------


@dataclass
class SolutionSet:
    consistent: bool
    particular: tuple[GroupElement, ...] | None = None
    kernel: list[tuple[GroupElement, ...]] = field(default_factory=list)
    kernel_orders: list[int] = field(default_factory=list)  # 0 = infinite order
    count: int | None = 0  # None = infinitely many

    @property
    def unique(self) -> bool:
        return self.consistent and self.count == 1

    def enumerate(self) -> set[tuple[GroupElement, ...]]:
        if not self.consistent:
            return set()
        if self.count is None:
            raise ValueError("infinitely many solutions")
        if not self.particular:
            return {()}
        G = self.particular[0].parent
        # expand the coset one kernel generator at a time on raw Smith coordinates
        layer = {tuple(x.c for x in self.particular)}
        for vec, order in zip(self.kernel, self.kernel_orders):
            step = [x.c for x in vec]
            grown = set()
            for sol in layer:
                cur = sol
                for _ in range(order):
                    grown.add(cur)
                    cur = tuple(G._normal([a + b for a, b in zip(x, y)]) for x, y in zip(cur, step))
            layer = grown
        return {tuple(GroupElement(G, c) for c in sol) for sol in layer}


def _inv_mod(a, m):
    return pow(a, -1, m) if m > 1 else 0


def solve_in_group(A: Sequence[Sequence[int]], rhs: Sequence[GroupElement], G: FGAbelianGroup) -> SolutionSet:
    """All x in G^l with sum_j A[i][j] x_j = rhs_i."""
    k = len(A)
    l = len(A[0]) if k else 0
    if len(rhs) != k:
        raise ValueError("one right-hand side per equation")
    for r in rhs:
        if r.parent != G:
            raise ValueError("right-hand side outside the group")
    U, D, V = smith(A)
    dvec = diagonal(D) + [0] * max(0, l - min(k, l))
    part = [[0] * l for _ in range(len(G.moduli))]  # per component: y solution
    kernel: list[tuple[int, list[int], int]] = []  # (component, y-vector, order)
    count: int | None = 1
    for t, e in enumerate(G.moduli):
        if e == 1:
            continue
        c = [sum(U[i][j] * rhs[j].c[t] for j in range(k)) for i in range(k)]
        y = [0] * l
        for i in range(k):
            ci = c[i]
            di = dvec[i] if i < l else 0
            if i >= l:
                ok = ci % e == 0 if e else ci == 0
                if not ok:
                    return SolutionSet(False)
                continue
            if e == 0:
                if di == 0:
                    if ci:
                        return SolutionSet(False)
                    kernel.append((t, [int(j == i) for j in range(l)], 0))
                    count = None
                else:
                    if ci % di:
                        return SolutionSet(False)
                    y[i] = ci // di
            else:
                g = gcd(di, e)
                if ci % g:
                    return SolutionSet(False)
                step = e // g
                y[i] = (ci // g) * _inv_mod((di // g) % step, step) % step if step > 1 else 0
                if g > 1:
                    kernel.append((t, [step if j == i else 0 for j in range(l)], g))
                    if count is not None:
                        count *= g
        for j in range(k, l):  # unknowns with no equation row: free
            if e == 0:
                kernel.append((t, [int(jj == j) for jj in range(l)], 0))
                count = None
            else:
                kernel.append((t, [int(jj == j) for jj in range(l)], e))
                if count is not None:
                    count *= e
        part[t] = y

    def to_x(comp_vectors):
        # comp_vectors[t] is a y-vector for component t; x = V y per component
        xs = []
        for j in range(l):
            cs = [sum(V[j][i] * comp_vectors[t][i] for i in range(l)) for t in range(len(G.moduli))]
            xs.append(G.from_smith(cs))
        return tuple(xs)

    particular = to_x(part)
    kvecs, korders = [], []
    for t, yv, order in kernel:
        comp = [[0] * l for _ in range(len(G.moduli))]
        comp[t] = yv
        kvecs.append(to_x(comp))
        korders.append(order)
    return SolutionSet(True, particular, kvecs, korders, count)


def brute_force_solutions(A, rhs, G: FGAbelianGroup) -> set[tuple[GroupElement, ...]]:
    """Oracle: enumerate G^l directly."""
    l = len(A[0])
    elems = list(G.elements())
    out = set()
    for xs in itertools.product(elems, repeat=l):
        ok = True
        for row, r in zip(A, rhs):
            s = G.zero()
            for a, x in zip(row, xs):
                s = s + x * a
            if s != r:
                ok = False
                break
        if ok:
            out.add(xs)
    return out


def torsion_count(G: FGAbelianGroup, r: int) -> int:
    """Number of r-torsion elements of G."""
    sol = solve_in_group([[r]], [G.zero()], G)
    if sol.count is None:
        raise ValueError("infinite torsion subgroup")
    return sol.count


def torsion_count_variety(g: int, r: int) -> int:
    """#A[r] for a g-dimensional abelian variety, via an r-divisible finite model."""
    return torsion_count(abelian_variety_model(g, r * r), r)


# -- line bundles on curves ------------------------------------------------------


@dataclass(frozen=True)
class LineBundleOnCurve:
    """O(sum n_i [p_i]) recorded by degree and point-sum sum n_i p_i."""

    degree: int
    sum: GroupElement

    @classmethod
    def trivial(cls, G):
        return cls(0, G.zero())

    @classmethod
    def origin(cls, G, k: int = 1):
        """O(k * o)."""
        return cls(k, G.zero())

    @classmethod
    def point(cls, p: GroupElement, k: int = 1):
        """O(k * [p])."""
        return cls(k, p * k)

    @classmethod
    def degree_zero(cls, p: GroupElement):
        """The degree-0 bundle attached to the point p: O([p] - [o])."""
        return cls(0, p)

    def __mul__(self, other: "LineBundleOnCurve"):
        return LineBundleOnCurve(self.degree + other.degree, self.sum + other.sum)

    def dual(self):
        return LineBundleOnCurve(-self.degree, -self.sum)

    def __pow__(self, k: int):
        return LineBundleOnCurve(self.degree * k, self.sum * k)

    def translate(self, x: GroupElement):
        """t_x^*: each point p of the divisor moves to p - x."""
        return LineBundleOnCurve(self.degree, self.sum - x * self.degree)

    def pull_mult(self, n: int):
        """Pullback along multiplication by n."""
        return LineBundleOnCurve(n * n * self.degree, self.sum * n)

    def __repr__(self):
        return f"(deg {self.degree}, sum {self.sum})"


@dataclass(frozen=True)
class SplitSurfaceBundleLedger:
    """Line bundle O_B(...) boxtimes O_F(...) on B x F.

    Its c1 is a*sigma + b*f with a the F-degree and b the B-degree.
    """

    B: LineBundleOnCurve
    F: LineBundleOnCurve

    @classmethod
    def trivial(cls, G):
        return cls(LineBundleOnCurve.trivial(G), LineBundleOnCurve.trivial(G))

    @classmethod
    def from_divisor(cls, G, a: int, b: int):
        """O(a sigma + b f) with all points at the origins."""
        return cls(LineBundleOnCurve.origin(G, b), LineBundleOnCurve.origin(G, a))

    @classmethod
    def twist(cls, yB: GroupElement, yF: GroupElement):
        return cls(LineBundleOnCurve.degree_zero(yB), LineBundleOnCurve.degree_zero(yF))

    def __mul__(self, other):
        return SplitSurfaceBundleLedger(self.B * other.B, self.F * other.F)

    def __pow__(self, k):
        return SplitSurfaceBundleLedger(self.B ** k, self.F ** k)

    def dual(self):
        return SplitSurfaceBundleLedger(self.B.dual(), self.F.dual())

    def translate(self, xB: GroupElement, xF: GroupElement):
        return SplitSurfaceBundleLedger(self.B.translate(xB), self.F.translate(xF))

    @property
    def ns(self) -> tuple[int, int]:
        """(sigma, f) coefficients of c1."""
        return self.F.degree, self.B.degree

    def residual(self) -> tuple[GroupElement, GroupElement]:
        """Point-sums relative to the origin-supported bundle of the same class."""
        return self.B.sum, self.F.sum

    def __repr__(self):
        return f"O_B{self.B} x O_F{self.F}"


class ChainStepError(AssertionError):
    pass


@dataclass
class ChainStep:
    name: str
    term: SplitSurfaceBundleLedger


@dataclass
class ChainReplay:
    steps: list[ChainStep]
    total: SplitSurfaceBundleLedger
    expected_ns: tuple[int, int]

    def check_ns(self):
        if self.total.ns != self.expected_ns:
            raise ChainStepError(
                f"NS class {self.total.ns} != expected {self.expected_ns} after steps {[s.name for s in self.steps]}"
            )


def _product(steps: list[ChainStep], G) -> SplitSurfaceBundleLedger:
    out = SplitSurfaceBundleLedger.trivial(G)
    for s in steps:
        out = out * s.term
    return out


def canonical_ab(r: int, d: int) -> tuple[int, int]:
    """The pair (a, b) with a d + b r = 1 and 0 < a < r."""
    if r < 2:
        raise ValueError("need r >= 2 for 0 < a < r")
    if gcd(r, d) != 1:
        raise ValueError(f"gcd({r}, {d}) != 1")
    a = pow(d, -1, r)
    b = (1 - a * d) // r
    assert a * d + b * r == 1 and 0 < a < r
    return a, b


@dataclass
class Prop1AChains:
    fixed_det: ChainReplay  # det of V^dual
    fixed_det_fm: ChainReplay  # det of RS(V)
    constraints: dict[str, GroupElement]
    solution: SolutionSet
    params: dict


def det_chain_prop1A(r: int, d: int, m: int, chi: int, a: int | None = None, b: int | None = None,
                     G: FGAbelianGroup | None = None, Z: Sequence[tuple[GroupElement, GroupElement]] | None = None,
                     mu: GroupElement | None = None) -> Prop1AChains:
    """Replay both determinant chains for a sheaf of class (r, d sigma + m f, chi).

    ``Z`` is a list of (B-coordinate, F-coordinate) points; by default d_v
    generic symbols.  ``mu`` is the point of B in M = O_B(-(beta+1)[o] + [mu]).
    """
    if a is None or b is None:
        a, b = canonical_ab(r, d)
    if a * d + b * r != 1:
        raise ValueError("need a d + b r = 1")
    d_v = d * m - r * chi
    beta = -a * chi - b * m
    if G is None:
        names = [f"z{i}_{s}" for i in range(d_v) for s in ("B", "F")] + ["mu"]
        G = symbol_group(names)
    if Z is None:
        Z = [(G.gen(f"z{i}_B"), G.gen(f"z{i}_F")) for i in range(d_v)]
    if mu is None:
        mu = G.gen("mu") if "mu" in G.names else G.zero()
    if len(Z) != d_v:
        raise ValueError(f"Z must have length d_v = {d_v}")
    aB = sum((z[0] for z in Z), G.zero())
    aF = sum((z[1] for z in Z), G.zero())
    L = LineBundleOnCurve

    # det of V^dual
    first = SplitSurfaceBundleLedger(
        B=L(r * beta + 1, G.zero()) * L.point(mu * r, -1),  # O_B((r beta + 1)[o] - [r mu])
        F=L.origin(G, -d),
    )
    steps = [ChainStep("det Phi^{U^dual}(L^dual)", first)]
    for i, (zB, _zF) in enumerate(Z):
        steps.append(ChainStep(f"point {i}", SplitSurfaceBundleLedger(B=L.point(zB, -a), F=L.trivial(G))))
    if r * beta - a * d_v != -m:
        raise ChainStepError("identity r*beta - a*d_v = -m fails")
    chain1 = ChainReplay(steps, _product(steps, G), (-d, -m))
    chain1.check_ns()

    # det of RS(V)
    first2 = SplitSurfaceBundleLedger(B=L.point(-mu, -d), F=L.origin(G, r * beta))
    steps2 = [ChainStep("det Rp(V x P_B x L^dual)", first2)]
    for i, (zB, zF) in enumerate(Z):
        t = SplitSurfaceBundleLedger(
            B=(L.point(zB, -1) * L.origin(G, 1)) ** b,
            F=L.point(zF, -1) * L.origin(G, -(a - 1)),
        )
        steps2.append(ChainStep(f"point {i}", t))
    chain2 = ChainReplay(steps2, _product(steps2, G), (-m, -d))
    chain2.check_ns()

    cons = {
        "a*aB(Z)+r*mu": -chain1.total.B.sum,
        "aF(Z)": -chain2.total.F.sum,
        "b*aB(Z)-d*mu": -chain2.total.B.sum,
    }
    assert cons["a*aB(Z)+r*mu"] == aB * a + mu * r
    assert cons["b*aB(Z)-d*mu"] == aB * b - mu * d
    assert cons["aF(Z)"] == aF
    sol = solve_in_group([[a, r], [b, -d]], [G.zero(), G.zero()], G)
    return Prop1AChains(chain1, chain2, cons, sol,
                        {"r": r, "d": d, "m": m, "chi": chi, "a": a, "b": b, "d_v": d_v, "beta": beta})


# -- section counts and root loci --------------------------------------------------


@dataclass
class SectionShape:
    h0: int
    shape: str
    constraint: str | None


def section_shape(a: int, b: int) -> SectionShape:
    """h^0 and divisor shape of O(a sigma + b f) on B x F."""
    if a > 0 and b > 0:
        if a == 1:
            return SectionShape(a * b, "sigma + z_1 x F + ... + z_b x F", "z_1 + ... + z_b = o_B")
        return SectionShape(a * b, "ample", None)
    if a == 0 and b > 0:
        return SectionShape(b, "z_1 x F + ... + z_b x F", "z_1 + ... + z_b = o_B")
    if b == 0 and a > 0:
        return SectionShape(a, "B x y_1 + ... + B x y_a", "y_1 + ... + y_a = o_F")
    raise ValueError(f"unsupported shape ({a}, {b})")


@dataclass
class RootLocus:
    count: int
    solutions: SolutionSet


def root_locus(M_Z: GroupElement, r: int) -> RootLocus:
    """r-th roots c of M_Z (c^r = M_Z) inside the given Jacobian model."""
    G = M_Z.parent
    sol = solve_in_group([[r]], [M_Z], G)
    if not sol.consistent:
        return RootLocus(0, sol)
    return RootLocus(sol.count, sol)
