"""Cohomology models of elliptic curves, abelian varieties and their products.

Every factor is an abelian model of dimension g with generators grouped in
pairs (x_i, y_i), oriented so that x_1 y_1 ... x_g y_g integrates to 1.  A
product model concatenates factor generators, hence factor orientations.

The genus-g curve C of the higher-genus surface C x F has no exterior
cohomology ring; it is represented by an elliptic proxy.  Every class used on
C x F lies in the span of 1, sigma, f, omega, where the proxy reproduces the
ring structure exactly, and genus enters only through K and the Todd class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .exterior import (
    AlgebraElement,
    GeneratorSet,
    LinearPullback,
    exp,
    homogeneous_part,
    integrate,
)


@dataclass(frozen=True)
class AbelianModel:
    label: str
    g: int
    names: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) != 2 * self.g:
            raise ValueError(f"{self.label}: need {2 * self.g} generators, got {len(self.names)}")

    @classmethod
    def standard(cls, label: str, g: int = 1, suffix: str = "") -> "AbelianModel":
        base = label.lower()
        if g == 1:
            names = (f"{base}1{suffix}", f"{base}2{suffix}")
        else:
            names = tuple(n for i in range(1, g + 1) for n in (f"{base}x{i}{suffix}", f"{base}y{i}{suffix}"))
        return cls(label, g, names)

    def primed(self, mark: str = "'") -> "AbelianModel":
        return AbelianModel(self.label + mark, self.g, tuple(n + mark for n in self.names))

    @property
    def pairs(self):
        return [(self.names[2 * i], self.names[2 * i + 1]) for i in range(self.g)]


@dataclass(frozen=True)
class ProductModel:
    factors: tuple[AbelianModel, ...]
    ctx: GeneratorSet = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ctx", GeneratorSet(n for fac in self.factors for n in fac.names))

    @classmethod
    def of(cls, *factors: AbelianModel) -> "ProductModel":
        return cls(tuple(factors))

    def __mul__(self, other: "ProductModel") -> "ProductModel":
        return ProductModel(self.factors + other.factors)

    def primed(self, mark: str = "'") -> "ProductModel":
        return ProductModel(tuple(f.primed(mark) for f in self.factors))

    @property
    def dim(self) -> int:
        return sum(f.g for f in self.factors)

    def factor(self, label: str) -> AbelianModel:
        for f in self.factors:
            if f.label == label:
                return f
        raise KeyError(label)

    # classes
    def one(self) -> AlgebraElement:
        return AlgebraElement.scalar(self.ctx, 1)

    def zero(self) -> AlgebraElement:
        return AlgebraElement.zero(self.ctx)

    def g(self, name: str) -> AlgebraElement:
        return AlgebraElement.gen(self.ctx, name)

    def theta(self, label: str) -> AlgebraElement:
        fac = self.factor(label)
        out = self.zero()
        for x, y in fac.pairs:
            out = out + self.g(x) * self.g(y)
        return out

    def pt(self, label: str) -> AlgebraElement:
        """Point class of one factor, pulled back to the product."""
        # factor generators are contiguous and ascending, so the sign is +1
        return AlgebraElement(self.ctx, {self.ctx.mask(self.factor(label).names): 1})

    def orientation(self) -> AlgebraElement:
        return AlgebraElement(self.ctx, {self.ctx.top: 1})

    def c1_poincare(self, first: str, second: str) -> AlgebraElement:
        """c1 of the normalized Poincare bundle m^*Theta^{-1} (Theta x Theta) on a pair of factors."""
        a, b = self.factor(first), self.factor(second)
        if a.g != b.g:
            raise ValueError("Poincare class needs factors of equal dimension")
        out = self.zero()
        for (x, y), (xp, yp) in zip(a.pairs, b.pairs):
            out = out + self.g(y) * self.g(xp) - self.g(x) * self.g(yp)
        return out

    def diagonal(self, first: str, second: str) -> AlgebraElement:
        """Class of the diagonal: pullback of the point class along (u, v) -> u - v."""
        a, b = self.factor(first), self.factor(second)
        target = ProductModel.of(a)
        rows = []
        for n, np_ in zip(a.names, b.names):
            row = [0] * len(self.ctx)
            row[self.ctx.index(n)] = 1
            row[self.ctx.index(np_)] = -1
            rows.append(row)
        return LinearPullback(rows, self.ctx, target.ctx)(target.orientation())

    def lift(self, a: AlgebraElement, sub: "ProductModel") -> AlgebraElement:
        """Pull a class back from a sub-product (projection onto some factors)."""
        rows = []
        for n in sub.ctx.names:
            row = [0] * len(self.ctx)
            row[self.ctx.index(n)] = 1
            rows.append(row)
        return LinearPullback(rows, self.ctx, sub.ctx)(a)

    # serialization
    def to_json(self) -> dict:
        return {
            "factors": [{"label": f.label, "g": f.g, "generators": list(f.names)} for f in self.factors],
            "orientation": list(self.ctx.names),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ProductModel":
        facs = tuple(AbelianModel(d["label"], int(d["g"]), tuple(d["generators"])) for d in doc["factors"])
        model = cls(facs)
        if "orientation" in doc and list(doc["orientation"]) != list(model.ctx.names):
            raise ValueError("orientation must be the concatenation of factor generators")
        return model

    def dumps(self) -> str:
        return json.dumps(self.to_json())


class UnrecognizedShape(ValueError):
    pass


def elliptic(label: str, suffix: str = "") -> AbelianModel:
    return AbelianModel.standard(label, 1, suffix)


def surface_model(base: str = "B", fiber: str = "F") -> ProductModel:
    return ProductModel.of(elliptic(base), elliptic(fiber))


def standard_classes(m: ProductModel) -> dict[str, AlgebraElement]:
    """Named classes for the shapes used here.

    Per factor ``L``: ``pt_L`` and ``theta_L``.  For pairs of equal-dimension
    factors ``L, M``: ``c1P_L_M``, ``diag_L_M`` and ``mtheta_L_M`` (pullback of
    theta along addition).  For a two-curve surface the names ``sigma``, ``f``
    and ``omega`` refer to (base x origin), (origin x fiber) and the point.
    """
    n = len(m.factors)
    if n == 0 or n > 3:
        raise UnrecognizedShape(f"no class table for {n} factors")
    out: dict[str, AlgebraElement] = {"1": m.one()}
    for fac in m.factors:
        out[f"pt_{fac.label}"] = m.pt(fac.label)
        out[f"theta_{fac.label}"] = m.theta(fac.label)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = m.factors[i], m.factors[j]
            if a.g != b.g:
                continue
            key = f"{a.label}_{b.label}"
            out[f"c1P_{key}"] = m.c1_poincare(a.label, b.label)
            out[f"diag_{key}"] = m.diagonal(a.label, b.label)
            mtheta = m.zero()
            for (x, y), (xp, yp) in zip(a.pairs, b.pairs):
                mtheta = mtheta + (m.g(x) + m.g(xp)) * (m.g(y) + m.g(yp))
            out[f"mtheta_{key}"] = mtheta
    if n == 2 and all(f.g == 1 for f in m.factors):
        base, fib = m.factors
        out["sigma"] = m.pt(fib.label)
        out["f"] = m.pt(base.label)
        out["omega"] = out["sigma"] * out["f"]
    return out


def chern_line(m: ProductModel, divisor: dict[str, int] | AlgebraElement) -> AlgebraElement:
    """ch of a line bundle; ``divisor`` is an integer combination of named classes or c1 itself."""
    if isinstance(divisor, AlgebraElement):
        c1 = divisor
    else:
        table = standard_classes(m)
        c1 = m.zero()
        for name, k in divisor.items():
            c1 = c1 + table[name] * k
    return exp(c1)


# -- surfaces ---------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceContext:
    """Product surface base x fiber with its Todd data.

    ``genus == 1`` is the abelian surface B x F; otherwise the base is a genus-g
    curve represented by an elliptic proxy.
    """

    model: ProductModel
    genus: int = 1

    @property
    def gbar(self) -> int:
        return self.genus - 1

    @property
    def base(self) -> AbelianModel:
        return self.model.factors[0]

    @property
    def fiber(self) -> AbelianModel:
        return self.model.factors[1]

    @property
    def classes(self):
        return standard_classes(self.model)

    @property
    def sigma(self):
        return self.model.pt(self.fiber.label)

    @property
    def f(self):
        return self.model.pt(self.base.label)

    @property
    def omega(self):
        return self.sigma * self.f

    @property
    def canonical(self) -> AlgebraElement:
        return self.f * (2 * self.gbar)

    @property
    def todd(self) -> AlgebraElement:
        return self.model.one() - self.f * self.gbar

    @property
    def is_abelian(self) -> bool:
        return self.genus == 1

    def divisor(self, a, b) -> AlgebraElement:
        """a*sigma + b*f."""
        return self.sigma * a + self.f * b

    def coords(self, c1: AlgebraElement) -> tuple[Fraction, Fraction]:
        """(sigma, f) coefficients of a degree-2 class, read off by intersection."""
        return integrate(c1 * self.f), integrate(c1 * self.sigma)

    def euler(self, ch: AlgebraElement) -> Fraction:
        return integrate(ch * self.todd)

    def to_json(self) -> dict:
        return {"genus": self.genus, "model": self.model.to_json()}


def abelian_surface() -> SurfaceContext:
    return SurfaceContext(surface_model("B", "F"), 1)


def genus_surface(g: int) -> SurfaceContext:
    if g < 1:
        raise ValueError("genus must be >= 1")
    if g == 1:
        return abelian_surface()
    return SurfaceContext(surface_model("C", "F"), g)


def euler_char_line(s: SurfaceContext, a, b) -> int:
    """chi(O(a sigma + b f)) by Riemann-Roch: integral of exp(c1) * td."""
    val = s.euler(exp(s.divisor(a, b)))
    assert val.denominator == 1
    return int(val)


def euler_char_curve(genus: int, degree: int) -> int:
    """chi of a degree-e line bundle on a genus-g curve via ch * td on the proxy."""
    E = ProductModel.of(elliptic("C"))
    pt = E.pt("C")
    td = E.one() - pt * (genus - 1)
    val = integrate((E.one() + pt * degree) * td)
    return int(val)


# -- standard morphisms -------------------------------------------------------


@dataclass(frozen=True)
class StandardMorphism:
    """A homomorphism of abelian models, recorded by its pullback on H^1."""

    name: str
    source: ProductModel
    target: ProductModel
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.matrix) != len(self.target.ctx):
            raise ValueError("one row per target generator is required")
        for row in self.matrix:
            if len(row) != len(self.source.ctx):
                raise ValueError("row length must match source generators")
            if any(Fraction(x).denominator != 1 for x in row):
                raise ValueError("morphisms of abelian varieties have integer matrices")

    @property
    def pull(self) -> LinearPullback:
        return LinearPullback(self.matrix, self.source.ctx, self.target.ctx)

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return self.pull(a)

    def compose(self, first: "StandardMorphism") -> "StandardMorphism":
        """self o first."""
        if first.target != self.source:
            raise ValueError("composition mismatch")
        p = first.pull.then(self.pull)
        rows = tuple(tuple(int(img.terms.get(1 << j, 0)) for j in range(len(first.source.ctx))) for img in p.images)
        return StandardMorphism(f"{self.name}.{first.name}", first.source, self.target, rows)


def linear_morphism(name, source: ProductModel, target: ProductModel, blocks) -> StandardMorphism:
    """Morphism whose target factor ``T`` pulls back to ``sum_k blocks[T][S_k] * S_k``.

    ``blocks`` maps a target factor label to {source factor label: integer}; the
    integer multiplies matching generators (so factors must have equal g).
    """
    rows = []
    for tf in target.factors:
        weights = blocks.get(tf.label, {})
        for i in range(len(tf.names)):
            row = [0] * len(source.ctx)
            for slabel, k in weights.items():
                sf = source.factor(slabel)
                row[source.ctx.index(sf.names[i])] += k
            rows.append(tuple(row))
    return StandardMorphism(name, source, target, tuple(rows))


def multiplication(model: ProductModel, n: int) -> StandardMorphism:
    return linear_morphism(f"[{n}]", model, model, {f.label: {f.label: n} for f in model.factors})


def addition(A: AbelianModel) -> StandardMorphism:
    """m: A x A' -> A."""
    Ap = A.primed()
    return linear_morphism("m", ProductModel.of(A, Ap), ProductModel.of(A), {A.label: {A.label: 1, Ap.label: 1}})


def degree_of_pt_pullback(f: StandardMorphism) -> Fraction:
    """Degree of an isogeny between equal-dimension models: coefficient of f^*(pt)."""
    return integrate(f(f.target.orientation()))


def binomial(n: int, k: int) -> int:
    return comb(n, k)


def to_model_json(m: ProductModel) -> str:
    return m.dumps()
