"""Mukai vectors (rank, c1, chi) on the product surfaces and their numerics.

chi is the stored third entry; ch2 is recovered through the surface's Todd
class, so the genus-g correction lives in one place.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .exterior import AlgebraElement, exp, homogeneous_part, integrate
from .report import IdentityCheck
from .varieties import SurfaceContext, abelian_surface, binomial, euler_char_line


class InvariantViolation(AssertionError):
    pass


class Rejected(ValueError):
    """Precondition failure (the input is outside an operation's domain)."""


def _int(x, what="value") -> int:
    x = Fraction(x)
    if x.denominator != 1:
        raise InvariantViolation(f"{what} {x} is not an integer")
    return int(x)


@dataclass(frozen=True)
class MukaiVector:
    rank: int
    c1: AlgebraElement
    chi: int
    surface: SurfaceContext = field(default_factory=abelian_surface, compare=False)

    def __post_init__(self):
        if self.c1.ctx != self.surface.model.ctx:
            raise ValueError("c1 must live on the surface's generator context")
        if self.c1.degrees() - {2}:
            raise ValueError("c1 must be homogeneous of degree 2")
        _int(integrate(self.c1 * self.surface.f), "fiber degree")

    def __eq__(self, other):
        return (
            isinstance(other, MukaiVector)
            and self.surface == other.surface
            and (self.rank, self.c1, self.chi) == (other.rank, other.c1, other.chi)
        )

    def __hash__(self):
        return hash((self.rank, self.c1, self.chi))

    @classmethod
    def of(cls, rank, a, b, chi, surface: SurfaceContext | None = None):
        """(rank, a*sigma + b*f, chi)."""
        s = surface or abelian_surface()
        return cls(int(rank), s.divisor(a, b), int(chi), s)

    @classmethod
    def from_ch(cls, ch: AlgebraElement, surface: SurfaceContext | None = None):
        s = surface or abelian_surface()
        if ch.degrees() - {0, 2, 4}:
            raise ValueError("Chern character with odd-degree components")
        rank = _int(ch.terms.get(0, 0), "rank")
        return cls(rank, homogeneous_part(ch, 2), _int(s.euler(ch), "chi"), s)

    @property
    def d(self) -> int:
        """Fiber degree c1 . f."""
        return _int(integrate(self.c1 * self.surface.f))

    @property
    def sigma_f(self) -> tuple[int, int]:
        a, b = self.surface.coords(self.c1)
        return _int(a), _int(b)

    @property
    def m(self) -> int:
        """f-coefficient of c1 (c1 . sigma)."""
        return self.sigma_f[1]

    @property
    def ch2(self) -> Fraction:
        s = self.surface
        return Fraction(self.chi) + s.gbar * self.sigma_f[0]

    def ch(self) -> AlgebraElement:
        s = self.surface
        return s.model.one() * self.rank + self.c1 + s.omega * self.ch2

    def is_split(self) -> bool:
        """c1 lies in the span of sigma and f."""
        a, b = self.sigma_f
        return self.c1 == self.surface.divisor(a, b)

    def __add__(self, other):
        _same(self, other)
        return MukaiVector(self.rank + other.rank, self.c1 + other.c1, self.chi + other.chi, self.surface)

    def __neg__(self):
        return MukaiVector(-self.rank, -self.c1, -self.chi, self.surface)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        return MukaiVector(self.rank * k, self.c1 * k, self.chi * k, self.surface)

    __rmul__ = __mul__

    def twist(self, a, b) -> "MukaiVector":
        """Class of V (x) O(a sigma + b f)."""
        return MukaiVector.from_ch(self.ch() * exp(self.surface.divisor(a, b)), self.surface)

    def dual_class(self) -> "MukaiVector":
        """ch of the derived dual: odd-degree parts change sign."""
        s = self.surface
        ch = self.ch()
        return MukaiVector.from_ch(ch - homogeneous_part(ch, 2) * 2, s)

    def to_text(self) -> str:
        if not self.is_split():
            raise ValueError("text form only covers c1 in the span of sigma and f")
        a, b = self.sigma_f
        return f"{self.rank}:({a}σ{b:+d}f):{self.chi}"

    def __repr__(self):
        try:
            return f"MukaiVector({self.to_text()})"
        except ValueError:
            return f"MukaiVector({self.rank}, {self.c1}, {self.chi})"

    def to_json(self) -> dict:
        doc = {"rank": str(self.rank), "chi": str(self.chi), "genus": str(self.surface.genus)}
        if self.is_split():
            a, b = self.sigma_f
            doc["c1"] = {"sigma": str(a), "f": str(b)}
        else:
            ctx = self.c1.ctx
            doc["c1"] = {"terms": {"^".join(ctx.monomial_names(m)): str(c) for m, c in self.c1.terms.items()}}
        return doc

    @classmethod
    def from_json(cls, doc: dict, surface: SurfaceContext | None = None) -> "MukaiVector":
        from .varieties import genus_surface

        s = surface or genus_surface(int(doc.get("genus", 1)))
        c1 = doc["c1"]
        if "terms" in c1:
            el = s.model.zero()
            for mono, c in c1["terms"].items():
                el = el + AlgebraElement.monomial(s.model.ctx, mono.split("^"), Fraction(c))
        else:
            el = s.divisor(int(c1["sigma"]), int(c1["f"]))
        return cls(int(doc["rank"]), el, int(doc["chi"]), s)


def _same(v: MukaiVector, w: MukaiVector):
    if v.surface != w.surface:
        raise Rejected("Mukai vectors live on different surfaces")


_TERM = re.compile(r"([+-]?\d*)\s*\*?\s*([σsf])")


def parse_divisor(text: str) -> tuple[int, int]:
    """'aσ+bf' (or 's' for sigma, or a bare '0') -> (a, b)."""
    t = text.replace(" ", "")
    if t in ("", "0"):
        return 0, 0
    a = b = 0
    pos = 0
    for mt in _TERM.finditer(t):
        if mt.start() != pos:
            raise ValueError(f"cannot parse divisor {text!r}")
        coef = mt.group(1)
        k = int(coef + "1") if coef in ("", "+", "-") else int(coef)
        if mt.group(2) == "f":
            b += k
        else:
            a += k
        pos = mt.end()
    if pos != len(t):
        raise ValueError(f"cannot parse divisor {text!r}")
    return a, b


def parse_vector(text: str, surface: SurfaceContext | None = None) -> MukaiVector:
    """Parse the compact form ``r:(a σ + b f):chi``."""
    mt = re.fullmatch(r"\s*([+-]?\d+)\s*:\s*\((.*)\)\s*:\s*([+-]?\d+)\s*", text)
    if not mt:
        raise ValueError(f"cannot parse Mukai vector {text!r}; expected r:(aσ+bf):chi")
    a, b = parse_divisor(mt.group(2))
    return MukaiVector.of(int(mt.group(1)), a, b, int(mt.group(3)), surface)


# -- pairings and invariants ---------------------------------------------------------


def product_chi(v: MukaiVector, w: MukaiVector) -> int:
    """chi(v.w) = integral of ch(v) ch(w) td."""
    _same(v, w)
    s = v.surface
    val = _int(s.euler(v.ch() * w.ch()), "chi(v.w)")
    if s.is_abelian:
        closed = v.rank * w.chi + w.rank * v.chi + integrate(v.c1 * w.c1)
        if val != closed:
            raise InvariantViolation(f"pairing {val} disagrees with closed form {closed}")
    return val


def orthogonal(v: MukaiVector, w: MukaiVector) -> bool:
    return product_chi(v, w) == 0


def d_v(v: MukaiVector) -> int:
    """c1^2/2 - r chi: half the dimension of the moduli space."""
    if not v.surface.is_abelian:
        raise Rejected("d_v is defined here on the abelian surface only")
    return _int(integrate(v.c1 * v.c1) / 2 - v.rank * v.chi, "d_v")


def m_from_dv(v: MukaiVector) -> int:
    """m = d_v + r chi; equals the f-coefficient when the fiber degree is 1."""
    m = d_v(v) + v.rank * v.chi
    if v.d == 1 and v.is_split() and m != v.m:
        raise InvariantViolation("m = d_v + r chi fails")
    return m


def mukai_pairing(v: MukaiVector, w: MukaiVector) -> int:
    """<v, w> = c1 c1' - r chi' - r' chi on the abelian surface."""
    _same(v, w)
    return _int(integrate(v.c1 * w.c1) - v.rank * w.chi - w.rank * v.chi)


def stability_range_advisory(v: MukaiVector) -> bool:
    """<v,v> >= 2(r^2 + r - 1).  Advisory only; nothing depends on it."""
    return 2 * d_v(v) >= 2 * (v.rank ** 2 + v.rank - 1)


@dataclass(frozen=True)
class PolarizationRecord:
    """H = sigma + N f with N 'sufficiently large'.  Never used numerically."""

    N: str = "N>>0"

    def __str__(self):
        return f"σ+({self.N})f"

    def value(self):
        raise Rejected("the polarization is recorded for provenance only")


# -- Verlinde numbers -----------------------------------------------------------------


def theta_c1(v: MukaiVector, w: MukaiVector) -> AlgebraElement:
    """r_v c1(w) + r_w c1(v), the degree-2 part of ch(v) ch(w)."""
    c = w.c1 * v.rank + v.c1 * w.rank
    assert c == homogeneous_part(v.ch() * w.ch(), 2)
    return c


@dataclass
class VerlindeData:
    sign: str
    c1_L: tuple[int, int] | None
    chi_L: int
    dsum: int
    per_point: Fraction
    count: int | Fraction


def verlinde_data(v: MukaiVector, w: MukaiVector, sign: str = "plus") -> VerlindeData:
    if sign not in ("plus", "minus"):
        raise Rejected(f"sign must be plus or minus, got {sign!r}")
    if product_chi(v, w) != 0:
        raise Rejected("verlinde_count needs chi(v.w) = 0")
    if d_v(v) < 0 or d_v(w) < 0:
        raise Rejected("d_v and d_w must be non-negative")
    dsum = d_v(v) + d_v(w)
    if dsum == 0:
        raise Rejected("d_v + d_w = 0")
    if sign == "plus":
        vv, ww = v, w
    else:
        from .fm_engine import rs_vector

        vv, ww = rs_vector(v), rs_vector(w)
        if d_v(vv) + d_v(ww) != dsum:
            raise InvariantViolation("RS does not preserve d_v")
    c1L = theta_c1(vv, ww)
    s = v.surface
    chiL = _int(s.euler(exp(c1L)), "chi(L)")
    per = Fraction(chiL, dsum)
    count = per * binomial(dsum, d_v(v))
    if count.denominator == 1:
        count = int(count)
    a, b = s.coords(c1L)
    split = c1L == s.divisor(a, b)
    return VerlindeData(sign, (_int(a), _int(b)) if split else None, chiL, dsum, per, count)


def verlinde_count(v: MukaiVector, w: MukaiVector, sign: str = "plus") -> int:
    """chi(X, L)/(d_v + d_w) * binom(d_v + d_w, d_v)."""
    n = verlinde_data(v, w, sign).count
    if verlinde_data(w, v, sign).count != n:
        raise InvariantViolation("Verlinde count is not symmetric in v and w")
    return n


def chi_L_equals_ell(v: MukaiVector, w: MukaiVector) -> IdentityCheck:
    """chi(O((r+s) sigma - (chi+chi') f)) = d_v + d_w for equal ranks."""
    if v.rank != w.rank:
        raise Rejected("needs r = s")
    if product_chi(v, w) != 0:
        raise Rejected("needs orthogonal vectors")
    r = v.rank
    lhs = euler_char_line(v.surface, 2 * r, -(v.chi + w.chi))
    return IdentityCheck.compare(
        "chi-L", "chi(L) = d_v + d_w", "section count of L on the abelian surface",
        lhs, d_v(v) + d_v(w),
    )


# -- towers, fiber restrictions, dimensions ------------------------------------------


def ogrady_tower(chi: int, ell: int, r_max: int, surface: SurfaceContext | None = None) -> list[MukaiVector]:
    """v_1 = ch(I_Z(sigma + (chi+ell) f)), v_{k+1} = v_k + ch O(chi f)."""
    if ell < 1 or r_max < 1:
        raise Rejected("need ell >= 1 and r_max >= 1")
    s = surface or abelian_surface()
    m1 = chi + ell
    v = MukaiVector.of(1, 1, m1, m1 - ell, s)  # chi(O(sigma + m1 f)) = m1, minus length ell
    step = MukaiVector.from_ch(exp(s.divisor(0, chi)), s)
    out = [v]
    while len(out) < r_max:
        out.append(out[-1] + step)
    for k, vk in enumerate(out, 1):
        assert vk.rank == k and vk.d == 1
        if vk.twist(0, -chi).chi != 0:
            raise InvariantViolation(f"chi(v_{k}(-chi f)) != 0")
        if s.is_abelian and d_v(vk) != ell:
            raise InvariantViolation(f"d_v(v_{k}) != {ell}")
    return out


@dataclass(frozen=True)
class FiberRestrictionClass:
    rank: int
    degree: int
    summands: tuple[tuple[int, int], ...] = ()
    degenerate: bool = False

    def __post_init__(self):
        if self.summands:
            if sum(r for r, _ in self.summands) != self.rank or sum(d for _, d in self.summands) != self.degree:
                raise InvariantViolation("summands do not add up")


def fiber_restriction(k: int, has_point: bool) -> FiberRestrictionClass:
    """Restriction of the k-th tower bundle to a fiber (generic, or through a point of Z)."""
    if k < 1:
        raise Rejected("k >= 1")
    if not has_point:
        return FiberRestrictionClass(k, 1)
    return FiberRestrictionClass(k, 1, ((k - 1, 1), (1, 0)), degenerate=(k == 1))


@dataclass(frozen=True)
class KummerDims:
    d_v: int
    kummer_dim: int
    moduli_dim: int
    etale_degree: int


def kummer_dims(v: MukaiVector | int) -> KummerDims:
    n = v if isinstance(v, int) else d_v(v)
    if n < 1:
        raise Rejected("d_v >= 1 required")
    return KummerDims(n, 2 * n - 2, 2 * n + 2, n ** 4)


def orthogonal_partner_m(r, m, chi, s, chi2) -> int:
    """n with (r, sigma+m f, chi) . (s, sigma+n f, chi2) = 0."""
    return -r * chi2 - s * chi - m
