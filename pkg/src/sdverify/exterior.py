"""Exact exterior algebra over Q on an ordered set of degree-1 generators.

Elements are sparse maps from monomial bitmasks to Fractions.  Bit ``i`` of a
mask stands for generator ``i`` of the context; a monomial is always read in
ascending generator order, so the mask alone is a canonical form.  The
orientation of a context is the full ascending monomial with coefficient +1.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence


class ContextMismatch(ValueError):
    pass


def _popcount(x: int) -> int:
    return x.bit_count()


def merge_sign(a: int, b: int) -> int:
    """Sign of rewriting ``mono(a) * mono(b)`` in ascending order (0 if they overlap)."""
    if a & b:
        return 0
    inversions = 0
    rest = b
    while rest:
        low = rest & -rest
        j = low.bit_length() - 1
        inversions += _popcount(a >> (j + 1))
        rest ^= low
    return -1 if inversions & 1 else 1


class GeneratorSet:
    """Ordered, immutable tuple of distinct generator names."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, GeneratorSet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"GeneratorSet({list(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"{name!r} is not a generator of {self}") from None

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for n in names:
            m |= 1 << self.index(n)
        return m

    @property
    def top(self) -> int:
        return (1 << len(self.names)) - 1

    def monomial_names(self, mask: int) -> list[str]:
        return [n for i, n in enumerate(self.names) if mask >> i & 1]


class AlgebraElement:
    """Finite Q-linear combination of square-free monomials.  Treat as immutable."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: GeneratorSet, terms: Mapping[int, object] | None = None):
        self.ctx = ctx
        clean = {}
        top = ctx.top
        for m, c in (terms or {}).items():
            if m & ~top or m < 0:
                raise ValueError(f"monomial {m:b} outside context of size {len(ctx)}")
            c = Fraction(c)
            if c:
                clean[m] = c
        self.terms = clean

    @classmethod
    def _trusted(cls, ctx, terms: dict):
        """Skip validation: ``terms`` already holds in-range monomials with Fraction values."""
        out = object.__new__(cls)
        out.ctx = ctx
        out.terms = {m: c for m, c in terms.items() if c}
        return out

    # construction helpers
    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def scalar(cls, ctx, c):
        return cls(ctx, {0: c})

    @classmethod
    def gen(cls, ctx, name):
        return cls(ctx, {1 << ctx.index(name): 1})

    @classmethod
    def monomial(cls, ctx, names: Sequence[str], coeff=1):
        """Product of the named generators in the order given."""
        out = cls.scalar(ctx, coeff)
        for n in names:
            out = out * cls.gen(ctx, n)
        return out

    # arithmetic
    def _check(self, other):
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def _coerce(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return AlgebraElement.scalar(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return AlgebraElement._trusted(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement._trusted(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return AlgebraElement._trusted(self.ctx, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        terms: dict[int, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                s = merge_sign(ma, mb)
                if s:
                    m = ma | mb
                    p = ca * cb if s > 0 else -(ca * cb)
                    terms[m] = terms[m] + p if m in terms else p
        return AlgebraElement._trusted(self.ctx, terms)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined")
        out = AlgebraElement.scalar(self.ctx, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraElement.scalar(self.ctx, other)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (_popcount(m), m)):
            c = self.terms[m]
            mono = "^".join(self.ctx.monomial_names(m)) or "1"
            parts.append(f"{c}*{mono}" if mono != "1" else f"{c}")
        return " + ".join(parts)

    # structure
    def coeff(self, names: Iterable[str]) -> Fraction:
        """Coefficient of the ascending monomial on ``names``."""
        return self.terms.get(self.ctx.mask(names), Fraction(0))

    def degrees(self) -> set[int]:
        return {_popcount(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def on(self, ctx: GeneratorSet) -> "AlgebraElement":
        """Reinterpret on another context of the same size (generator i -> generator i)."""
        if len(ctx) != len(self.ctx):
            raise ContextMismatch("rebinding needs equal generator counts")
        return AlgebraElement(ctx, self.terms)


def homogeneous_part(a: AlgebraElement, k: int) -> AlgebraElement:
    if not 0 <= k <= len(a.ctx):
        raise ValueError(f"degree {k} out of range")
    return AlgebraElement(a.ctx, {m: c for m, c in a.terms.items() if _popcount(m) == k})


def integrate(a: AlgebraElement) -> Fraction:
    """Coefficient of the orientation monomial."""
    return a.terms.get(a.ctx.top, Fraction(0))


def exp(a: AlgebraElement) -> AlgebraElement:
    """exp of an element without constant term (nilpotent, so the series is finite)."""
    if a.terms.get(0):
        raise ValueError("exp is only defined here for elements with zero constant term")
    out = AlgebraElement.scalar(a.ctx, 1)
    power = AlgebraElement.scalar(a.ctx, 1)
    k = 1
    while True:
        power = power * a / k
        if not power:
            return out
        out = out + power
        k += 1


def _images(matrix, source: GeneratorSet) -> list[AlgebraElement]:
    images = []
    for row in matrix:
        if isinstance(row, AlgebraElement):
            if row.ctx != source:
                raise ContextMismatch("image lives on the wrong context")
            if row.degrees() - {1}:
                raise ValueError("generator images must be homogeneous of degree 1")
            images.append(row)
            continue
        row = list(row)
        if len(row) != len(source):
            raise ValueError(f"matrix row has {len(row)} entries, source has {len(source)} generators")
        images.append(AlgebraElement(source, {1 << j: c for j, c in enumerate(row) if c}))
    return images


class LinearPullback:
    """Algebra homomorphism determined by the images of the target generators.

    ``matrix[i][j]`` is the coefficient of source generator ``j`` in the image of
    target generator ``i``.
    """

    def __init__(self, matrix, source: GeneratorSet, target: GeneratorSet):
        matrix = list(matrix)
        if len(matrix) != len(target):
            raise ValueError(f"matrix has {len(matrix)} rows, target has {len(target)} generators")
        self.source = source
        self.target = target
        self.images = _images(matrix, source)
        self._cache: dict[int, AlgebraElement] = {0: AlgebraElement.scalar(source, 1)}

    def monomial(self, mask: int) -> AlgebraElement:
        if mask not in self._cache:
            low = mask & -mask
            i = low.bit_length() - 1
            self._cache[mask] = self.images[i] * self.monomial(mask ^ low)
        return self._cache[mask]

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        if a.ctx != self.target:
            raise ContextMismatch("pullback argument must live on the target context")
        out = AlgebraElement.zero(self.source)
        for m, c in a.terms.items():
            out = out + self.monomial(m) * c
        return out

    def then(self, other: "LinearPullback") -> "LinearPullback":
        """Pullback along (g o f) where self is f^* and ``other`` is g^*: f^* o g^*."""
        if other.source != self.target:
            raise ContextMismatch("composition mismatch")
        return LinearPullback([self(img) for img in other.images], self.source, other.target)


def pullback(a: AlgebraElement, matrix, source: GeneratorSet) -> AlgebraElement:
    return LinearPullback(matrix, source, a.ctx)(a)


def fiber_integrate(a: AlgebraElement, names: Iterable[str]) -> AlgebraElement:
    """Integrate out the generators ``names`` (one factor of a product).

    A monomial survives only if it contains every generator of the factor; the
    factor's generators are moved to the far right (recording the sign) and then
    dropped.  The result lives on the context of the remaining generators.
    """
    names = list(names)
    smask = a.ctx.mask(names)
    keep = [i for i in range(len(a.ctx)) if not smask >> i & 1]
    rest = GeneratorSet(a.ctx.names[i] for i in keep)
    terms: dict[int, Fraction] = {}
    for m, c in a.terms.items():
        if m & smask != smask:
            continue
        sign = 0
        for i in range(len(a.ctx)):
            if smask >> i & 1:
                sign += _popcount((m & ~smask) >> (i + 1))
        new = 0
        for pos, i in enumerate(keep):
            if m >> i & 1:
                new |= 1 << pos
        terms[new] = terms.get(new, 0) + (-c if sign & 1 else c)
    return AlgebraElement(rest, terms)


def complement_pairing(ctx: GeneratorSet, mask: int) -> int:
    """integrate(mono(mask) * mono(complement)) = +-1."""
    return merge_sign(mask, ctx.top ^ mask)


def pushforward_along(a: AlgebraElement, f: LinearPullback, check: bool = True) -> AlgebraElement:
    """Poincare-dual pushforward: the unique class p with int(p*b) = int(a*f^*b) for all b."""
    if a.ctx != f.source:
        raise ContextMismatch("pushforward argument must live on the source context")
    target = f.target
    terms = {}
    for k in range(len(target) + 1):
        for idx in combinations(range(len(target)), k):
            mask = sum(1 << i for i in idx)
            comp = target.top ^ mask
            val = integrate(a * f.monomial(comp))
            if val:
                terms[mask] = val * complement_pairing(target, mask)
    out = AlgebraElement(target, terms)
    if check:
        for mask in range(target.top + 1):
            beta = AlgebraElement(target, {mask: 1})
            assert integrate(out * beta) == integrate(a * f(beta)), "duality pairing failed"
    return out


def basis(ctx: GeneratorSet) -> list[AlgebraElement]:
    return [AlgebraElement(ctx, {m: 1}) for m in range(ctx.top + 1)]
