"""
Sparse multivariate polynomials with exact rational coefficients over a
weighted graded ring S_e = Q[x_0, ..., x_m], deg(x_i) = e_i.

Coefficients are Python ints or reduced ``Fraction`` values; a ``Fraction``
with denominator 1 is always stored as an int so that integer-only
computations never pay for gcd normalisation.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from operator import add
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from org.boxbuilder.folia import config
from org.boxbuilder.folia.errors import (
    ArityError,
    DegreeMismatchError,
    InhomogeneousError,
    RingMismatchError,
    ZeroPolynomialError,
)

_LOG = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Rational = Union[int, Fraction]

DEFAULT_COEFFICIENT_BOUND = config.DEFAULT_COEFFICIENT_BOUND
RNG_NAME = "numpy-pcg64/v1"


def normalize_rational(value) -> Rational:
    """
    Converts ints, numpy integers, ``Fraction`` values and "p/q" strings into
    the canonical coefficient representation (int when integral).

    Raises:
        TypeError: for floats, booleans and anything that is not an exact rational.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, int):
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return normalize_rational(Fraction(value))
    raise TypeError(f"Unsupported coefficient type {type(value)}: only exact rationals are allowed.")


def rational_to_string(value: Rational) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def draw_nonzero(rng: np.random.Generator, bound: int) -> int:
    if bound < 1:
        raise ValueError(f"Coefficient bound must be positive, got {bound}.")
    magnitude = int(rng.integers(1, bound + 1))
    return -magnitude if int(rng.integers(0, 2)) else magnitude


def _revlex_key(exps: Exponents) -> Tuple[int, ...]:
    return tuple(-e for e in reversed(exps))


@lru_cache(maxsize=None)
def _monomials(weights: Tuple[int, ...], delta: int) -> Tuple[Exponents, ...]:
    if delta < 0:
        return ()
    out: List[Exponents] = []
    last = len(weights) - 1

    def rec(i: int, remaining: int, prefix: Exponents):
        if i == last:
            if remaining % weights[i] == 0:
                out.append(prefix + (remaining // weights[i],))
            return
        for e in range(remaining // weights[i] + 1):
            rec(i + 1, remaining - e * weights[i], prefix + (e,))

    rec(0, delta, ())
    out.sort(key=_revlex_key, reverse=True)
    return tuple(out)


@dataclass(frozen=True)
class WeightedRing:
    """
    The graded ring S_e with positive integer weights. ``prefix`` only names
    variables for display (z for sources, x for targets) and takes no part in equality.
    """

    weights: Tuple[int, ...]
    prefix: str = field(default="x", compare=False)

    def __post_init__(self):
        weights = tuple(int(w) for w in self.weights)
        if len(weights) == 0:
            raise ValueError("A weighted ring needs at least one variable.")
        if any(w <= 0 for w in weights):
            raise ValueError(f"Weights must be strictly positive, got {weights}.")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def projective(cls, n: int, prefix: str = "z") -> "WeightedRing":
        return cls(weights=(1,) * (n + 1), prefix=prefix)

    @property
    def nvars(self) -> int:
        return len(self.weights)

    @property
    def has_unit_weights(self) -> bool:
        return all(w == 1 for w in self.weights)

    def degree_of(self, exps: Exponents) -> int:
        return sum(w * e for w, e in zip(self.weights, exps))

    def monomials(self, delta: int) -> Tuple[Exponents, ...]:
        """Exponent vectors of weighted degree ``delta`` in canonical (descending grevlex) order."""
        return _monomials(self.weights, delta)

    def graded_dimension(self, delta: int) -> int:
        return len(self.monomials(delta))

    def sort_key(self, exps: Exponents) -> Tuple:
        return (self.degree_of(exps), _revlex_key(exps))

    def zero(self) -> "Poly":
        return Poly._trusted(self, {})

    def one(self) -> "Poly":
        return self.constant(1)

    def constant(self, c) -> "Poly":
        return Poly(self, {(0,) * self.nvars: c})

    def variable(self, i: int) -> "Poly":
        if not 0 <= i < self.nvars:
            raise IndexError(f"Variable index {i} out of range for {self.nvars} variables.")
        exps = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Poly._trusted(self, {exps: 1})

    def variables(self) -> Tuple["Poly", ...]:
        return tuple(self.variable(i) for i in range(self.nvars))

    def monomial(self, exps: Sequence[int], coef=1) -> "Poly":
        return Poly(self, {tuple(exps): coef})

    def __str__(self):
        return f"Q[{', '.join(f'{self.prefix}{i}' for i in range(self.nvars))}] weights {self.weights}"


def _clean(terms: Dict[Exponents, Rational]) -> Dict[Exponents, Rational]:
    out = {}
    for exps, c in terms.items():
        if c:
            if isinstance(c, Fraction) and c.denominator == 1:
                c = c.numerator
            out[exps] = c
    return out


def multiply_terms(
    left: Mapping[Exponents, Rational], right: Mapping[Exponents, Rational]
) -> Dict[Exponents, Rational]:
    res: Dict[Exponents, Rational] = {}
    for ea, ca in left.items():
        for eb, cb in right.items():
            e = tuple(map(add, ea, eb))
            res[e] = res.get(e, 0) + ca * cb
    return _clean(res)


class Poly:
    """
    Immutable polynomial over a ``WeightedRing``. Terms map exponent vectors to
    nonzero rationals; iteration through ``terms()`` follows descending grevlex.
    """

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: WeightedRing, terms: Optional[Mapping[Sequence[int], object]] = None):
        clean: Dict[Exponents, Rational] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != ring.nvars:
                raise ArityError(f"Exponent vector {exps} does not match {ring.nvars} variables.")
            if any(e < 0 for e in exps):
                raise ValueError(f"Negative exponent in {exps}.")
            clean[exps] = clean.get(exps, 0) + normalize_rational(c)
        self.ring = ring
        self._terms = _clean(clean)
        self._hash = None

    @classmethod
    def _trusted(cls, ring: WeightedRing, terms: Dict[Exponents, Rational]) -> "Poly":
        p = cls.__new__(cls)
        p.ring = ring
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def from_terms(cls, ring: WeightedRing, terms: Dict[Exponents, Rational]) -> "Poly":
        return cls._trusted(ring, _clean(terms))

    @property
    def term_map(self) -> Mapping[Exponents, Rational]:
        return MappingProxyType(self._terms)

    def terms(self) -> List[Tuple[Exponents, Rational]]:
        return sorted(self._terms.items(), key=lambda t: self.ring.sort_key(t[0]), reverse=True)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def leading_term(self) -> Tuple[Exponents, Rational]:
        if not self._terms:
            raise ZeroPolynomialError("The zero polynomial has no leading term.")
        key = self.ring.sort_key
        exps = max(self._terms, key=key)
        return exps, self._terms[exps]

    def weighted_degree(self) -> int:
        if not self._terms:
            raise ZeroPolynomialError("The zero polynomial has no degree.")
        degrees = {self.ring.degree_of(e) for e in self._terms}
        if len(degrees) > 1:
            raise InhomogeneousError(f"Polynomial has terms of degrees {sorted(degrees)}.")
        return degrees.pop()

    def is_homogeneous(self) -> bool:
        return len({self.ring.degree_of(e) for e in self._terms}) <= 1

    def _check_ring(self, other: "Poly"):
        if other.ring != self.ring:
            raise RingMismatchError(f"Cannot combine polynomials over {self.ring} and {other.ring}.")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check_ring(other)
            return other
        return self.ring.constant(other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        res = dict(self._terms)
        for exps, c in other._terms.items():
            res[exps] = res.get(exps, 0) + c
        return Poly._trusted(self.ring, _clean(res))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._trusted(self.ring, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = normalize_rational(c)
        if not c:
            return self.ring.zero()
        return Poly._trusted(self.ring, _clean({e: c * v for e, v in self._terms.items()}))

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check_ring(other)
        return Poly._trusted(self.ring, multiply_terms(self._terms, other._terms))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("Negative powers are not polynomials.")
        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.constant(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def partial(self, i: int) -> "Poly":
        if not 0 <= i < self.ring.nvars:
            raise IndexError(f"Variable index {i} out of range for {self.ring.nvars} variables.")
        res = {}
        for exps, c in self._terms.items():
            e = exps[i]
            if e:
                lowered = exps[:i] + (e - 1,) + exps[i + 1:]
                res[lowered] = c * e
        return Poly._trusted(self.ring, res)

    def substitute(self, f: Sequence["Poly"]) -> "Poly":
        return substitute(self, f)

    def content_ratio(self, other: "Poly") -> Optional[Rational]:
        """Returns c with self == c * other when such a rational exists, else None."""
        self._check_ring(other)
        if not other._terms:
            return None if self._terms else 0
        exps, lc = other.leading_term()
        c = normalize_rational(Fraction(self._terms.get(exps, 0)) / Fraction(lc))
        return c if self == other.scale(c) else None

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for exps, c in self.terms():
            mono = "*".join(
                f"{self.ring.prefix}{i}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e
            )
            if not mono:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(mono)
            elif c == -1:
                pieces.append(f"-{mono}")
            else:
                pieces.append(f"{c}*{mono}")
        return " + ".join(pieces).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self})"


def weighted_degree(p: Poly) -> int:
    """
    Returns the weighted degree of a homogeneous polynomial.

    Raises:
        ZeroPolynomialError: if ``p`` is zero.
        InhomogeneousError: if two terms have different weighted degrees.

    Example:
    >>> ring = WeightedRing((1, 1, 2))
    >>> x0, x1, x2 = ring.variables()
    >>> weighted_degree(x0 * x2)
    3
    """
    return p.weighted_degree()


def graded_dimension(ring: WeightedRing, delta: int) -> int:
    return ring.graded_dimension(delta)


def partial(p: Poly, i: int) -> Poly:
    return p.partial(i)


def common_scale(f: Sequence[Poly], weights: Sequence[int]) -> Optional[int]:
    """
    Returns k such that every nonzero f_i is homogeneous of degree k * weights[i]
    (None when all f_i vanish).

    Raises:
        DegreeMismatchError: when the f_i do not share a common k.
    """
    k = None
    for i, fi in enumerate(f):
        if fi.is_zero():
            continue
        try:
            d = fi.weighted_degree()
        except InhomogeneousError as e:
            raise DegreeMismatchError(f"Component {i} is not homogeneous: {e}")
        if d % weights[i]:
            raise DegreeMismatchError(f"deg f_{i} = {d} is not a multiple of e_{i} = {weights[i]}.")
        ki = d // weights[i]
        if k is None:
            k = ki
        elif ki != k:
            raise DegreeMismatchError(f"Components disagree on the map degree: {k} vs {ki} at index {i}.")
    return k


class PowerCache:
    """Memoises powers f_i^e of a fixed tuple of polynomials."""

    def __init__(self, f: Sequence[Poly]):
        self._f = tuple(f)
        self._cache: Dict[Tuple[int, int], Poly] = {}

    def power(self, i: int, e: int) -> Poly:
        key = (i, e)
        if key not in self._cache:
            if e == 0:
                self._cache[key] = self._f[i].ring.one()
            elif e == 1:
                self._cache[key] = self._f[i]
            else:
                self._cache[key] = self.power(i, e - 1) * self._f[i]
        return self._cache[key]


def substitute(a: Poly, f: Sequence[Poly], powers: Optional[PowerCache] = None) -> Poly:
    """
    Composes ``a`` with the tuple ``f``: returns a(f_0, ..., f_m).

    Parameters:
    a (Poly): polynomial over the target ring S_e.
    f (Sequence[Poly]): polynomials over the source ring, deg f_i = k * e_i.
    powers (Optional[PowerCache]): shared cache of powers of ``f`` across calls.

    Raises:
        ArityError: when ``len(f)`` differs from the number of variables of ``a``.
        DegreeMismatchError: when the f_i do not share a common k.
    """
    if len(f) != a.ring.nvars:
        raise ArityError(f"Expected {a.ring.nvars} substitutions, got {len(f)}.")
    target = f[0].ring
    for fi in f:
        if fi.ring != target:
            raise RingMismatchError("Substituted polynomials must live in one ring.")
    common_scale(f, a.ring.weights)
    powers = powers or PowerCache(f)
    acc: Dict[Exponents, Rational] = {}
    zero_exps = (0,) * target.nvars
    for exps, c in a._terms.items():
        term: Mapping[Exponents, Rational] = {zero_exps: c}
        for i, e in enumerate(exps):
            if e:
                term = multiply_terms(term, powers.power(i, e)._terms)
                if not term:
                    break
        for te, tc in term.items():
            acc[te] = acc.get(te, 0) + tc
    return Poly._trusted(target, _clean(acc))


def random_homogeneous(
    ring: WeightedRing,
    delta: int,
    seed: int = 0,
    coefficient_bound: int = DEFAULT_COEFFICIENT_BOUND,
    rng: Optional[np.random.Generator] = None,
) -> Poly:
    """
    Draws a homogeneous polynomial of weighted degree ``delta`` in which every
    monomial receives a nonzero integer coefficient from [-bound, bound].

    The draw is deterministic for a fixed seed; pass ``rng`` to continue an
    existing stream instead.
    """
    rng = rng if rng is not None else make_rng(seed)
    terms = {exps: draw_nonzero(rng, coefficient_bound) for exps in ring.monomials(delta)}
    return Poly._trusted(ring, terms)


def polys_equal_up_to_scalar(left: Iterable[Poly], right: Iterable[Poly]) -> Optional[Rational]:
    """
    Finds one rational c with left_i == c * right_i for every i, or None.
    """
    left, right = list(left), list(right)
    c = None
    for lp, rp in zip(left, right):
        if rp.is_zero():
            if not lp.is_zero():
                return None
            continue
        ci = lp.content_ratio(rp)
        if ci is None or (c is not None and ci != c):
            return None
        c = ci
    return c
