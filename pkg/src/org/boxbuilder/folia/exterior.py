"""
Polynomial differential forms and polynomial vector fields on the affine cone
of a weighted projective space.

A p-form is stored as a map from strictly increasing index tuples to nonzero
``Poly`` coefficients; unsorted tuples are normalised with the sign of the
sorting permutation when a form is built.
"""

import logging
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from org.boxbuilder.folia.errors import InhomogeneousError, RingMismatchError, ZeroFormError
from org.boxbuilder.folia.ring import (
    Exponents,
    Poly,
    PowerCache,
    Rational,
    WeightedRing,
    _clean,
    multiply_terms,
    normalize_rational,
    substitute,
)

if TYPE_CHECKING:
    from org.boxbuilder.folia.foliation import RationalMapLift

_LOG = logging.getLogger(__name__)

Indices = Tuple[int, ...]
TermDict = Dict[Exponents, Rational]


def sort_with_sign(indices: Sequence[int]) -> Tuple[int, Optional[Indices]]:
    """
    Sorts ``indices`` and returns the sign of the permutation, or (0, None)
    when an index repeats (dx_i ^ dx_i = 0).
    """
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def _merge_sign(left: Indices, right: Indices) -> int:
    inversions = sum(1 for i in left for j in right if i > j)
    return -1 if inversions % 2 else 1


class _FormBuilder:
    """Accumulates raw term dictionaries per index tuple before building a DiffForm."""

    def __init__(self, ring: WeightedRing, p: int):
        self.ring = ring
        self.p = p
        self._acc: Dict[Indices, TermDict] = {}

    def add_terms(self, indices: Indices, terms: Mapping[Exponents, Rational], scale: Rational = 1):
        if not terms or not scale:
            return
        bucket = self._acc.setdefault(indices, {})
        for exps, c in terms.items():
            bucket[exps] = bucket.get(exps, 0) + scale * c

    def build(self) -> "DiffForm":
        components = {}
        for indices, terms in self._acc.items():
            terms = _clean(terms)
            if terms:
                components[indices] = Poly._trusted(self.ring, terms)
        return DiffForm._trusted(self.ring, self.p, components)


class DiffForm:
    """
    A polynomial p-form on the cone. Equality is component-map equality, so
    the canonical index ordering makes ``==`` exact.
    """

    __slots__ = ("ring", "p", "_components")

    def __init__(self, ring: WeightedRing, p: int, components: Optional[Mapping[Sequence[int], Poly]] = None):
        if p < 0:
            raise ValueError(f"Form degree must be non-negative, got {p}.")
        builder = _FormBuilder(ring, p)
        for indices, poly in (components or {}).items():
            indices = tuple(indices)
            if len(indices) != p:
                raise ValueError(f"Index tuple {indices} does not have length {p}.")
            if any(not 0 <= i < ring.nvars for i in indices):
                raise IndexError(f"Index tuple {indices} out of range.")
            if not isinstance(poly, Poly):
                poly = ring.constant(poly)
            if poly.ring != ring:
                raise RingMismatchError("Form coefficients must live in the form's ring.")
            sign, key = sort_with_sign(indices)
            if sign:
                builder.add_terms(key, poly._terms, sign)
        built = builder.build()
        self.ring = ring
        self.p = p
        self._components = built._components

    @classmethod
    def _trusted(cls, ring: WeightedRing, p: int, components: Dict[Indices, Poly]) -> "DiffForm":
        u = cls.__new__(cls)
        u.ring = ring
        u.p = p
        u._components = components
        return u

    @classmethod
    def zero(cls, ring: WeightedRing, p: int) -> "DiffForm":
        return cls._trusted(ring, p, {})

    @classmethod
    def function(cls, f: Poly) -> "DiffForm":
        return cls._trusted(f.ring, 0, {(): f} if f else {})

    @classmethod
    def one_form(cls, coefficients: Sequence[Poly]) -> "DiffForm":
        """Builds Σ A_i dx_i from the coefficient tuple (A_0, ..., A_m)."""
        ring = coefficients[0].ring
        if len(coefficients) != ring.nvars:
            raise ValueError(f"Expected {ring.nvars} coefficients, got {len(coefficients)}.")
        return cls(ring, 1, {(i,): a for i, a in enumerate(coefficients) if a})

    @property
    def components(self) -> Mapping[Indices, Poly]:
        return dict(self._components)

    def component(self, indices: Sequence[int]) -> Poly:
        sign, key = sort_with_sign(indices)
        if not sign or key not in self._components:
            return self.ring.zero()
        poly = self._components[key]
        return poly if sign > 0 else -poly

    def items(self) -> List[Tuple[Indices, Poly]]:
        return sorted(self._components.items())

    def coefficients(self) -> List[Poly]:
        return [poly for _, poly in self.items()]

    def coefficient_tuple(self) -> Tuple[Poly, ...]:
        if self.p != 1:
            raise ValueError("Coefficient tuples are only defined for 1-forms.")
        return tuple(self.component((i,)) for i in range(self.ring.nvars))

    def is_zero(self) -> bool:
        return not self._components

    def __bool__(self):
        return bool(self._components)

    def _degree_set(self) -> set:
        degrees = set()
        for indices, poly in self._components.items():
            offset = sum(self.ring.weights[i] for i in indices)
            for exps in poly._terms:
                degrees.add(self.ring.degree_of(exps) + offset)
        return degrees

    def is_homogeneous(self) -> bool:
        return len(self._degree_set()) <= 1

    def total_degree(self) -> int:
        """
        Common value of poly degree + Σ weights of the differentials over all
        components.

        Raises:
            ZeroFormError: for the zero form.
            InhomogeneousError: when components disagree.
        """
        if not self._components:
            raise ZeroFormError("The zero form has no degree.")
        degrees = self._degree_set()
        if len(degrees) > 1:
            raise InhomogeneousError(f"Form has components of total degrees {sorted(degrees)}.")
        return degrees.pop()

    def _check_compatible(self, other: "DiffForm"):
        if other.ring != self.ring:
            raise RingMismatchError(f"Forms live over {self.ring} and {other.ring}.")
        if other.p != self.p:
            raise ValueError(f"Cannot add a {self.p}-form and a {other.p}-form.")

    def __add__(self, other: "DiffForm") -> "DiffForm":
        self._check_compatible(other)
        builder = _FormBuilder(self.ring, self.p)
        for form in (self, other):
            for indices, poly in form._components.items():
                builder.add_terms(indices, poly._terms)
        return builder.build()

    def __neg__(self) -> "DiffForm":
        return DiffForm._trusted(self.ring, self.p, {k: -v for k, v in self._components.items()})

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return self + (-other)

    def __mul__(self, other: Union[Poly, int, Fraction]) -> "DiffForm":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatchError("Cannot multiply a form by a polynomial of another ring.")
            if not other:
                return DiffForm.zero(self.ring, self.p)
            return DiffForm._trusted(
                self.ring, self.p, {k: v * other for k, v in self._components.items()}
            )
        c = normalize_rational(other)
        if not c:
            return DiffForm.zero(self.ring, self.p)
        return DiffForm._trusted(self.ring, self.p, {k: v.scale(c) for k, v in self._components.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        return self.ring == other.ring and self.p == other.p and self._components == other._components

    def __hash__(self):
        return hash((self.ring, self.p, frozenset(self._components.items())))

    def __str__(self):
        if not self._components:
            return "0"
        pieces = []
        for indices, poly in self.items():
            diff = "^".join(f"d{self.ring.prefix}{i}" for i in indices)
            pieces.append(f"({poly})" + (f"*{diff}" if diff else ""))
        return " + ".join(pieces)

    def __repr__(self):
        return f"DiffForm(p={self.p}, {self})"


def dx(ring: WeightedRing, i: int) -> DiffForm:
    if not 0 <= i < ring.nvars:
        raise IndexError(f"Variable index {i} out of range for {ring.nvars} variables.")
    return DiffForm._trusted(ring, 1, {(i,): ring.one()})


def volume_form(ring: WeightedRing) -> DiffForm:
    return DiffForm._trusted(ring, ring.nvars, {tuple(range(ring.nvars)): ring.one()})


def differential(f: Poly) -> DiffForm:
    return exterior_derivative(DiffForm.function(f))


class VectorField:
    """Polynomial derivation Σ X_i ∂/∂x_i on the cone."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: WeightedRing, coeffs: Sequence[Poly]):
        coeffs = tuple(c if isinstance(c, Poly) else ring.constant(c) for c in coeffs)
        if len(coeffs) != ring.nvars:
            raise ValueError(f"Expected {ring.nvars} coefficients, got {len(coeffs)}.")
        if any(c.ring != ring for c in coeffs):
            raise RingMismatchError("Vector field coefficients must live in the field's ring.")
        self.ring = ring
        self.coeffs = coeffs

    @classmethod
    def zero(cls, ring: WeightedRing) -> "VectorField":
        return cls(ring, [ring.zero()] * ring.nvars)

    @classmethod
    def coordinate(cls, ring: WeightedRing, i: int) -> "VectorField":
        """The constant field ∂/∂x_i."""
        return cls(ring, [ring.one() if j == i else ring.zero() for j in range(ring.nvars)])

    @classmethod
    def linear(cls, ring: WeightedRing, entries: Mapping[Tuple[int, int], object]) -> "VectorField":
        """
        Linear field with ``entries[(i, j)] = c`` contributing c·x_j ∂/∂x_i.
        """
        acc: List[Dict[Exponents, Rational]] = [{} for _ in range(ring.nvars)]
        for (i, j), c in entries.items():
            exps = tuple(1 if t == j else 0 for t in range(ring.nvars))
            acc[i][exps] = acc[i].get(exps, 0) + normalize_rational(c)
        return cls(ring, [Poly.from_terms(ring, terms) for terms in acc])

    def apply(self, f: Poly) -> Poly:
        """The derivation X(f) = Σ X_i ∂f/∂x_i."""
        if f.ring != self.ring:
            raise RingMismatchError("Cannot apply a vector field to a polynomial of another ring.")
        acc: TermDict = {}
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            for exps, v in multiply_terms(c._terms, f.partial(i)._terms).items():
                acc[exps] = acc.get(exps, 0) + v
        return Poly._trusted(self.ring, _clean(acc))

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def degree(self) -> int:
        """δ with every coefficient of degree δ + e_i (the zero field has no degree)."""
        degrees = {c.weighted_degree() - w for c, w in zip(self.coeffs, self.ring.weights) if c}
        if not degrees:
            raise ZeroFormError("The zero vector field has no degree.")
        if len(degrees) > 1:
            raise InhomogeneousError(f"Vector field mixes degrees {sorted(degrees)}.")
        return degrees.pop()

    def _check_ring(self, other: "VectorField"):
        if other.ring != self.ring:
            raise RingMismatchError("Vector fields live over different rings.")

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check_ring(other)
        return VectorField(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.ring, [-a for a in self.coeffs])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def __mul__(self, other) -> "VectorField":
        return VectorField(self.ring, [a * other for a in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __str__(self):
        pieces = [f"({c})*d/d{self.ring.prefix}{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(pieces) if pieces else "0"

    def __repr__(self):
        return f"VectorField({self})"


def wedge(u: DiffForm, v: DiffForm) -> DiffForm:
    """
    Exterior product of a p-form and a q-form.

    Raises:
        RingMismatchError: when the forms live over different rings.
    """
    if u.ring != v.ring:
        raise RingMismatchError(f"Cannot wedge forms over {u.ring} and {v.ring}.")
    p = u.p + v.p
    if p > u.ring.nvars:
        return DiffForm.zero(u.ring, p)
    builder = _FormBuilder(u.ring, p)
    for left, a in u._components.items():
        left_set = set(left)
        for right, b in v._components.items():
            if left_set.intersection(right):
                continue
            sign = _merge_sign(left, right)
            key = tuple(sorted(left + right))
            builder.add_terms(key, multiply_terms(a._terms, b._terms), sign)
    return builder.build()


def wedge_all(forms: Iterable[DiffForm], ring: WeightedRing) -> DiffForm:
    result = DiffForm.function(ring.one())
    for form in forms:
        result = wedge(result, form)
    return result


def exterior_derivative(u: DiffForm) -> DiffForm:
    """
    The exterior derivative d(a dx_I) = Σ_k ∂a/∂x_k dx_k ^ dx_I.

    Forms of degree above the number of variables are identically zero.
    """
    ring = u.ring
    if u.p >= ring.nvars:
        return DiffForm.zero(ring, u.p + 1)
    builder = _FormBuilder(ring, u.p + 1)
    for indices, a in u._components.items():
        for k in range(ring.nvars):
            if k in indices:
                continue
            da = a.partial(k)
            if not da:
                continue
            position = sum(1 for i in indices if i < k)
            key = indices[:position] + (k,) + indices[position:]
            builder.add_terms(key, da._terms, -1 if position % 2 else 1)
    return builder.build()


def contract(X: VectorField, u: DiffForm) -> DiffForm:
    """
    Interior product i_X u, an antiderivation of degree -1.

    Raises:
        RingMismatchError: when X and u live over different rings.
        ValueError: for 0-forms.
    """
    if X.ring != u.ring:
        raise RingMismatchError("Vector field and form live over different rings.")
    if u.p == 0:
        raise ValueError("Cannot contract a 0-form.")
    builder = _FormBuilder(u.ring, u.p - 1)
    for indices, a in u._components.items():
        for s, i in enumerate(indices):
            xi = X.coeffs[i]
            if not xi:
                continue
            key = indices[:s] + indices[s + 1:]
            builder.add_terms(key, multiply_terms(xi._terms, a._terms), -1 if s % 2 else 1)
    return builder.build()


def radial_field(ring: WeightedRing) -> VectorField:
    """R = Σ e_i x_i ∂/∂x_i, tangent to the weighted C* orbits."""
    return VectorField(ring, [ring.variable(i).scale(w) for i, w in enumerate(ring.weights)])


def descends(u: DiffForm) -> bool:
    """
    True when i_R u = 0, i.e. ``u`` represents a twisted form on the weighted
    projective space.

    Raises:
        InhomogeneousError: when ``u`` is not homogeneous.
    """
    if not u.is_homogeneous():
        raise InhomogeneousError("Descent is only defined for homogeneous forms.")
    if u.p == 0:
        return True
    return contract(radial_field(u.ring), u).is_zero()


def lie_derivative(X: VectorField, u: DiffForm) -> DiffForm:
    """Cartan's formula L_X u = i_X du + d i_X u."""
    if u.p == 0:
        return DiffForm.function(X.apply(u.component(())))
    return contract(X, exterior_derivative(u)) + exterior_derivative(contract(X, u))


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """
    Bracket of vector fields, [X, Y]_i = Y(X_i) - X(Y_i). For linear fields
    z -> Az and z -> Bz this is the linear field of AB - BA.

    Example:
    >>> ring = WeightedRing((1, 1), prefix="z")
    >>> z0, z1 = ring.variables()
    >>> lie_bracket(VectorField(ring, [z0, 0]), VectorField(ring, [0, z0]))
    VectorField((-z0)*d/dz1)
    """
    if X.ring != Y.ring:
        raise RingMismatchError("Cannot bracket vector fields over different rings.")
    return VectorField(X.ring, [Y.apply(xi) - X.apply(yi) for xi, yi in zip(X.coeffs, Y.coeffs)])


def pullback(F: "RationalMapLift", u: DiffForm, powers: Optional[PowerCache] = None) -> DiffForm:
    """
    Pulls ``u`` back along the lifted map F: coefficients are composed with F
    and every dx_i becomes dF_i.

    Raises:
        RingMismatchError: when ``u`` does not live on F's target ring.
        DegreeMismatchError: when F's components do not share a map degree.
    """
    if u.ring != F.target:
        raise RingMismatchError(f"Form lives over {u.ring}, the map targets {F.target}.")
    source = F.source
    powers = powers or PowerCache(F.polys)
    dF = [differential(fi) for fi in F.polys]
    frames: Dict[Indices, DiffForm] = {}
    builder = _FormBuilder(source, u.p)
    for indices, a in u._components.items():
        if indices not in frames:
            frames[indices] = wedge_all((dF[i] for i in indices), source)
        frame = frames[indices]
        if not frame:
            continue
        composed = substitute(a, F.polys, powers)
        if not composed:
            continue
        for key, b in frame._components.items():
            builder.add_terms(key, multiply_terms(composed._terms, b._terms))
    return builder.build()
