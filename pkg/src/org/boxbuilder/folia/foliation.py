"""
Foliation families and the pullback/unfolding calculus on the affine cone.

A foliation of degree δ on a weighted projective space is carried by a
homogeneous descending integrable 1-form ω of total degree δ. Pullbacks are
presented as ω = F*α = Σ A_i(F) dF_i for a lifted map F of degrees k·e_i.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from org.boxbuilder.folia import config
from org.boxbuilder.folia.config import GroebnerBudget
from org.boxbuilder.folia.errors import (
    ArityError,
    CertificationError,
    DegenerateFamilyError,
    DegreeMismatchError,
    NotDescendingError,
    NotIntegrableError,
    ResonanceError,
    TangencyError,
    ZeroFormError,
    ZeroPolynomialError,
)
from org.boxbuilder.folia.exterior import (
    DiffForm,
    VectorField,
    contract,
    descends,
    differential,
    exterior_derivative,
    pullback,
    radial_field,
    volume_form,
    wedge,
)
from org.boxbuilder.folia.groebner import Ideal, codimension
from org.boxbuilder.folia.linalg import RatMatrix, kernel_basis
from org.boxbuilder.folia.ring import (
    Poly,
    PowerCache,
    Rational,
    WeightedRing,
    common_scale,
    make_rng,
    normalize_rational,
    polys_equal_up_to_scalar,
    random_homogeneous,
    substitute,
)

_LOG = logging.getLogger(__name__)

FormLike = Union["Foliation", DiffForm]


@dataclass(frozen=True)
class RationalMapLift:
    """
    Homogeneous lift (F_0, ..., F_m) of a rational map from P^n to the weighted
    space with weights e, deg F_i = k·e_i.
    """

    source: WeightedRing
    target: WeightedRing
    polys: Tuple[Poly, ...]
    k: int
    seed: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        polys = tuple(self.polys)
        object.__setattr__(self, "polys", polys)
        if len(polys) != self.target.nvars:
            raise ArityError(f"Map has {len(polys)} components, target has {self.target.nvars} variables.")
        for i, fi in enumerate(polys):
            if fi.ring != self.source:
                raise ArityError(f"Component {i} does not live on the source ring.")
            if fi.is_zero():
                raise ZeroPolynomialError(f"Component {i} of the map is zero.")
        scale = common_scale(polys, self.target.weights)
        if scale != self.k:
            raise DegreeMismatchError(f"Components have map degree {scale}, expected k = {self.k}.")

    @classmethod
    def from_polys(cls, target: WeightedRing, polys: Sequence[Poly], seed: Optional[int] = None) -> "RationalMapLift":
        polys = tuple(polys)
        if not polys:
            raise ArityError("A map needs at least one component.")
        k = common_scale(polys, target.weights)
        if k is None:
            raise ZeroPolynomialError("Every component of the map is zero.")
        return cls(source=polys[0].ring, target=target, polys=polys, k=k, seed=seed)

    @classmethod
    def random(
        cls,
        source: WeightedRing,
        target: WeightedRing,
        k: int,
        rng: np.random.Generator,
        coefficient_bound: int = config.DEFAULT_COEFFICIENT_BOUND,
        seed: Optional[int] = None,
    ) -> "RationalMapLift":
        polys = tuple(
            random_homogeneous(source, k * e, coefficient_bound=coefficient_bound, rng=rng) for e in target.weights
        )
        return cls(source=source, target=target, polys=polys, k=k, seed=seed)

    @property
    def n(self) -> int:
        return self.source.nvars - 1

    @property
    def m(self) -> int:
        return self.target.nvars - 1

    @cached_property
    def differentials(self) -> Tuple[DiffForm, ...]:
        return tuple(differential(fi) for fi in self.polys)

    @cached_property
    def powers(self) -> PowerCache:
        return PowerCache(self.polys)

    def compose(self, a: Poly) -> Poly:
        return substitute(a, self.polys, self.powers)

    def jacobian(self) -> List[List[Poly]]:
        return [[fi.partial(l) for l in range(self.source.nvars)] for fi in self.polys]


@dataclass(frozen=True)
class Foliation:
    ring: WeightedRing
    omega: DiffForm
    delta: int
    seed: Optional[int] = field(default=None, compare=False)

    @property
    def coefficients(self) -> Tuple[Poly, ...]:
        return self.omega.coefficient_tuple()


def is_integrable(u: DiffForm) -> bool:
    return wedge(u, exterior_derivative(u)).is_zero()


def make_foliation(u: DiffForm, seed: Optional[int] = None) -> Foliation:
    """
    Validates a homogeneous 1-form as a foliation.

    Raises:
        ZeroFormError: for the zero form.
        InhomogeneousError: when the form is not homogeneous.
        NotDescendingError: when i_R u != 0.
        NotIntegrableError: when u ^ du != 0.
    """
    if u.p != 1:
        raise ValueError(f"A foliation is given by a 1-form, got a {u.p}-form.")
    if u.is_zero():
        raise ZeroFormError("The zero form does not define a foliation.")
    delta = u.total_degree()
    if not descends(u):
        raise NotDescendingError(f"i_R u is nonzero for the degree {delta} form {u}.")
    if not is_integrable(u):
        raise NotIntegrableError(f"u ^ du is nonzero for the degree {delta} form.")
    return Foliation(ring=u.ring, omega=u, delta=delta, seed=seed)


def _as_foliation(alpha: FormLike) -> Foliation:
    return alpha if isinstance(alpha, Foliation) else make_foliation(alpha)


def logarithmic_form(f: Sequence[Poly], lambdas: Sequence[object]) -> Foliation:
    """
    ω = Σ λ_i (Π_{j≠i} f_j) df_i, the clearing of Σ λ_i df_i / f_i.

    Raises:
        ArityError: when no factors are given or the residue count differs.
        ResonanceError: when Σ λ_i deg f_i != 0 or some λ_i vanishes.
    """
    f = tuple(f)
    if not f:
        raise ArityError("A logarithmic form needs at least one factor.")
    if len(f) != len(lambdas):
        raise ArityError(f"{len(f)} polynomials but {len(lambdas)} residues.")
    lambdas = tuple(normalize_rational(l) for l in lambdas)
    if any(l == 0 for l in lambdas):
        raise ResonanceError("Residues of a logarithmic form must be nonzero.")
    degrees = [fi.weighted_degree() for fi in f]
    resonance = sum(l * d for l, d in zip(lambdas, degrees))
    if resonance != 0:
        raise ResonanceError(f"Σ λ_i deg f_i = {resonance}; the form would not descend.")
    ring = f[0].ring
    omega = DiffForm.zero(ring, 1)
    for i, (fi, li) in enumerate(zip(f, lambdas)):
        cofactor = ring.one()
        for j, fj in enumerate(f):
            if j != i:
                cofactor = cofactor * fj
        omega = omega + differential(fi) * (cofactor * li)
    return make_foliation(omega)


def logarithmic_fields(ring: WeightedRing, lambdas: Sequence[object]) -> List[VectorField]:
    """
    Diagonal fields Σ μ_j x_j ∂_j with Σ λ_j μ_j = 0 and Σ e_j μ_j = 0. Together
    with the radial field they span the abelian algebra annihilating
    Σ λ_i x̂_i dx_i.
    """
    lambdas = [normalize_rational(l) for l in lambdas]
    if len(lambdas) != ring.nvars:
        raise ArityError(f"Expected {ring.nvars} residues, got {len(lambdas)}.")
    kernel = kernel_basis(RatMatrix.from_rows([lambdas, list(ring.weights)]))
    return [
        VectorField.linear(ring, {(j, j): mu.get(j, 0) for j in range(ring.nvars)}) for mu in kernel.basis
    ]


def split_form_from_fields(
    fields: Sequence[VectorField], check_integrability: bool = True
) -> Tuple[Foliation, Tuple[Poly, ...]]:
    """
    α = i_{X_1} ⋯ i_{X_{m-1}} i_R (dx_0 ^ ⋯ ^ dx_m) with its coefficient tuple.

    Raises:
        ArityError: unless exactly m-1 fields are given.
        DegenerateFamilyError: when the contraction vanishes identically.
        NotIntegrableError: when the fields do not give an integrable form.

    Fields spanning a Lie algebra always give an integrable form; callers that
    have verified the brackets may pass ``check_integrability=False``.
    """
    fields = list(fields)
    if not fields:
        raise ArityError("At least one vector field is needed.")
    ring = fields[0].ring
    if len(fields) != ring.nvars - 2:
        raise ArityError(f"Expected {ring.nvars - 2} fields on {ring.nvars} variables, got {len(fields)}.")
    u = contract(radial_field(ring), volume_form(ring))
    for X in reversed(fields):
        u = contract(X, u)
    if u.is_zero():
        raise DegenerateFamilyError("The fields are dependent with the radial field: the contraction vanishes.")
    if check_integrability:
        fol = make_foliation(u)
    else:
        if not descends(u):
            raise NotDescendingError("Contraction of the radial volume form must descend.")
        fol = Foliation(ring=ring, omega=u, delta=u.total_degree())
    return fol, fol.coefficients


@dataclass(frozen=True)
class PullbackPresentation:
    """ω = F*α together with the composed coefficients A_i(F) and the differentials dF_i."""

    F: RationalMapLift
    alpha: Foliation
    composed: Tuple[Poly, ...]
    omega: DiffForm

    @classmethod
    def build(cls, F: RationalMapLift, alpha: FormLike) -> "PullbackPresentation":
        alpha = _as_foliation(alpha)
        if alpha.ring != F.target:
            raise ArityError(f"α lives on {alpha.ring}, F targets {F.target}.")
        composed = tuple(F.compose(a) for a in alpha.coefficients)
        omega = DiffForm.zero(F.source, 1)
        for ai, dfi in zip(composed, F.differentials):
            if ai:
                omega = omega + dfi * ai
        return cls(F=F, alpha=alpha, composed=composed, omega=omega)

    @property
    def delta(self) -> int:
        return self.F.k * self.alpha.delta

    @cached_property
    def composed_partials(self) -> Tuple[Tuple[Poly, ...], ...]:
        """(∂A_i/∂x_j)(F) for every i, j."""
        return tuple(tuple(self.F.compose(a.partial(j)) for j in range(self.F.target.nvars)) for a in self.alpha.coefficients)

    def foliation(self) -> Foliation:
        return make_foliation(self.omega)


def _check_deformation_tuple(F: RationalMapLift, G: Sequence[Poly]) -> Tuple[Poly, ...]:
    G = tuple(G)
    if len(G) != F.target.nvars:
        raise ArityError(f"Expected {F.target.nvars} deformation components, got {len(G)}.")
    for i, (gi, fi) in enumerate(zip(G, F.polys)):
        if gi.ring != F.source:
            raise DegreeMismatchError(f"G_{i} does not live on the source ring.")
        if gi and (not gi.is_homogeneous() or gi.weighted_degree() != fi.weighted_degree()):
            raise DegreeMismatchError(f"deg G_{i} must equal deg F_{i} = {fi.weighted_degree()}.")
    return G


def special_unfolding(pres: PullbackPresentation, G: Sequence[Poly], validate: bool = False) -> DiffForm:
    """
    η = Σ A_i(F) dG_i + Σ_i (Σ_j ∂A_i/∂x_j(F) G_j) dF_i, the tangent vector of
    (F + εG)*α.

    Raises:
        DegreeMismatchError: when deg G_i != deg F_i for a nonzero G_i.
        TangencyError: with ``validate`` set, when ω ^ dη + dω ^ η != 0.
    """
    G = _check_deformation_tuple(pres.F, G)
    source = pres.F.source
    eta = DiffForm.zero(source, 1)
    if all(g.is_zero() for g in G):
        return eta
    for ai, gi in zip(pres.composed, G):
        if ai and gi:
            eta = eta + differential(gi) * ai
    for i, dfi in enumerate(pres.F.differentials):
        acc = source.zero()
        for j, gj in enumerate(G):
            if gj:
                pij = pres.composed_partials[i][j]
                if pij:
                    acc = acc + pij * gj
        if acc:
            eta = eta + dfi * acc
    if validate and not is_tangent(pres.omega, eta):
        raise TangencyError("The special unfolding is not a tangent vector of ω.")
    return eta


def tangency_form(omega: DiffForm, eta: DiffForm) -> DiffForm:
    """ω ^ dη + dω ^ η, the first-order obstruction."""
    return wedge(omega, exterior_derivative(eta)) + wedge(exterior_derivative(omega), eta)


def is_tangent(omega: DiffForm, eta: DiffForm) -> bool:
    return tangency_form(omega, eta).is_zero()


def first_order_pullback(
    F: RationalMapLift, G: Sequence[Poly], alpha: FormLike, beta: Optional[DiffForm] = None
) -> Tuple[DiffForm, DiffForm]:
    """
    The ε-expansion of (F + εG)*(α + εβ): returns (F*α, F*β + η(G)).

    Raises:
        DegreeMismatchError: when β or G does not have the degrees of α or F.
    """
    pres = PullbackPresentation.build(F, alpha)
    beta = beta if beta is not None else DiffForm.zero(F.target, 1)
    if beta:
        if beta.total_degree() != pres.alpha.delta:
            raise DegreeMismatchError(f"β has degree {beta.total_degree()}, α has degree {pres.alpha.delta}.")
        if not descends(beta):
            raise NotDescendingError("β must descend.")
    eta = pullback(F, beta, F.powers) + special_unfolding(pres, G)
    return pres.omega, eta


def poly_determinant(matrix: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a square polynomial matrix by memoised Laplace expansion along rows."""
    size = len(matrix)
    if size == 0:
        raise ValueError("Empty matrix.")
    ring = matrix[0][0].ring
    memo: Dict[Tuple[int, FrozenSet[int]], Poly] = {}

    def minor(row: int, cols: FrozenSet[int]) -> Poly:
        if row == size:
            return ring.one()
        key = (row, cols)
        if key not in memo:
            total = ring.zero()
            for position, c in enumerate(sorted(cols)):
                entry = matrix[row][c]
                if not entry:
                    continue
                sub = minor(row + 1, cols - {c})
                if sub:
                    term = entry * sub
                    total = total - term if position % 2 else total + term
            memo[key] = total
        return memo[key]

    return minor(0, frozenset(range(size)))


@dataclass(frozen=True)
class AcmReport:
    euler_relation: bool
    field_relations: Tuple[bool, ...]
    minors_scalar: Optional[Rational]
    signed_minors: Tuple[Poly, ...]

    @property
    def minors_match(self) -> bool:
        return self.minors_scalar is not None and self.minors_scalar != 0

    @property
    def passed(self) -> bool:
        return self.euler_relation and all(self.field_relations) and self.minors_match


def relation_matrix(pres: PullbackPresentation, fields: Sequence[VectorField]) -> List[List[Poly]]:
    """Rows (e_0 F_0, ..., e_m F_m) and (B^j_0(F), ..., B^j_m(F)) for each field X_j."""
    F = pres.F
    rows = [[fi.scale(e) for fi, e in zip(F.polys, F.target.weights)]]
    for X in fields:
        rows.append([F.compose(b) for b in X.coeffs])
    return rows


def jacobian_relations_check(pres: PullbackPresentation, fields: Sequence[VectorField]) -> AcmReport:
    """
    Checks that the composed coefficients A_i(F) are killed by every row of the
    relation matrix M and compares them with its signed maximal minors.
    """
    M = relation_matrix(pres, fields)
    A = pres.composed
    source = pres.F.source

    def pairing(row: Sequence[Poly]) -> bool:
        total = source.zero()
        for b, a in zip(row, A):
            if a and b:
                total = total + b * a
        return total.is_zero()

    euler = pairing(M[0])
    field_checks = tuple(pairing(row) for row in M[1:])
    ncols = len(A)
    minors = []
    for i in range(ncols):
        kept = [c for c in range(ncols) if c != i]
        det = poly_determinant([[row[c] for c in kept] for row in M])
        minors.append(-det if i % 2 else det)
    scalar = polys_equal_up_to_scalar(A, minors)
    report = AcmReport(
        euler_relation=euler,
        field_relations=field_checks,
        minors_scalar=scalar,
        signed_minors=tuple(minors),
    )
    _LOG.info(f"Relation check: Euler {euler}, fields {field_checks}, minors scalar {scalar}")
    return report


def _coefficients_of(fol: FormLike) -> List[Poly]:
    omega = fol.omega if isinstance(fol, Foliation) else fol
    return omega.coefficients()


def singular_ideal(fol: FormLike) -> Ideal:
    omega = fol.omega if isinstance(fol, Foliation) else fol
    return Ideal(omega.ring, _coefficients_of(fol))


def k0_ideal(pres: PullbackPresentation) -> Ideal:
    """K_0 = <A_0(F), ..., A_m(F)>."""
    return Ideal(pres.F.source, pres.composed)


def b_ideal(pres: Union[PullbackPresentation, RationalMapLift]) -> Ideal:
    """B(F) = <F_0, ..., F_m>, the ideal of the base locus."""
    F = pres.F if isinstance(pres, PullbackPresentation) else pres
    return Ideal(F.source, F.polys)


def kr_ideal(pres: PullbackPresentation, r: int) -> Ideal:
    """K_r = K_0 · B(F)^r, generated by the products of generators (no reduction)."""
    return k0_ideal(pres).product(b_ideal(pres).power(r))


def jacobian_ideal(F: RationalMapLift) -> Ideal:
    """The ideal I of maximal minors of the Jacobian matrix (∂F_i/∂z_l)."""
    jac = F.jacobian()
    size = len(jac)
    ncols = F.source.nvars
    if size > ncols:
        return Ideal(F.source, [])
    minors = [poly_determinant([[row[c] for c in cols] for row in jac]) for cols in combinations(range(ncols), size)]
    return Ideal(F.source, minors)


def random_descending_form(
    ring: WeightedRing,
    delta: int,
    rng: np.random.Generator,
    coefficient_bound: int = config.DEFAULT_COEFFICIENT_BOUND,
) -> DiffForm:
    """
    i_R of a random 2-form of total degree δ. Contraction with R maps the
    2-forms of degree δ onto the descending 1-forms of degree δ, so every
    descending form can occur.
    """
    components = {}
    for i, j in combinations(range(ring.nvars), 2):
        d = delta - ring.weights[i] - ring.weights[j]
        poly = random_homogeneous(ring, d, coefficient_bound=coefficient_bound, rng=rng)
        if poly:
            components[(i, j)] = poly
    return contract(radial_field(ring), DiffForm(ring, 2, components))


def _certified_codimension(ideal: Ideal, required: int, budget: Optional[GroebnerBudget]) -> bool:
    # ResourceLimitError propagates; exhausting the budget ends the search.
    return codimension(ideal, budget) >= required


def generic_map(
    source: WeightedRing,
    target: WeightedRing,
    k: int,
    seed: int = 0,
    coefficient_bound: int = config.DEFAULT_COEFFICIENT_BOUND,
    budget: Optional[GroebnerBudget] = None,
) -> RationalMapLift:
    """
    Seeded random lift certified to have a base locus of the expected
    codimension, min(m+1, n+1). Failed draws are repeated with seed+1, seed+2, ...

    Raises:
        CertificationError: after ``MAX_CERTIFICATION_RETRIES`` failed draws.
        ResourceLimitError: when a certificate exhausts the Groebner budget.
    """
    expected = min(target.nvars, source.nvars)
    for attempt in range(config.MAX_CERTIFICATION_RETRIES):
        draw_seed = seed + attempt
        F = RationalMapLift.random(source, target, k, make_rng(draw_seed), coefficient_bound, seed=draw_seed)
        if _certified_codimension(b_ideal(F), expected, budget):
            _LOG.info(f"Generic map certified with seed {draw_seed}")
            return F
        _LOG.warning(f"Map drawn with seed {draw_seed} has a degenerate base locus; re-drawing")
    raise CertificationError(f"No certified generic map after {config.MAX_CERTIFICATION_RETRIES} draws from seed {seed}.")


def generic_foliation(
    ring: WeightedRing,
    delta: int,
    seed: int = 0,
    coefficient_bound: int = config.DEFAULT_COEFFICIENT_BOUND,
    budget: Optional[GroebnerBudget] = None,
    require_kupka: bool = False,
) -> Foliation:
    """
    Seeded random foliation of degree δ with codim Sing >= 2 (and, with
    ``require_kupka``, coefficients of dω vanishing in codimension >= 3).

    Every descending 1-form in three variables is integrable; on larger rings
    a random draw is almost never integrable and ends in ``CertificationError``.

    Raises:
        CertificationError: after ``MAX_CERTIFICATION_RETRIES`` rejected draws.
        ResourceLimitError: when a certificate exhausts the Groebner budget.
    """
    for attempt in range(config.MAX_CERTIFICATION_RETRIES):
        draw_seed = seed + attempt
        u = random_descending_form(ring, delta, make_rng(draw_seed), coefficient_bound)
        try:
            fol = make_foliation(u, seed=draw_seed)
        except (ZeroFormError, NotIntegrableError) as e:
            _LOG.warning(f"Form drawn with seed {draw_seed} rejected: {e}")
            continue
        ok = _certified_codimension(singular_ideal(fol), 2, budget)
        if ok and require_kupka:
            ok = _certified_codimension(Ideal(ring, exterior_derivative(fol.omega).coefficients()), 3, budget)
        if ok:
            _LOG.info(f"Generic foliation of degree {delta} certified with seed {draw_seed}")
            return fol
        _LOG.warning(f"Form drawn with seed {draw_seed} failed the codimension certificate; re-drawing")
    raise CertificationError(
        f"No certified foliation of degree {delta} after {config.MAX_CERTIFICATION_RETRIES} draws from seed {seed}."
    )


def rational_pencil(f: Poly, g: Poly) -> Foliation:
    """
    ω = a·f·dg - b·g·df for deg f = a, deg g = b: the foliation by the level
    sets of f^b / g^a.
    """
    if f.is_zero() or g.is_zero():
        raise ZeroPolynomialError("Pencil members must be nonzero.")
    a, b = f.weighted_degree(), g.weighted_degree()
    omega = differential(g) * f.scale(a) - differential(f) * g.scale(b)
    return make_foliation(omega)
