"""
Zariski tangent spaces of foliations and the decomposition check for
pullback foliations.

Forms of a fixed degree are coordinatised by an explicit manifest of
(index tuple, monomial) pairs. The tangent space of ω is the kernel of
β ↦ ω ^ dβ + dω ^ β restricted to descending forms; all dimensions are cone
dimensions (the projective dimension is one less).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, List, Optional, Tuple, Union

from org.boxbuilder.folia.config import GroebnerBudget
from org.boxbuilder.folia.errors import AmbientError, DegreeMismatchError, ResourceLimitError
from org.boxbuilder.folia.exterior import DiffForm, exterior_derivative, pullback
from org.boxbuilder.folia.foliation import (
    Foliation,
    PullbackPresentation,
    RationalMapLift,
    b_ideal,
    k0_ideal,
    singular_ideal,
    special_unfolding,
    tangency_form,
)
from org.boxbuilder.folia.groebner import Ideal, codimension
from org.boxbuilder.folia.linalg import RatMatrix, SparseVector, Subspace, intersection_dim, kernel_basis, to_sparse
from org.boxbuilder.folia.models.report import Certificate
from org.boxbuilder.folia.report import Timer
from org.boxbuilder.folia.ring import Exponents, Poly, WeightedRing

_LOG = logging.getLogger(__name__)

Coordinate = Tuple[Tuple[int, ...], Exponents]


class FormCoordinates:
    """
    Coordinates on the p-forms Σ B_I dx_I of total degree δ, B_I ∈ S_{δ - Σ e_I}.

    ``euler_kernel`` is the subspace of descending forms (kernel of i_R).
    """

    def __init__(self, ring: WeightedRing, delta: int, p: int = 1):
        self.ring = ring
        self.delta = delta
        self.p = p
        manifest: List[Coordinate] = []
        if p <= ring.nvars:
            for indices in combinations(range(ring.nvars), p):
                offset = sum(ring.weights[i] for i in indices)
                manifest.extend((indices, exps) for exps in ring.monomials(delta - offset))
        self.manifest: Tuple[Coordinate, ...] = tuple(manifest)
        self._index: Dict[Coordinate, int] = {c: t for t, c in enumerate(manifest)}

    @property
    def ambient_dim(self) -> int:
        return len(self.manifest)

    def coordinates(self, u: DiffForm) -> SparseVector:
        """
        Raises:
            DegreeMismatchError: when a term of ``u`` is not a coordinate of this space.
        """
        if u.p != self.p:
            raise DegreeMismatchError(f"Expected a {self.p}-form, got a {u.p}-form.")
        out: SparseVector = {}
        for indices, poly in u.items():
            for exps, c in poly.term_map.items():
                t = self._index.get((indices, exps))
                if t is None:
                    raise DegreeMismatchError(f"Term {exps} at {indices} has the wrong total degree for δ={self.delta}.")
                out[t] = c
        return out

    def form(self, vector) -> DiffForm:
        components: Dict[Tuple[int, ...], Dict[Exponents, object]] = {}
        for t, c in to_sparse(vector, self.ambient_dim).items():
            indices, exps = self.manifest[t]
            components.setdefault(indices, {})[exps] = c
        return DiffForm(self.ring, self.p, {k: Poly(self.ring, v) for k, v in components.items()})

    def euler_matrix(self) -> RatMatrix:
        """Matrix of contraction with R into the (p-1)-form coordinates of the same degree."""
        target = form_space(self.ring, self.delta, self.p - 1)
        columns = []
        for indices, exps in self.manifest:
            col: SparseVector = {}
            for s, i in enumerate(indices):
                lifted = exps[:i] + (exps[i] + 1,) + exps[i + 1:]
                t = target._index[(indices[:s] + indices[s + 1:], lifted)]
                col[t] = col.get(t, 0) + (-1 if s % 2 else 1) * self.ring.weights[i]
            columns.append(col)
        return RatMatrix.from_columns(columns, target.ambient_dim)

    @cached_property
    def euler_kernel(self) -> Subspace:
        if self.p == 0:
            return Subspace.full(self.ambient_dim)
        kernel = kernel_basis(self.euler_matrix())
        _LOG.debug(f"Descending {self.p}-forms of degree {self.delta}: {kernel.dim} of {self.ambient_dim}")
        return kernel

    @property
    def dim(self) -> int:
        return self.euler_kernel.dim

    @cached_property
    def descending_basis(self) -> Tuple[DiffForm, ...]:
        return tuple(self.form(v) for v in self.euler_kernel.basis)

    def __repr__(self):
        return f"FormCoordinates(p={self.p}, delta={self.delta}, ambient={self.ambient_dim})"


def form_space(ring: WeightedRing, delta: int, p: int = 1) -> FormCoordinates:
    """
    Coordinatised space of p-forms of total degree δ; for p = 1 its ``dim`` is
    the dimension of the descending forms (twisted 1-forms of degree δ).

    Example:
    >>> form_space(WeightedRing((1, 1, 1)), 3).dim
    8
    """
    return _cached_form_space(ring, ring.prefix, delta, p)


# Ring equality ignores the display prefix, so the prefix is part of the key.
@lru_cache(maxsize=64)
def _cached_form_space(ring: WeightedRing, prefix: str, delta: int, p: int) -> FormCoordinates:
    return FormCoordinates(ring, delta, p)


def _omega(fol: Union[Foliation, DiffForm]) -> DiffForm:
    return fol.omega if isinstance(fol, Foliation) else fol


def deformation_matrix(fol: Union[Foliation, DiffForm]) -> RatMatrix:
    """
    Matrix of β ↦ ω ^ dβ + dω ^ β. Column c is the image of the c-th vector of
    the descending basis of degree δ; rows are the 3-form coordinates of degree 2δ.
    """
    omega = _omega(fol)
    delta = omega.total_degree()
    source = form_space(omega.ring, delta, 1)
    target = form_space(omega.ring, 2 * delta, 3)
    columns = [target.coordinates(tangency_form(omega, beta)) for beta in source.descending_basis]
    matrix = RatMatrix.from_columns(columns, target.ambient_dim)
    _LOG.info(f"Deformation matrix for δ={delta}: {matrix.rows}x{matrix.cols}, {matrix.nnz()} nonzeros")
    return matrix


def tangent_space(fol: Union[Foliation, DiffForm]) -> Subspace:
    """
    First-order deformations of ω as a subspace of the 1-form coordinates of
    degree δ. It always contains ω itself.
    """
    omega = _omega(fol)
    space = form_space(omega.ring, omega.total_degree(), 1)
    kernel = kernel_basis(deformation_matrix(omega))
    basis = space.euler_kernel.basis
    vectors = []
    for combo in kernel.basis:
        v: SparseVector = {}
        for c, weight in combo.items():
            for t, a in basis[c].items():
                v[t] = v.get(t, 0) + weight * a
        vectors.append(v)
    return Subspace.span(space.ambient_dim, vectors)


def pullback_subspace(F: RationalMapLift, alpha: Foliation, tangent_alpha: Optional[Subspace] = None) -> Subspace:
    """Span of F*β over a basis β of the tangent space of α, in the coordinates of degree kδ."""
    tangent_alpha = tangent_alpha if tangent_alpha is not None else tangent_space(alpha)
    alpha_space = form_space(alpha.ring, alpha.delta, 1)
    target = form_space(F.source, F.k * alpha.delta, 1)
    vectors = [target.coordinates(pullback(F, alpha_space.form(b), F.powers)) for b in tangent_alpha.basis]
    return Subspace.span(target.ambient_dim, vectors)


def unfolding_subspace(pres: PullbackPresentation) -> Subspace:
    """Span of the special unfoldings η(G) over the monomial tuples G = (0, ..., μ, ..., 0)."""
    F = pres.F
    target = form_space(F.source, pres.delta, 1)
    zero = F.source.zero()
    vectors = []
    for i, fi in enumerate(F.polys):
        for exps in F.source.monomials(fi.weighted_degree()):
            G = [zero] * len(F.polys)
            G[i] = F.source.monomial(exps)
            vectors.append(target.coordinates(special_unfolding(pres, G)))
    return Subspace.span(target.ambient_dim, vectors)


@dataclass
class MainTheoremReport:
    dim_T_omega: int
    dim_pullback: int
    dim_unfolding: int
    dim_sum: int
    dim_intersection: int
    decomposes: bool
    pullback_in_tangent: bool
    unfolding_in_tangent: bool
    dim_T_alpha: int
    certificates: Dict[str, Certificate] = field(default_factory=dict)
    assumptions: List[str] = field(default_factory=list)
    timings_ms: Dict[str, float] = field(default_factory=dict)

    @property
    def hypotheses_met(self) -> bool:
        return all(c.status in ("pass", "skipped") for c in self.certificates.values())

    def dims(self) -> Dict[str, int]:
        cone = {
            "T_omega": self.dim_T_omega,
            "T_alpha": self.dim_T_alpha,
            "pullback": self.dim_pullback,
            "unfolding": self.dim_unfolding,
            "sum": self.dim_sum,
            "intersection": self.dim_intersection,
        }
        projective = {f"{k}_projective": v - 1 for k, v in cone.items() if k in ("T_omega", "T_alpha")}
        return {**cone, **projective}


DEPTH_ASSUMPTION = "depth_S(I, S/K_r) >= n - m is assumed; depth is not computed"
SPLITTING_ASSUMPTION = "the tangent sheaf of alpha is assumed split with non-positive summands; it is not computed for m >= 3"
UNCERTIFIED_ASSUMPTION = "hypothesis certificates were not computed"


def stated_assumptions(certificates: Dict[str, Certificate], certify: bool = True) -> List[str]:
    """Hypotheses a report relies on without having certified them."""
    assumptions = [DEPTH_ASSUMPTION]
    if not certify:
        assumptions.append(UNCERTIFIED_ASSUMPTION)
    elif "split_tangent" in certificates and certificates["split_tangent"].status == "skipped":
        assumptions.append(SPLITTING_ASSUMPTION)
    return assumptions


def _codimension_certificate(ideal: Ideal, required: int, budget: Optional[GroebnerBudget]) -> Certificate:
    try:
        value = codimension(ideal, budget)
    except ResourceLimitError as e:
        return Certificate(status="budget_exhausted", required=f">= {required}", detail=str(e))
    return Certificate(status="pass" if value >= required else "fail", value=value, required=f">= {required}")


def _kupka_certificate(ideal: Ideal, domega: DiffForm, budget: Optional[GroebnerBudget]) -> Certificate:
    try:
        base = codimension(ideal, budget)
        raised = codimension(ideal + Ideal(ideal.ring, domega.coefficients()), budget)
    except ResourceLimitError as e:
        return Certificate(status="budget_exhausted", required="codim rises", detail=str(e))
    return Certificate(
        status="pass" if raised > base else "fail",
        value=raised,
        required=f"> {base}",
        detail="top-dimensional components of V(K_0) only",
    )


def _splitting_certificate(alpha: Foliation) -> Certificate:
    if alpha.ring.nvars != 3:
        return Certificate(status="skipped", detail="splitting type is only computed for surfaces")
    degree = sum(alpha.ring.weights) - alpha.delta
    return Certificate(
        status="pass" if degree <= 0 else "fail",
        value=degree,
        required="<= 0",
        detail="tangent sheaf is the line bundle O(Σe - δ)",
    )


def hypothesis_certificates(
    pres: PullbackPresentation, budget: Optional[GroebnerBudget] = None
) -> Dict[str, Certificate]:
    alpha = pres.alpha
    F = pres.F
    certificates = {
        "codim_sing_alpha": _codimension_certificate(singular_ideal(alpha), 2, budget),
        "codim_d_alpha": _codimension_certificate(
            Ideal(alpha.ring, exterior_derivative(alpha.omega).coefficients()), 3, budget
        ),
        "base_locus": _codimension_certificate(b_ideal(F), min(F.target.nvars, F.source.nvars), budget),
        "kupka_k0": _kupka_certificate(k0_ideal(pres), exterior_derivative(pres.omega), budget),
        "split_tangent": _splitting_certificate(alpha),
    }
    for name, certificate in certificates.items():
        if certificate.status in ("fail", "budget_exhausted"):
            _LOG.warning(f"Hypothesis certificate {name} did not pass: {certificate}")
    return certificates


def verify_main_theorem(
    F: RationalMapLift,
    alpha: Foliation,
    budget: Optional[GroebnerBudget] = None,
    certify: bool = True,
) -> MainTheoremReport:
    """
    Compares the tangent space of ω = F*α with the span of F*T_α and the
    special unfoldings. Certificates are advisory: a failed hypothesis is
    recorded and the comparison still runs.

    Raises:
        AmbientError: when n < m + 2.
    """
    if F.n < F.m + 2:
        raise AmbientError(f"Pullback decomposition needs n >= m + 2, got n = {F.n}, m = {F.m}.")
    timings: Dict[str, float] = {}
    with Timer(timings, "presentation"):
        pres = PullbackPresentation.build(F, alpha)
    with Timer(timings, "tangent_omega"):
        t_omega = tangent_space(pres.omega)
    with Timer(timings, "tangent_alpha"):
        t_alpha = tangent_space(pres.alpha)
    with Timer(timings, "pullback_span"):
        pulled = pullback_subspace(F, pres.alpha, t_alpha)
    with Timer(timings, "unfolding_span"):
        unfoldings = unfolding_subspace(pres)
    with Timer(timings, "comparison"):
        total = pulled + unfoldings
        decomposes = t_omega == total
        pullback_in = pulled.is_subspace_of(t_omega)
        unfolding_in = unfoldings.is_subspace_of(t_omega)
        overlap = intersection_dim(pulled, unfoldings)
    certificates: Dict[str, Certificate] = {}
    if certify:
        with Timer(timings, "certificates"):
            certificates = hypothesis_certificates(pres, budget)
    report = MainTheoremReport(
        dim_T_omega=t_omega.dim,
        dim_pullback=pulled.dim,
        dim_unfolding=unfoldings.dim,
        dim_sum=total.dim,
        dim_intersection=overlap,
        decomposes=decomposes,
        pullback_in_tangent=pullback_in,
        unfolding_in_tangent=unfolding_in,
        dim_T_alpha=t_alpha.dim,
        certificates=certificates,
        assumptions=stated_assumptions(certificates, certify),
        timings_ms=timings,
    )
    _LOG.info(
        f"dim T_omega = {t_omega.dim}, dim(F*T_alpha + Unf) = {total.dim}, decomposes = {decomposes}"
    )
    return report
