"""
Degree arithmetic on weighted projective planes and the catalog of foliation
families built from Lie algebras of vector fields.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, prod
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from org.boxbuilder.folia.errors import AmbientError, BracketMismatchError
from org.boxbuilder.folia.exterior import VectorField, lie_bracket
from org.boxbuilder.folia.foliation import Foliation, generic_foliation, logarithmic_form, split_form_from_fields
from org.boxbuilder.folia.linalg import RatMatrix, Subspace, solve
from org.boxbuilder.folia.models.census_row import CensusRow
from org.boxbuilder.folia.ring import DEFAULT_COEFFICIENT_BOUND, Exponents, Rational, WeightedRing, draw_nonzero, make_rng, normalize_rational

_LOG = logging.getLogger(__name__)

BracketTable = Dict[Tuple[str, str], Dict[str, Rational]]


@dataclass(frozen=True)
class WeightVector:
    weights: Tuple[int, ...]

    def __post_init__(self):
        weights = tuple(int(w) for w in self.weights)
        if not weights:
            raise ValueError("A weight vector needs at least one entry.")
        if any(w <= 0 for w in weights):
            raise ValueError(f"Weights must be strictly positive, got {weights}.")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def parse(cls, text: str) -> "WeightVector":
        return cls(tuple(int(part) for part in text.split(",") if part.strip()))

    @property
    def m(self) -> int:
        return len(self.weights) - 1

    @property
    def gcd(self) -> int:
        return reduce(gcd, self.weights)

    @property
    def total(self) -> int:
        return sum(self.weights)

    @property
    def product(self) -> int:
        return prod(self.weights)

    def reduced(self) -> Tuple["WeightVector", int]:
        """Returns (e/k, k) with k = gcd(e)."""
        k = self.gcd
        return WeightVector(tuple(w // k for w in self.weights)), k

    def ring(self, prefix: str = "x") -> WeightedRing:
        return WeightedRing(self.weights, prefix=prefix)

    def __str__(self):
        return ",".join(str(w) for w in self.weights)


def pullback_degree(delta: int, k: int) -> int:
    if k < 1:
        raise ValueError(f"Map degree must be at least 1, got {k}.")
    return k * delta


def is_good_degree(e: WeightVector, delta: int) -> bool:
    """For every i some j has e_i | δ - (e_0 + e_1 + e_2) + e_j."""
    shift = delta - e.total
    return all(any((shift + ej) % ei == 0 for ej in e.weights) for ei in e.weights)


def good_degrees(e: WeightVector, lo: Optional[int] = None, hi: int = 0) -> List[int]:
    """
    Degrees δ in [max(lo, Σe), hi] satisfying the congruence condition on the
    weighted projective plane P^2(e).

    Example:
    >>> good_degrees(WeightVector((1, 3, 5)), 9, 14)
    [9, 11, 13, 14]
    """
    if e.m != 2:
        raise ValueError(f"Good degrees are defined on weighted planes, got {len(e.weights)} weights.")
    start = e.total if lo is None else max(lo, e.total)
    return [delta for delta in range(start, hi + 1) if is_good_degree(e, delta)]


def kupka_degrees(e: WeightVector, lo: Optional[int] = None, hi: int = 0) -> List[int]:
    """Good degrees δ that are δ' + e_0·e_1·e_2 for a good δ' >= Σe: generic foliations there have only Kupka singularities."""
    good = set(good_degrees(e, None, hi))
    return [d for d in good_degrees(e, lo, hi) if d - e.product in good]


@dataclass
class LieAlgebraSpec:
    name: str
    m: int
    generators: Dict[str, VectorField]
    expected_brackets: BracketTable
    structure_constants: BracketTable = field(default_factory=dict)
    discrepancies: List[str] = field(default_factory=list)

    @property
    def ring(self) -> WeightedRing:
        return next(iter(self.generators.values())).ring

    @property
    def dimension(self) -> int:
        return len(self.generators)

    def fields(self) -> List[VectorField]:
        return list(self.generators.values())


def _field_keys(fields: Sequence[VectorField]) -> List[Tuple[int, Exponents]]:
    keys = set()
    for X in fields:
        for i, c in enumerate(X.coeffs):
            keys.update((i, exps) for exps in c.term_map)
    return sorted(keys)


def _field_vector(X: VectorField, index: Dict[Tuple[int, Exponents], int]) -> Dict[int, Rational]:
    return {index[(i, exps)]: v for i, c in enumerate(X.coeffs) for exps, v in c.term_map.items()}


def _combination(spec_fields: Dict[str, VectorField], combo: Dict[str, Rational], ring: WeightedRing) -> VectorField:
    total = VectorField.zero(ring)
    for name, c in combo.items():
        total = total + spec_fields[name] * c
    return total


def validate_lie_algebra(spec: LieAlgebraSpec) -> LieAlgebraSpec:
    """
    Computes every bracket of generators, compares it with the expected table
    and recovers the structure constants by an exact linear solve.

    Raises:
        BracketMismatchError: on a wrong bracket, a bracket leaving the span, or a wrong dimension.
    """
    names = list(spec.generators)
    fields = spec.fields()
    brackets = {(a, b): lie_bracket(spec.generators[a], spec.generators[b]) for t, a in enumerate(names) for b in names[t + 1:]}
    keys = _field_keys(fields + list(brackets.values()))
    index = {k: t for t, k in enumerate(keys)}
    columns = [_field_vector(X, index) for X in fields]
    span = Subspace.span(len(keys), columns)
    if span.dim != len(fields) or len(fields) != spec.m - 1:
        raise BracketMismatchError(f"{spec.name}: generators span dimension {span.dim}, expected {spec.m - 1}.")
    basis_matrix = RatMatrix.from_columns(columns, len(keys))
    for (a, b), value in brackets.items():
        expected = _combination(spec.generators, spec.expected_brackets.get((a, b), {}), spec.ring)
        if value != expected:
            raise BracketMismatchError(f"{spec.name}: [{a}, {b}] = {value}, expected {expected}.")
        coefficients = solve(basis_matrix, _field_vector(value, index))
        if coefficients is None:
            raise BracketMismatchError(f"{spec.name}: [{a}, {b}] leaves the span of the generators.")
        constants = {names[t]: c for t, c in enumerate(coefficients) if c}
        if constants:
            spec.structure_constants[(a, b)] = constants
    _LOG.info(f"Lie algebra {spec.name} on P^{spec.m} closes with {len(spec.structure_constants)} nonzero brackets")
    for note in spec.discrepancies:
        _LOG.warning(f"{spec.name}: {note}")
    return spec


def _shift_field(ring: WeightedRing, shift: int, coefficients: Callable[[int], Rational], start: int, stop: int, lowering: bool) -> VectorField:
    """Σ c(j) z_{j+shift} ∂_j (lowering) or Σ c(j) z_j ∂_{j+shift} (raising) for j in [start, stop]."""
    entries = {}
    for j in range(start, stop + 1):
        c = coefficients(j)
        if lowering:
            entries[(j, j + shift)] = c
        else:
            entries[(j + shift, j)] = c
    return VectorField.linear(ring, entries)


def _diagonal(ring: WeightedRing, values: Sequence[Rational]) -> VectorField:
    return VectorField.linear(ring, {(j, j): v for j, v in enumerate(values)})


def _grading_field(ring: WeightedRing, nilpotent: Sequence[VectorField], first_eigenvalue: int) -> Tuple[VectorField, List[Rational]]:
    """
    Solves for a traceless diagonal field D and scalars c_r with
    [D, Y_r] = c_r Y_r and c_1 = ``first_eigenvalue``.
    """
    nvars = ring.nvars
    unknowns = nvars + len(nilpotent)
    rows: List[Dict[int, Rational]] = []
    rhs: List[Rational] = []
    for r, Y in enumerate(nilpotent):
        for target, coeff in enumerate(Y.coeffs):
            for exps, v in coeff.term_map.items():
                source = exps.index(1)
                # [D, Y] multiplies the entry z_source ∂_target by a_target - a_source
                rows.append({target: v, source: -v, nvars + r: -v} if source != target else {nvars + r: -v})
                rhs.append(0)
    rows.append({j: 1 for j in range(nvars)})
    rhs.append(0)
    rows.append({nvars: 1})
    rhs.append(first_eigenvalue)
    solution = solve(RatMatrix.from_rows(rows, unknowns), rhs)
    if solution is None:
        raise BracketMismatchError("No diagonal field grades the nilpotent generators.")
    return _diagonal(ring, solution[:nvars]), list(solution[nvars:])


def _aff() -> LieAlgebraSpec:
    m = 3
    ring = WeightedRing.projective(m)
    Y = _shift_field(ring, 1, lambda j: 1, 0, m - 1, lowering=True)
    D, _ = _grading_field(ring, [Y], -2)
    X = D * Fraction(-1, 2)
    return LieAlgebraSpec(
        name="aff",
        m=m,
        generators={"X": X, "Y": Y},
        expected_brackets={("X", "Y"): {"Y": 1}},
    )


def _g(m: int) -> LieAlgebraSpec:
    if m < 3:
        raise ValueError(f"The family g(m) needs m >= 3, got {m}.")
    ring = WeightedRing.projective(m)
    ys = [_shift_field(ring, r, lambda j: 1, 0, m - r, lowering=True) for r in range(1, m - 1)]
    D, eigenvalues = _grading_field(ring, ys, -2)
    generators = {"X": D}
    expected: BracketTable = {}
    for r, (Y, c) in enumerate(zip(ys, eigenvalues), start=1):
        generators[f"Y{r}"] = Y
        expected[("X", f"Y{r}")] = {f"Y{r}": c}
    discrepancies = [
        "diagonal field coefficients are solved from the brackets: 2j - m",
        "normalisation [X, Y_r] = -2r Y_r is used; the variant [X, Y_r] = -2 Y_r does not close",
        "generators stop at Y_(m-2); a list ending at Y_(m-1) would have m elements",
    ]
    return LieAlgebraSpec(name=f"g({m})", m=m, generators=generators, expected_brackets=expected, discrepancies=discrepancies)


def _g6() -> LieAlgebraSpec:
    m = 6
    ring = WeightedRing.projective(m)
    y1 = _shift_field(ring, 1, lambda j: 1, 0, 5, lowering=True)
    y2 = _shift_field(ring, 2, lambda j: 4 * j * j - 16 * j + 9, 0, 4, lowering=True)
    y3 = lie_bracket(y1, y2)
    y4 = lie_bracket(y1, y3)
    D, _ = _grading_field(ring, [y1, y2, y3, y4], -2)
    generators = {"X": D, "Y1": y1, "Y2": y2, "Y3": y3, "Y4": y4}
    expected: BracketTable = {("X", f"Y{r}"): {f"Y{r}": -2 * r} for r in range(1, 5)}
    expected[("Y1", "Y2")] = {"Y3": 1}
    expected[("Y1", "Y3")] = {"Y4": 1}
    return LieAlgebraSpec(
        name="g6",
        m=m,
        generators=generators,
        expected_brackets=expected,
        discrepancies=["variant listing <X, Y_1, ..., Y_5> is not used; <X, Y_1, ..., Y_4> on P^6"],
    )


def _g7() -> LieAlgebraSpec:
    m = 7
    ring = WeightedRing.projective(m)
    y1 = _shift_field(ring, 1, lambda j: 2 - 7 * j, 1, 6, lowering=False)
    y2 = _shift_field(ring, 2, lambda j: -105 * (7 * j - 3), 1, 5, lowering=False)
    ys = [y1, y2]
    for _ in range(3):
        ys.append(lie_bracket(y1, ys[-1]))
    D = _diagonal(ring, [7 - 2 * j for j in range(m + 1)])
    generators = {"X": D, **{f"Y{r}": Y for r, Y in enumerate(ys, start=1)}}
    expected: BracketTable = {("X", f"Y{r}"): {f"Y{r}": -2 * r} for r in range(1, 6)}
    for r in range(2, 5):
        expected[("Y1", f"Y{r}")] = {f"Y{r + 1}": 1}
    expected[("Y2", "Y3")] = {"Y5": Fraction(-5, 2)}
    return LieAlgebraSpec(
        name="g7",
        m=m,
        generators=generators,
        expected_brackets=expected,
        discrepancies=["variant target P^4 is not used; the maps land in P^7"],
    )


LIE_FAMILIES: Dict[str, Callable[..., LieAlgebraSpec]] = {
    "aff": _aff,
    "g": _g,
    "g6": _g6,
    "g7": _g7,
}


def lie_family(name: str, m: Optional[int] = None) -> LieAlgebraSpec:
    """
    Builds and validates a catalog Lie algebra of linear vector fields on P^m.

    Parameters:
    name (str): one of "aff", "g", "g6", "g7".
    m (Optional[int]): ambient dimension for "g" (m >= 3); ignored otherwise.

    Raises:
        BracketMismatchError: when computed brackets disagree with the expected table.
    """
    if name not in LIE_FAMILIES:
        raise ValueError(f"Unknown Lie family {name!r}; expected one of {sorted(LIE_FAMILIES)}.")
    if name == "g":
        if m is None:
            raise ValueError("The family g needs a parameter m >= 3.")
        spec = _g(m)
    else:
        spec = LIE_FAMILIES[name]()
    return validate_lie_algebra(spec)


def lie_foliation(spec: LieAlgebraSpec, check_integrability: bool = False) -> Foliation:
    """ω(g) = i_{X_1} ⋯ i_{X_{m-1}} i_R (dz_0 ^ ⋯ ^ dz_m); the validated brackets make it integrable."""
    fol, _ = split_form_from_fields(spec.fields(), check_integrability=check_integrability)
    return fol


def seeded_residues(weights: Sequence[int], seed: int, coefficient_bound: int = DEFAULT_COEFFICIENT_BOUND) -> List[Rational]:
    """Nonzero residues λ with Σ λ_i e_i = 0, the first m drawn from the seeded generator."""
    if len(weights) < 2:
        raise ValueError("Residues need at least two weights.")
    rng = make_rng(seed)
    residues = [draw_nonzero(rng, coefficient_bound) for _ in weights[:-1]]
    last = Fraction(-sum(l * e for l, e in zip(residues, weights[:-1])), weights[-1])
    if last == 0:
        residues[0] += 1 if residues[0] > 0 else -1
        last = Fraction(-sum(l * e for l, e in zip(residues, weights[:-1])), weights[-1])
    return residues + [normalize_rational(last)]


@dataclass(frozen=True)
class CensusFamily:
    """
    One row family of the component table: its ambient bound, its table degree
    and a constructor returning the degree of an actual generic element.
    """

    name: str
    n_min: Callable[["CensusParams"], int]
    degree: Callable[["CensusParams"], int]
    construct: Callable[["CensusParams"], Tuple[int, str, str]]
    admissible: Callable[["CensusParams"], Optional[str]] = lambda p: None


@dataclass(frozen=True)
class CensusParams:
    n: int
    k: int
    weights: WeightVector
    delta: Optional[int]
    m: int
    seed: int

    @property
    def alpha_degree(self) -> int:
        return self.delta if self.delta is not None else self.weights.total


def _construct_pb(params: CensusParams) -> Tuple[int, str, str]:
    e = params.weights
    alpha = generic_foliation(e.ring(), params.alpha_degree, seed=params.seed)
    element = f"F*alpha, alpha generic of degree {alpha.delta} on P^2({e}), deg F_i = {params.k}*e_i"
    note = ""
    if alpha.delta not in kupka_degrees(e, alpha.delta, alpha.delta):
        note = f"degree {alpha.delta} is not flagged by the periodicity criterion; Kupka singularities are checked per instance"
    return params.k * alpha.delta, element, note


def _pb_degree_problem(params: CensusParams) -> Optional[str]:
    e, delta = params.weights, params.alpha_degree
    if delta < e.total or not is_good_degree(e, delta):
        return f"degree {delta} is not a good degree on P^2({e})"
    return None


def _construct_log(params: CensusParams) -> Tuple[int, str, str]:
    reduced, factor = params.weights.reduced()
    alpha = logarithmic_form(reduced.ring().variables(), seeded_residues(reduced.weights, params.seed))
    note = f"weights reduced by gcd {factor}" if factor > 1 else ""
    return factor * alpha.delta, f"sum lambda_i F^_i dF_i with deg F_i = ({params.weights})", note


def _lie_construction(factory: Callable[[CensusParams], LieAlgebraSpec]):
    def construct(params: CensusParams) -> Tuple[int, str, str]:
        spec = factory(params)
        fol = lie_foliation(spec)
        element = f"F*omega({spec.name}), F: P^n -> P^{spec.m} of degree {params.k}"
        return params.k * fol.delta, element, "; ".join(spec.discrepancies)

    return construct


CENSUS_FAMILIES: Dict[str, CensusFamily] = {
    family.name: family
    for family in (
        CensusFamily("PB", lambda p: 4, lambda p: pullback_degree(p.alpha_degree, p.k), _construct_pb, _pb_degree_problem),
        CensusFamily("Log", lambda p: p.weights.m + 2, lambda p: p.weights.total, _construct_log),
        CensusFamily("E", lambda p: 5, lambda p: pullback_degree(4, p.k), _lie_construction(lambda p: lie_family("aff"))),
        CensusFamily(
            "PB-g", lambda p: p.m + 2, lambda p: pullback_degree(p.m + 1, p.k), _lie_construction(lambda p: lie_family("g", p.m))
        ),
        CensusFamily("PB-g6", lambda p: 8, lambda p: pullback_degree(7, p.k), _lie_construction(lambda p: lie_family("g6"))),
        CensusFamily("PB-g7", lambda p: 9, lambda p: pullback_degree(8, p.k), _lie_construction(lambda p: lie_family("g7"))),
    )
}


def census_row(family: CensusFamily, params: CensusParams) -> CensusRow:
    """
    Raises:
        AmbientError: when n is below the family's bound.
    """
    n_min = family.n_min(params)
    if params.n < n_min:
        raise AmbientError(f"Family {family.name} needs n >= {n_min}, got n = {params.n}.")
    degree = family.degree(params)
    problem = family.admissible(params)
    if problem is not None:
        _LOG.warning(f"Census family {family.name}: {problem}")
        return CensusRow(
            family=family.name,
            n=params.n,
            n_min=n_min,
            k=params.k,
            degree=degree,
            status="degree_not_admissible",
            generic_element="",
            note=problem,
        )
    constructed, element, note = family.construct(params)
    status = "ok" if constructed == degree else "degree_mismatch"
    if status != "ok":
        _LOG.warning(f"Census family {family.name}: constructed degree {constructed} differs from table degree {degree}")
    return CensusRow(
        family=family.name,
        n=params.n,
        n_min=n_min,
        k=params.k,
        degree=degree,
        constructed_degree=constructed,
        status=status,
        generic_element=element,
        note=note,
    )


def component_census(
    n: int,
    k: int = 1,
    family: Optional[str] = None,
    weights: Optional[WeightVector] = None,
    delta: Optional[int] = None,
    m: int = 4,
    seed: int = 0,
) -> List[CensusRow]:
    """
    Rows of the component table for P^n: the table degree of each family next
    to the degree of the form actually constructed.

    ``weights`` (default 1,1,1) feeds PB and Log, ``delta`` the degree of the
    PB base foliation (default Σe) and ``m`` the ambient of PB-g. With
    ``family`` unset every family whose bound allows n is listed.

    Raises:
        AmbientError: when an explicitly requested family needs a larger n.
    """
    if k < 1:
        raise ValueError(f"Map degree must be at least 1, got {k}.")
    if family is not None and family not in CENSUS_FAMILIES:
        raise ValueError(f"Unknown census family {family!r}; expected one of {sorted(CENSUS_FAMILIES)}.")
    params = CensusParams(n=n, k=k, weights=weights or WeightVector((1, 1, 1)), delta=delta, m=m, seed=seed)
    if family == "PB" and params.weights.m != 2:
        raise ValueError("PB pulls back from a weighted plane: three weights expected.")
    rows = []
    for name in [family] if family else list(CENSUS_FAMILIES):
        if name == "PB" and params.weights.m != 2:
            _LOG.info("Census family PB skipped: weights do not describe a plane")
            continue
        try:
            rows.append(census_row(CENSUS_FAMILIES[name], params))
        except AmbientError:
            if family:
                raise
            _LOG.info(f"Census family {name} skipped for n = {n}")
    return rows
