"""
A small Buchberger engine over the rationals in weighted grevlex order.

It answers the two questions the foliation checks need: ideal membership
(through normal forms) and the dimension of the affine cone V(I) (through
independent variable sets modulo the leading monomials).
"""

import heapq
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from operator import add, sub
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from org.boxbuilder.folia import config
from org.boxbuilder.folia.config import GroebnerBudget
from org.boxbuilder.folia.errors import ResourceLimitError, RingMismatchError
from org.boxbuilder.folia.exterior import DiffForm, exterior_derivative
from org.boxbuilder.folia.models.report import KupkaReport
from org.boxbuilder.folia.ring import Exponents, Poly, Rational, WeightedRing, _clean, normalize_rational

_LOG = logging.getLogger(__name__)

TermDict = Dict[Exponents, Rational]


class Ideal:
    """Ideal of a ``WeightedRing`` given by a finite list of nonzero generators."""

    __slots__ = ("ring", "generators")

    def __init__(self, ring: WeightedRing, generators: Iterable[Poly] = ()):
        gens = []
        for g in generators:
            if g.ring != ring:
                raise RingMismatchError("Ideal generators must live in the ideal's ring.")
            if g and g not in gens:
                gens.append(g)
        self.ring = ring
        self.generators: Tuple[Poly, ...] = tuple(gens)

    @classmethod
    def unit(cls, ring: WeightedRing) -> "Ideal":
        return cls(ring, [ring.one()])

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise RingMismatchError("Cannot add ideals of different rings.")
        return Ideal(self.ring, self.generators + other.generators)

    def product(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise RingMismatchError("Cannot multiply ideals of different rings.")
        return Ideal(self.ring, [a * b for a in self.generators for b in other.generators])

    def power(self, r: int) -> "Ideal":
        if r < 0:
            raise ValueError("Ideal powers need a non-negative exponent.")
        result = Ideal.unit(self.ring)
        for _ in range(r):
            result = result.product(self)
        return result

    def __len__(self):
        return len(self.generators)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.generators == other.generators

    def __hash__(self):
        return hash((self.ring, self.generators))

    def __repr__(self):
        return f"Ideal<{', '.join(str(g) for g in self.generators)}>"


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced, monic Groebner basis sorted by increasing leading monomial."""

    ideal: Ideal
    basis: Tuple[Poly, ...]
    leading_monomials: Tuple[Exponents, ...]
    pairs_reduced: int

    @property
    def ring(self) -> WeightedRing:
        return self.ideal.ring

    def is_unit(self) -> bool:
        return any(not any(lm) for lm in self.leading_monomials)


def _divides(a: Exponents, b: Exponents) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponents, b: Exponents) -> Exponents:
    return tuple(max(x, y) for x, y in zip(a, b))


class _Reducer:
    """Multivariate division against a list of monic term dictionaries."""

    def __init__(self, ring: WeightedRing):
        self.ring = ring
        self.key = ring.sort_key
        self.polys: List[TermDict] = []
        self.lms: List[Exponents] = []

    def append(self, terms: TermDict) -> int:
        lm = max(terms, key=self.key)
        lc = Fraction(terms[lm])
        monic = {e: normalize_rational(Fraction(c) / lc) for e, c in terms.items()}
        self.polys.append(monic)
        self.lms.append(lm)
        return len(self.polys) - 1

    def reduce(self, terms: TermDict, active: Optional[Sequence[int]] = None) -> TermDict:
        active = range(len(self.polys)) if active is None else active
        f = dict(terms)
        remainder: TermDict = {}
        key = self.key
        while f:
            lm = max(f, key=key)
            c = f[lm]
            for t in active:
                g_lm = self.lms[t]
                if _divides(g_lm, lm):
                    shift = tuple(map(sub, lm, g_lm))
                    for e, v in self.polys[t].items():
                        target = tuple(map(add, e, shift))
                        nv = f.get(target, 0) - c * v
                        if nv:
                            f[target] = nv
                        else:
                            f.pop(target, None)
                    break
            else:
                remainder[lm] = c
                del f[lm]
        return _clean(remainder)


def _spoly(reducer: _Reducer, i: int, j: int) -> TermDict:
    lcm = _lcm(reducer.lms[i], reducer.lms[j])
    out: TermDict = {}
    for t, sign in ((i, 1), (j, -1)):
        shift = tuple(map(sub, lcm, reducer.lms[t]))
        for e, v in reducer.polys[t].items():
            target = tuple(map(add, e, shift))
            out[target] = out.get(target, 0) + sign * v
    return _clean(out)


def buchberger(I: Ideal, budget: Optional[GroebnerBudget] = None) -> GroebnerBasis:
    """
    Computes the reduced Groebner basis of ``I`` in weighted grevlex.

    Pairs are processed by the normal strategy (lowest weighted degree of the
    lcm first, ties by index) after Buchberger's product and chain criteria.

    Raises:
        ResourceLimitError: when the pair budget, the degree cap or the wall-clock cap is exceeded.
    """
    budget = budget or config.budget_from_env()
    return _cached_buchberger(I, budget)


@lru_cache(maxsize=256)
def _cached_buchberger(I: Ideal, budget: GroebnerBudget) -> GroebnerBasis:
    ring = I.ring
    started = time.monotonic()
    reducer = _Reducer(ring)
    basis_idx: List[int] = []
    for g in sorted(I.generators, key=lambda p: ring.sort_key(p.leading_term()[0])):
        r = reducer.reduce(g._terms, basis_idx)
        if r:
            basis_idx.append(reducer.append(r))

    queue: List[Tuple[int, int, int]] = []
    pending: Set[Tuple[int, int]] = set()

    def push(i: int, j: int):
        lcm = _lcm(reducer.lms[i], reducer.lms[j])
        heapq.heappush(queue, (ring.degree_of(lcm), j, i))
        pending.add((i, j))

    for pos, j in enumerate(basis_idx):
        for i in basis_idx[:pos]:
            push(i, j)

    reductions = 0
    while queue:
        degree, j, i = heapq.heappop(queue)
        pending.discard((i, j))
        lm_i, lm_j = reducer.lms[i], reducer.lms[j]
        if all(a == 0 or b == 0 for a, b in zip(lm_i, lm_j)):
            continue
        lcm = _lcm(lm_i, lm_j)
        if _chain_criterion(reducer, basis_idx, pending, i, j, lcm):
            continue
        if degree > budget.max_degree:
            raise ResourceLimitError(f"S-pair of degree {degree} exceeds the degree cap {budget.max_degree}.")
        reductions += 1
        if reductions > budget.max_pairs:
            raise ResourceLimitError(f"Groebner computation exceeded {budget.max_pairs} pair reductions.")
        if budget.wall_clock_ms is not None and (time.monotonic() - started) * 1000 > budget.wall_clock_ms:
            raise ResourceLimitError(f"Groebner computation exceeded {budget.wall_clock_ms} ms.")
        r = reducer.reduce(_spoly(reducer, i, j), basis_idx)
        if not r:
            continue
        new = reducer.append(r)
        for old in basis_idx:
            push(old, new)
        basis_idx.append(new)
        if reductions % 500 == 0:
            _LOG.debug(f"{reductions} pairs reduced, basis size {len(basis_idx)}, queue {len(queue)}")

    basis = _reduce_basis(reducer, basis_idx)
    _LOG.debug(f"Groebner basis of {len(I)} generators has {len(basis)} elements after {reductions} reductions")
    return GroebnerBasis(
        ideal=I,
        basis=tuple(basis),
        leading_monomials=tuple(p.leading_term()[0] for p in basis),
        pairs_reduced=reductions,
    )


def _chain_criterion(
    reducer: _Reducer, basis_idx: Sequence[int], pending: Set[Tuple[int, int]], i: int, j: int, lcm: Exponents
) -> bool:
    for k in basis_idx:
        if k in (i, j) or not _divides(reducer.lms[k], lcm):
            continue
        if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
            return True
    return False


def _reduce_basis(reducer: _Reducer, basis_idx: List[int]) -> List[Poly]:
    ring = reducer.ring
    minimal: List[int] = []
    for t in basis_idx:
        lm = reducer.lms[t]
        dominated = any(
            _divides(reducer.lms[s], lm) and (reducer.lms[s] != lm or s < t) for s in basis_idx if s != t
        )
        if not dominated:
            minimal.append(t)
    out = []
    for t in minimal:
        others = [s for s in minimal if s != t]
        lm = reducer.lms[t]
        tail = {e: c for e, c in reducer.polys[t].items() if e != lm}
        reduced_tail = reducer.reduce(tail, others) if tail else {}
        terms = dict(reduced_tail)
        terms[lm] = 1
        out.append(Poly.from_terms(ring, terms))
    out.sort(key=lambda p: ring.sort_key(p.leading_term()[0]))
    return out


def normal_form(p: Poly, G: GroebnerBasis) -> Poly:
    """Remainder of ``p`` under full division by the basis; no term is divisible by a leading monomial."""
    if p.ring != G.ring:
        raise RingMismatchError("Polynomial and basis live over different rings.")
    reducer = _Reducer(G.ring)
    for g in G.basis:
        reducer.append(dict(g._terms))
    return Poly.from_terms(G.ring, reducer.reduce(p._terms))


def membership(p: Poly, I: Union[Ideal, GroebnerBasis], budget: Optional[GroebnerBudget] = None) -> bool:
    G = I if isinstance(I, GroebnerBasis) else buchberger(I, budget)
    return normal_form(p, G).is_zero()


def cone_dimension(I: Union[Ideal, GroebnerBasis], budget: Optional[GroebnerBudget] = None) -> int:
    """
    Krull dimension of the affine cone V(I): the size of the largest set of
    variables containing the support of no leading monomial. The unit ideal
    has the empty cone, reported as -1.

    Raises:
        ResourceLimitError: propagated from the basis computation.
    """
    G = I if isinstance(I, GroebnerBasis) else buchberger(I, budget)
    nvars = G.ring.nvars
    if G.is_unit():
        return -1
    supports = [frozenset(i for i, e in enumerate(lm) if e) for lm in G.leading_monomials]
    for size in range(nvars, -1, -1):
        for subset in combinations(range(nvars), size):
            chosen = set(subset)
            if not any(s <= chosen for s in supports):
                return size
    return 0


def codimension(I: Union[Ideal, GroebnerBasis], budget: Optional[GroebnerBudget] = None) -> int:
    G = I if isinstance(I, GroebnerBasis) else buchberger(I, budget)
    return G.ring.nvars - cone_dimension(G)


def coefficient_ideal(u: DiffForm) -> Ideal:
    return Ideal(u.ring, u.coefficients())


def kupka_report(fol, budget: Optional[GroebnerBudget] = None) -> KupkaReport:
    """
    Compares the singular ideal J of ω with J + (coefficients of dω).

    ``fol`` is a ``Foliation`` or a bare homogeneous 1-form. A strict rise of
    codimension means dω does not vanish identically on any top-dimensional
    component of Sing(ω).
    """
    omega: DiffForm = getattr(fol, "omega", fol)
    J = coefficient_ideal(omega)
    J_prime = J + coefficient_ideal(exterior_derivative(omega))
    codim_sing = codimension(J, budget)
    codim_prime = codimension(J_prime, budget)
    report = KupkaReport(
        codim_sing=codim_sing,
        codim_sing_plus_domega=codim_prime,
        generically_kupka=codim_prime > codim_sing,
        top_dimensional_only=True,
    )
    _LOG.info(f"Kupka report: codim Sing = {codim_sing}, with dω = {codim_prime}")
    return report
