"""
Implementations of the command-line commands. Each takes a ``JobConfig`` and
returns either a ``Report`` or, for ``pullback``, the serialized form itself.
"""

import hashlib
import logging
from typing import Dict, List, Optional, Tuple

from org.boxbuilder.folia.catalog import (
    WeightVector,
    component_census,
    good_degrees,
    kupka_degrees,
    seeded_residues,
)
from org.boxbuilder.folia.command_registry import register
from org.boxbuilder.folia.errors import AmbientError, DegreeMismatchError, InputFormatError
from org.boxbuilder.folia.exterior import DiffForm, descends, pullback
from org.boxbuilder.folia.foliation import (
    RationalMapLift,
    Foliation,
    generic_foliation,
    generic_map,
    is_integrable,
    logarithmic_form,
    make_foliation,
    singular_ideal,
)
from org.boxbuilder.folia.groebner import codimension, kupka_report
from org.boxbuilder.folia.models.job_config import JobConfig
from org.boxbuilder.folia.models.report import Certificate, Report
from org.boxbuilder.folia.models.wire import FormModel
from org.boxbuilder.folia.report import Timer, inputs_digest
from org.boxbuilder.folia.ring import RNG_NAME, WeightedRing
from org.boxbuilder.folia.serialization import form_to_model, load_form, load_map
from org.boxbuilder.folia.tangent import form_space, tangent_space, verify_main_theorem

_LOG = logging.getLogger(__name__)


def _digest(job: JobConfig) -> str:
    files = []
    for path in job.inputs:
        try:
            files.append(hashlib.sha256(path.read_bytes()).hexdigest())
        except OSError as e:
            raise InputFormatError(f"Cannot read {path}: {e}")
    return inputs_digest(
        {
            "command": job.command,
            "files": files,
            "seed": job.seed,
            "coefficient_bound": job.coefficient_bound,
            "budget": job.budget.model_dump(mode="json"),
            "params": job.params,
        }
    )


def _report(job: JobConfig, **fields) -> Report:
    return Report(command=job.command, seed=job.seed, rng=RNG_NAME, inputs_digest=_digest(job), **fields)


def _inputs(job: JobConfig, *names: str):
    if len(job.inputs) != len(names):
        raise InputFormatError(f"{job.command} expects {len(names)} input file(s): {', '.join(names)}.")
    return job.inputs


def _one_form(job: JobConfig) -> DiffForm:
    (path,) = _inputs(job, "form")
    u = load_form(path)
    if u.p != 1:
        raise InputFormatError(f"{job.command} expects a 1-form, got a {u.p}-form.")
    return u


def _codim_certificate(value: int, required: int) -> Certificate:
    return Certificate(status="pass" if value >= required else "fail", value=value, required=f">= {required}")


@register("check")
def check(job: JobConfig) -> Report:
    """Nonzero, descending, integrable and codim Sing >= 2; budget exhaustion propagates."""
    u = _one_form(job)
    if u.is_zero():
        return _report(job, verdicts={"nonzero": False})
    delta = u.total_degree()
    timings: Dict[str, float] = {}
    with Timer(timings, "exterior"):
        verdicts = {"nonzero": True, "descending": descends(u), "integrable": is_integrable(u)}
    with Timer(timings, "groebner"):
        codim_sing = codimension(singular_ideal(u), job.budget)
        kupka = kupka_report(u, job.budget)
    verdicts["codim_sing_ge_2"] = codim_sing >= 2
    for name, ok in verdicts.items():
        if not ok:
            _LOG.warning(f"check: {name} fails for the degree {delta} form")
    return _report(
        job,
        certificates={"codim_sing": _codim_certificate(codim_sing, 2)},
        dims={"codim_sing": codim_sing, "codim_sing_plus_domega": kupka.codim_sing_plus_domega},
        verdicts=verdicts,
        data={"delta": delta, "kupka": kupka.model_dump(mode="json")},
        timings_ms=timings,
    )


@register("pullback")
def pullback_command(job: JobConfig) -> FormModel:
    """F*α with metadata {k, delta, k_delta}."""
    map_path, form_path = _inputs(job, "map", "form")
    F = load_map(map_path)
    u = load_form(form_path)
    if u.ring != F.target:
        raise DegreeMismatchError(f"Form weights {u.ring.weights} do not match the map's target weights {F.target.weights}.")
    omega = pullback(F, u)
    delta = None if u.is_zero() else u.total_degree()
    metadata = {"k": F.k}
    if delta is not None:
        metadata.update({"delta": delta, "k_delta": F.k * delta})
    _LOG.info(f"Pulled back a degree {delta} form along a degree {F.k} map")
    return form_to_model(omega, delta=None if omega.is_zero() else F.k * delta, metadata=metadata)


@register("tangent-dim")
def tangent_dim(job: JobConfig) -> Report:
    fol = make_foliation(_one_form(job), seed=job.seed)
    timings: Dict[str, float] = {}
    with Timer(timings, "tangent"):
        T = tangent_space(fol)
    space = form_space(fol.ring, fol.delta)
    return _report(
        job,
        dims={"descending_forms": space.dim, "T_omega": T.dim, "T_omega_projective": T.dim - 1},
        verdicts={"contains_omega": T.contains(space.coordinates(fol.omega))},
        data={"delta": fol.delta, "weights": list(fol.ring.weights)},
        timings_ms=timings,
    )


def _verify_inputs(job: JobConfig) -> Tuple[RationalMapLift, Foliation]:
    if job.inputs:
        map_path, form_path = _inputs(job, "map", "form")
        return load_map(map_path), make_foliation(load_form(form_path))
    params = job.params
    n = params.get("n")
    if n is None:
        raise InputFormatError("verify-main needs --n or explicit map and form files.")
    weights: Optional[List[int]] = params.get("weights")
    m = params.get("m")
    if weights is None:
        m = 2 if m is None else m
        weights = [1] * (m + 1)
    elif m is None:
        m = len(weights) - 1
    elif m != len(weights) - 1:
        raise InputFormatError(f"--m {m} disagrees with {len(weights)} weights.")
    if n < m + 2:
        raise AmbientError(f"Pullback decomposition needs n >= m + 2, got n = {n}, m = {m}.")
    target = WeightedRing(tuple(weights))
    delta = params.get("delta") or sum(weights)
    if m == 2:
        alpha = generic_foliation(target, delta, job.seed, job.coefficient_bound, job.budget)
    else:
        if delta != sum(weights):
            raise DegreeMismatchError(f"Targets with m >= 3 use the logarithmic form of degree {sum(weights)}; pass a form file for other degrees.")
        alpha = logarithmic_form(target.variables(), seeded_residues(weights, job.seed, job.coefficient_bound))
    F = generic_map(WeightedRing.projective(n), target, params.get("k", 1), job.seed, job.coefficient_bound, job.budget)
    return F, alpha


@register("verify-main")
def verify_main(job: JobConfig) -> Report:
    F, alpha = _verify_inputs(job)
    result = verify_main_theorem(F, alpha, job.budget)
    if not result.hypotheses_met:
        _LOG.warning("Hypotheses unmet: the decomposition verdict is informative only")
    return _report(
        job,
        certificates=result.certificates,
        dims=result.dims(),
        verdicts={"decomposes": result.decomposes},
        assumptions=result.assumptions,
        data={
            "n": F.n,
            "m": F.m,
            "k": F.k,
            "delta": alpha.delta,
            "weights": list(F.target.weights),
            "map_seed": F.seed,
            "alpha_seed": alpha.seed,
            "hypotheses_met": result.hypotheses_met,
            "pullback_in_tangent": result.pullback_in_tangent,
            "unfolding_in_tangent": result.unfolding_in_tangent,
        },
        timings_ms=result.timings_ms,
    )


def _weights(job: JobConfig, default: Optional[Tuple[int, ...]] = None) -> WeightVector:
    weights = job.params.get("weights") or default
    if weights is None:
        raise InputFormatError(f"{job.command} needs --weights.")
    try:
        return WeightVector(tuple(weights))
    except ValueError as e:
        raise InputFormatError(str(e))


@register("good-degrees")
def good_degrees_command(job: JobConfig) -> Report:
    e = _weights(job)
    if e.m != 2:
        raise InputFormatError(f"good-degrees works on weighted planes, got weights {e}.")
    hi = job.params.get("max")
    if hi is None:
        raise InputFormatError("good-degrees needs --max.")
    lo = job.params.get("min")
    good = good_degrees(e, lo, hi)
    kupka = set(kupka_degrees(e, lo, hi))
    return _report(
        job,
        data={"weights": list(e.weights), "good_degrees": good, "kupka_degrees": sorted(kupka)},
        rows=[{"delta": d, "kupka": d in kupka} for d in good],
    )


@register("census")
def census(job: JobConfig) -> Report:
    params = job.params
    n = params.get("n")
    if n is None:
        raise InputFormatError("census needs --n.")
    rows = component_census(
        n,
        k=params.get("k", 1),
        family=params.get("family"),
        weights=_weights(job, (1, 1, 1)),
        delta=params.get("delta"),
        m=params.get("m") or 4,
        seed=job.seed,
    )
    return _report(
        job,
        verdicts={"degrees_match": all(row.status == "ok" for row in rows)},
        rows=[row.model_dump(mode="json") for row in rows],
    )


@register("kupka")
def kupka(job: JobConfig) -> Report:
    u = _one_form(job)
    result = kupka_report(u, job.budget)
    return _report(
        job,
        dims={"codim_sing": result.codim_sing, "codim_sing_plus_domega": result.codim_sing_plus_domega},
        verdicts={"generically_kupka": result.generically_kupka},
        data={"kupka": result.model_dump(mode="json")},
    )
