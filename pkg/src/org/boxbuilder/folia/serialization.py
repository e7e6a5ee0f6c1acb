"""
JSON wire formats for polynomials, forms, map lifts and foliations.

Coefficients travel as exact rational strings "p/q"; form components are keyed
by comma-joined index tuples ("0,2"). Every parse error surfaces as
``InputFormatError``.
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from org.boxbuilder.folia.errors import FoliaError, InputFormatError
from org.boxbuilder.folia.exterior import DiffForm
from org.boxbuilder.folia.foliation import Foliation, RationalMapLift, make_foliation
from org.boxbuilder.folia.models.wire import FormModel, MapModel, PolyModel, TermModel
from org.boxbuilder.folia.report import canonical_json
from org.boxbuilder.folia.ring import Poly, WeightedRing, normalize_rational, rational_to_string

_LOG = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


def _ring(weights, what: str) -> WeightedRing:
    try:
        return WeightedRing(tuple(weights))
    except ValueError as e:
        raise InputFormatError(f"Invalid weights for {what}: {e}")


def poly_to_model(p: Poly) -> PolyModel:
    return PolyModel(
        weights=list(p.ring.weights),
        terms=[TermModel(coef=rational_to_string(c), exps=list(exps)) for exps, c in p.terms()],
    )


def poly_from_model(model: PolyModel, ring: Optional[WeightedRing] = None) -> Poly:
    """
    Builds a polynomial from its wire model. When ``ring`` is given the
    declared weights must match it.
    """
    declared = _ring(model.weights, "polynomial")
    if ring is not None and declared != ring:
        raise InputFormatError(f"Polynomial weights {declared.weights} do not match ring weights {ring.weights}.")
    ring = ring or declared
    try:
        return Poly(ring, {tuple(t.exps): normalize_rational(t.coef) for t in model.terms})
    except (FoliaError, ValueError, ZeroDivisionError) as e:
        raise InputFormatError(f"Invalid polynomial: {e}")


def _indices_key(indices) -> str:
    return ",".join(str(i) for i in indices)


def _parse_indices(key: str):
    if not key:
        return ()
    try:
        return tuple(int(part) for part in key.split(","))
    except ValueError:
        raise InputFormatError(f"Component key {key!r} is not a comma-joined index tuple.")


def form_to_model(u: DiffForm, delta: Optional[int] = None, metadata: Optional[Dict[str, int]] = None) -> FormModel:
    return FormModel(
        p=u.p,
        weights=list(u.ring.weights),
        components={_indices_key(idx): poly_to_model(c) for idx, c in u.items()},
        delta=delta,
        metadata=dict(metadata or {}),
    )


def form_from_model(model: FormModel) -> DiffForm:
    ring = _ring(model.weights, "form")
    components = {}
    for key, poly in model.components.items():
        indices = _parse_indices(key)
        if len(indices) != model.p:
            raise InputFormatError(f"Component {key!r} of a {model.p}-form must carry {model.p} indices.")
        if any(i < 0 or i >= ring.nvars for i in indices):
            raise InputFormatError(f"Component {key!r} refers to a variable outside the ring.")
        components[indices] = poly_from_model(poly, ring)
    try:
        return DiffForm(ring, model.p, components)
    except (FoliaError, ValueError) as e:
        raise InputFormatError(f"Invalid form: {e}")


def foliation_to_model(fol: Foliation) -> FormModel:
    metadata = {"seed": fol.seed} if fol.seed is not None else {}
    return form_to_model(fol.omega, delta=fol.delta, metadata=metadata)


def foliation_from_model(model: FormModel) -> Foliation:
    """
    Rebuilds and validates a foliation. Validation failures (not descending,
    not integrable, ...) propagate with their own error types.
    """
    u = form_from_model(model)
    fol = make_foliation(u, seed=model.metadata.get("seed"))
    if model.delta is not None and model.delta != fol.delta:
        raise InputFormatError(f"Declared degree {model.delta} differs from the form's degree {fol.delta}.")
    return fol


def map_to_model(F: RationalMapLift) -> MapModel:
    return MapModel(k=F.k, target_weights=list(F.target.weights), polys=[poly_to_model(f) for f in F.polys])


def map_from_model(model: MapModel) -> RationalMapLift:
    target = _ring(model.target_weights, "map target")
    if not model.polys:
        raise InputFormatError("A map needs at least one component.")
    source = _ring(model.polys[0].weights, "map source")
    polys = [poly_from_model(p, source) for p in model.polys]
    F = RationalMapLift.from_polys(target, polys)
    if F.k != model.k:
        raise InputFormatError(f"Declared map degree {model.k} differs from the components' degree {F.k}.")
    return F


def dump_model(model: BaseModel) -> bytes:
    return (canonical_json(model.model_dump(mode="json", exclude_none=True)) + "\n").encode("utf-8")


def load_model(path: Path, model_type: Type[M]) -> M:
    """
    Reads and validates a JSON file.

    Raises:
        InputFormatError: when the file is missing, not JSON, or does not fit ``model_type``.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise InputFormatError(f"Cannot read {path}: {e}")
    try:
        model = model_type.model_validate_json(data)
    except ValidationError as e:
        raise InputFormatError(f"{path} is not a valid {model_type.__name__}: {e}")
    _LOG.info(f"Loaded {model_type.__name__} from {path}")
    return model


def load_form(path: Path) -> DiffForm:
    return form_from_model(load_model(path, FormModel))


def load_map(path: Path) -> RationalMapLift:
    return map_from_model(load_model(path, MapModel))
