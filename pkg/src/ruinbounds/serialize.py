"""JSON model configurations.

The on-disk format mirrors the model constructors: a distribution is an object
with a "family" discriminator, an increment rule an object with a "kind"
discriminator, and a model an object holding "increments" plus optional
"rates" and "label". Unknown keys are rejected so a typo fails loudly instead
of silently reverting to a default.
"""

from __future__ import annotations

import json

from .distributions import (
    CompoundIncrement,
    Degenerate,
    FiniteDiscrete,
    Normal,
    Scaled,
    ShiftedExponential,
    TwoPoint,
    Uniform,
)
from .models import (
    ConstantRates,
    EventModel,
    ExplicitPrefix,
    ExplicitRates,
    IndexedNormal,
    IndexedTwoPoint,
    Periodic,
    PeriodicRates,
    PrefixThenTail,
    QuasiPeriodicScaled,
    RiskModel,
)

__all__ = ["ConfigError", "model_from_dict", "model_to_dict", "load_model", "dump_model"]


class ConfigError(ValueError):
    """A malformed configuration, carrying the JSON path of the offense."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


def _require_keys(d: dict, path: str, required: tuple, optional: tuple = ()) -> None:
    for key in required:
        if key not in d:
            raise ConfigError(f"missing required key {key!r}", path)
    for key in d:
        if key not in required and key not in optional:
            raise ConfigError(f"unknown key {key!r} (allowed: {sorted(required + optional)})", path)


def _number(d: dict, key: str, path: str) -> float:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {v!r}", path)
    return float(v)


# ---------------------------------------------------------------------------
# distributions

_SIMPLE_DISTS = {
    "normal": (Normal, ("mean", "variance"), ()),
    "uniform": (Uniform, ("lower", "upper"), ()),
    "two_point": (TwoPoint, ("x1", "p1", "x2"), ()),
    "shifted_exponential": (ShiftedExponential, ("rate",), ("shift",)),
    "degenerate": (Degenerate, ("value",), ()),
}


def _dist_from_dict(d, path: str):
    if not isinstance(d, dict):
        raise ConfigError(f"distribution must be an object, got {type(d).__name__}", path)
    family = d.get("family")
    if family in _SIMPLE_DISTS:
        cls, required, optional = _SIMPLE_DISTS[family]
        _require_keys(d, path, ("family",) + required, optional)
        kwargs = {k: _number(d, k, path) for k in required + optional if k in d}
        try:
            return cls(**kwargs)
        except ValueError as e:
            raise ConfigError(str(e), path) from e
    if family == "scaled":
        _require_keys(d, path, ("family", "factor", "inner"))
        return Scaled(_number(d, "factor", path), _dist_from_dict(d["inner"], path + ".inner"))
    if family == "compound":
        _require_keys(d, path, ("family", "claim", "premium_rate", "interarrival"))
        try:
            return CompoundIncrement(
                _dist_from_dict(d["claim"], path + ".claim"),
                _number(d, "premium_rate", path),
                _dist_from_dict(d["interarrival"], path + ".interarrival"),
            )
        except ValueError as e:
            raise ConfigError(str(e), path) from e
    if family == "finite_discrete":
        _require_keys(d, path, ("family", "atoms"))
        atoms = d["atoms"]
        if not isinstance(atoms, list) or not all(isinstance(a, list) and len(a) == 2 for a in atoms):
            raise ConfigError("'atoms' must be a list of [value, probability] pairs", path)
        try:
            return FiniteDiscrete(tuple((float(v), float(p)) for v, p in atoms))
        except ValueError as e:
            raise ConfigError(str(e), path) from e
    raise ConfigError(f"unknown distribution family {family!r}", path)


def _dist_to_dict(dist) -> dict:
    for family, (cls, required, optional) in _SIMPLE_DISTS.items():
        if type(dist) is cls:
            out = {"family": family}
            for k in required + optional:
                out[k] = getattr(dist, k)
            return out
    if type(dist) is Scaled:
        return {"family": "scaled", "factor": dist.factor, "inner": _dist_to_dict(dist.inner)}
    if type(dist) is CompoundIncrement:
        return {
            "family": "compound",
            "claim": _dist_to_dict(dist.claim),
            "premium_rate": dist.premium_rate,
            "interarrival": _dist_to_dict(dist.interarrival),
        }
    if type(dist) is FiniteDiscrete:
        return {"family": "finite_discrete", "atoms": [[v, p] for v, p in dist.atoms]}
    raise TypeError(f"cannot serialize distribution {dist!r}")


def _dist_list(d, key: str, path: str) -> tuple:
    seq = d[key]
    if not isinstance(seq, list) or not seq:
        raise ConfigError(f"{key!r} must be a nonempty list of distributions", path)
    return tuple(_dist_from_dict(item, f"{path}.{key}[{i}]") for i, item in enumerate(seq))


# ---------------------------------------------------------------------------
# increment rules


def _increments_from_dict(d, path: str):
    if not isinstance(d, dict):
        raise ConfigError(f"increments must be an object, got {type(d).__name__}", path)
    kind = d.get("kind")
    try:
        if kind == "explicit":
            _require_keys(d, path, ("kind", "dists"))
            return ExplicitPrefix(_dist_list(d, "dists", path))
        if kind == "periodic":
            _require_keys(d, path, ("kind", "cycle"))
            return Periodic(_dist_list(d, "cycle", path))
        if kind == "quasi_periodic":
            _require_keys(d, path, ("kind", "cycle", "scale"))
            return QuasiPeriodicScaled(_dist_list(d, "cycle", path), _number(d, "scale", path))
        if kind == "prefix_tail":
            _require_keys(d, path, ("kind", "prefix", "tail"))
            return PrefixThenTail(_dist_list(d, "prefix", path), _increments_from_dict(d["tail"], path + ".tail"))
        if kind == "indexed_normal":
            _require_keys(d, path, ("kind", "slope", "intercept"))
            return IndexedNormal(_number(d, "slope", path), _number(d, "intercept", path))
        if kind == "indexed_two_point":
            _require_keys(d, path, ("kind",))
            return IndexedTwoPoint()
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e), path) from e
    raise ConfigError(f"unknown increments kind {kind!r}", path)


def _increments_to_dict(rule) -> dict:
    if type(rule) is ExplicitPrefix:
        return {"kind": "explicit", "dists": [_dist_to_dict(x) for x in rule.dists]}
    if type(rule) is Periodic:
        return {"kind": "periodic", "cycle": [_dist_to_dict(x) for x in rule.cycle]}
    if type(rule) is QuasiPeriodicScaled:
        return {"kind": "quasi_periodic", "cycle": [_dist_to_dict(x) for x in rule.cycle], "scale": rule.scale}
    if type(rule) is PrefixThenTail:
        return {"kind": "prefix_tail", "prefix": [_dist_to_dict(x) for x in rule.prefix], "tail": _increments_to_dict(rule.tail)}
    if type(rule) is IndexedNormal:
        return {"kind": "indexed_normal", "slope": rule.slope, "intercept": rule.intercept}
    if type(rule) is IndexedTwoPoint:
        return {"kind": "indexed_two_point"}
    raise TypeError(f"cannot serialize increments {rule!r}")


# ---------------------------------------------------------------------------
# rate rules


def _rates_from_dict(d, path: str):
    if isinstance(d, (int, float)) and not isinstance(d, bool):
        return ConstantRates(float(d))
    if not isinstance(d, dict):
        raise ConfigError(f"rates must be an object or a number, got {type(d).__name__}", path)
    kind = d.get("kind")
    try:
        if kind == "constant":
            _require_keys(d, path, ("kind", "rate"))
            return ConstantRates(_number(d, "rate", path))
        if kind == "periodic":
            _require_keys(d, path, ("kind", "values"))
            return PeriodicRates(tuple(float(v) for v in d["values"]))
        if kind == "explicit":
            _require_keys(d, path, ("kind", "values"))
            return ExplicitRates(tuple(float(v) for v in d["values"]))
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e), path) from e
    raise ConfigError(f"unknown rates kind {kind!r}", path)


def _rates_to_dict(rule) -> dict:
    if type(rule) is ConstantRates:
        return {"kind": "constant", "rate": rule.rate}
    if type(rule) is PeriodicRates:
        return {"kind": "periodic", "values": list(rule.values)}
    if type(rule) is ExplicitRates:
        return {"kind": "explicit", "values": list(rule.values)}
    raise TypeError(f"cannot serialize rates {rule!r}")


# ---------------------------------------------------------------------------
# models


def model_from_dict(d: dict):
    """Build a RiskModel (or EventModel, when claim-level keys appear)."""
    if not isinstance(d, dict):
        raise ConfigError(f"model must be an object, got {type(d).__name__}")
    if "claim" in d:
        _require_keys(d, "$", ("claim", "interarrival"),
                      ("premium_rate", "reserve_interest", "premium_interest", "label"))
        try:
            return EventModel(
                claim=_increments_from_dict(d["claim"], "$.claim"),
                interarrival=_increments_from_dict(d["interarrival"], "$.interarrival"),
                premium_rate=_rates_from_dict(d.get("premium_rate", 1.0), "$.premium_rate"),
                reserve_interest=_rates_from_dict(d.get("reserve_interest", 0.0), "$.reserve_interest"),
                premium_interest=_rates_from_dict(d.get("premium_interest", 0.0), "$.premium_interest"),
                label=str(d.get("label", "")),
            )
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e)) from e
    _require_keys(d, "$", ("increments",), ("rates", "label"))
    increments = _increments_from_dict(d["increments"], "$.increments")
    rates = _rates_from_dict(d.get("rates", 0.0), "$.rates")
    try:
        return RiskModel(increments, rates=rates, label=str(d.get("label", "")))
    except ValueError as e:
        raise ConfigError(str(e)) from e


def model_to_dict(model) -> dict:
    if isinstance(model, EventModel):
        out = {
            "claim": _increments_to_dict(model.claim),
            "interarrival": _increments_to_dict(model.interarrival),
            "premium_rate": _rates_to_dict(model.premium_rate),
            "reserve_interest": _rates_to_dict(model.reserve_interest),
            "premium_interest": _rates_to_dict(model.premium_interest),
        }
        if model.label:
            out["label"] = model.label
        return out
    out = {"increments": _increments_to_dict(model.increments), "rates": _rates_to_dict(model.rates)}
    if model.label:
        out["label"] = model.label
    return out


def load_model(path: str):
    """Parse a model configuration file; errors carry position diagnostics."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from e
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e.msg} at line {e.lineno} column {e.colno}") from e
    return model_from_dict(data)


def dump_model(model, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=False)
        fh.write("\n")
