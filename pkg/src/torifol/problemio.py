"""Problem-file parsing and deterministic JSON emission.

The pair schema (format 1):

    {
      "format": 1,
      "fan": {"rank": 2, "rays": [[1,0],[0,1]], "max_cones": [[0,1]]},
      "W": {"basis": [["1", "0+1i"]]},
      "delta": {"0": "1/2"}
    }

Exact values are serialized as fraction strings; Gaussian entries use the
text form ``a/b+c/d i``.  Emission sorts keys and ends with a newline so
identical inputs round-trip byte-for-byte.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import (
    NotQCartier,
    ParseError,
    TorifolError,
    ValidationError,
)
from .fan import Fan
from .foliation import GaussianSubspace, ToricFoliatedPair
from .gaussian import GaussRat, vec_gcd


def frac_str(x) -> str:
    return str(Fraction(x))


def parse_frac(text, location):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(location, f"not a fraction: {text!r}") from exc


def load_problem(source) -> ToricFoliatedPair:
    """Parse and fully validate a pair from a path, file object, or dict."""
    data = _read_json(source)
    return pair_from_json(data)


def _read_json(source):
    if isinstance(source, dict):
        return source
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"/:{exc.lineno}:{exc.colno}", exc.msg) from exc


def fan_from_json(data, location="/fan") -> Fan:
    if not isinstance(data, dict):
        raise ParseError(location, "fan description must be an object")
    for key in ("rank", "rays", "max_cones"):
        if key not in data:
            raise ParseError(f"{location}/{key}", "missing field")
    rank = data["rank"]
    if not isinstance(rank, int) or rank < 0:
        raise ParseError(f"{location}/rank", "rank must be a nonnegative integer")
    rays = []
    for i, ray in enumerate(data["rays"]):
        loc = f"{location}/rays/{i}"
        if not isinstance(ray, list) or len(ray) != rank:
            raise ParseError(loc, f"ray must be a list of {rank} integers")
        if not all(isinstance(x, int) for x in ray):
            raise ParseError(loc, "ray entries must be integers")
        if not any(ray):
            raise ValidationError(loc, "zero vector cannot be a ray")
        if vec_gcd(ray) != 1:
            raise ValidationError(loc, f"ray {ray} is not primitive")
        rays.append(tuple(ray))
    if len(set(rays)) != len(rays):
        raise ValidationError(f"{location}/rays", "duplicate rays")
    cones = []
    for i, cone in enumerate(data["max_cones"]):
        loc = f"{location}/max_cones/{i}"
        if not isinstance(cone, list) or not all(isinstance(x, int) for x in cone):
            raise ParseError(loc, "cone must be a list of ray indices")
        for x in cone:
            if not (0 <= x < len(rays)):
                raise ValidationError(loc, f"unknown ray index {x}")
        cones.append(tuple(sorted(set(cone))))
    try:
        return Fan(rank, rays, cones)
    except TorifolError as exc:
        raise ValidationError(location, str(exc)) from exc


def pair_from_json(data) -> ToricFoliatedPair:
    if not isinstance(data, dict):
        raise ParseError("/", "problem must be a JSON object")
    if data.get("format", 1) != 1:
        raise ParseError("/format", f"unsupported format {data.get('format')}")
    if "fan" not in data:
        raise ParseError("/fan", "missing field")
    fan = fan_from_json(data["fan"])
    w_data = data.get("W", {"basis": []})
    if not isinstance(w_data, dict) or "basis" not in w_data:
        raise ParseError("/W", "expected an object with a basis")
    basis = []
    for i, row in enumerate(w_data["basis"]):
        loc = f"/W/basis/{i}"
        if not isinstance(row, list) or len(row) != fan.rank:
            raise ParseError(loc, f"basis vector must be a list of {fan.rank} entries")
        try:
            basis.append(tuple(GaussRat.parse(str(e)) for e in row))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(loc, f"bad Gaussian rational: {exc}") from exc
    W = GaussianSubspace(fan.rank, basis)
    delta = {}
    for key, value in (data.get("delta") or {}).items():
        loc = f"/delta/{key}"
        try:
            idx = int(key)
        except ValueError as exc:
            raise ParseError(loc, "delta keys are ray indices") from exc
        if not (0 <= idx < len(fan.rays)):
            raise ValidationError(loc, f"unknown ray index {idx}")
        delta[idx] = parse_frac(value, loc)
    try:
        return ToricFoliatedPair(fan, W, delta)
    except NotQCartier as exc:
        raise ValidationError(
            "/delta", f"K+Delta is not Q-Cartier on cone {exc.cone}",
            witness=exc.cone,
        ) from exc
    except TorifolError as exc:
        raise ValidationError("/", str(exc)) from exc


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def fan_to_json(fan: Fan):
    return {
        "rank": fan.rank,
        "rays": [list(r) for r in fan.rays],
        "max_cones": [list(c) for c in fan.max_cones],
    }


def pair_to_json(pair: ToricFoliatedPair):
    return {
        "format": 1,
        "fan": fan_to_json(pair.fan),
        "W": {"basis": [[str(e) for e in row] for row in pair.W.basis]},
        "delta": {str(k): frac_str(v) for k, v in sorted(pair.delta.items())},
    }


def verdict_to_json(verdict):
    out = {"value": bool(verdict)}
    if verdict.certificate is not None:
        out["witness"] = _jsonify(verdict.certificate)
    return out


def morphism_to_json(morphism):
    return {
        "target_fan": fan_to_json(morphism.target),
        "source_fan": fan_to_json(morphism.source),
        "steps": [list(s) for s in morphism.steps],
        "added_rays": [list(r) for r in morphism.added_rays],
        "identity": morphism.is_identity,
    }


def step_to_json(step):
    out = {
        "kind": step.kind,
        "class": list(step.ray_class),
        "alpha": step.alpha,
        "walls": [list(w) for w in step.walls],
        "detail": _jsonify(step.detail),
        "checks": _jsonify(step.checks),
    }
    if step.after is not None:
        out["after"] = pair_to_json(step.after)
    return out


def trace_to_json(trace):
    return {
        "format": 1,
        "result": trace.result,
        "initial": pair_to_json(trace.initial),
        "steps": [step_to_json(s) for s in trace.steps],
        "final": pair_to_json(trace.final),
        "nef_certificate": [
            {"class": list(rep), "pairing": frac_str(sign)}
            for rep, sign in trace.nef_certificate
        ],
    }


def _jsonify(obj):
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, GaussRat):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, stable separators, trailing newline."""
    return json.dumps(_jsonify(obj), sort_keys=True, indent=2) + "\n"
