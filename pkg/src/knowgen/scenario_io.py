"""JSON formats for scenarios and concept-stimulus matrices.

Files are checked against a JSON Schema first (shape and types), then the
constructors check the numerical invariants (stochastic columns, positive
counts). Either failure is reported as a :class:`FormatError` naming the
offending field.
"""

from __future__ import annotations

import json
from typing import Any

import jsonschema

from .environment import GenerativeProcess
from .genmodel import DirichletCounts, GenerativeModel, enumerate_policies, expected_model
from .knowledge import Agent, ExpansionConfig, RegimeConfig, Scenario
from .probmath import DomainError
from .semnet import ConceptStimulusMatrix

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM, "minItems": 1}
_MAT = {"type": "array", "items": _VEC, "minItems": 1}
_TENSOR = {"type": "array", "items": _MAT}

MATRIX_SCHEMA: dict = {
    "type": "object",
    "required": ["mode", "entries"],
    "properties": {
        "mode": {"enum": ["binary", "weighted"]},
        "entries": _MAT,
        "stimulus_labels": {"type": "array", "items": {"type": "string"}},
        "concept_labels": {"type": "array", "items": {"type": "string"}},
    },
}

SCENARIO_SCHEMA: dict = {
    "type": "object",
    "required": ["environment", "agent", "regime", "episodes", "seed"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "environment": {
            "type": "object",
            "required": ["A_star", "initial_state"],
            "additionalProperties": False,
            "properties": {
                "A_star": _MAT,
                "B_star": _TENSOR,
                "initial_state": {"oneOf": [{"type": "integer", "minimum": 0}, _VEC]},
                "autonomous": _MAT,
            },
        },
        "agent": {
            "type": "object",
            "required": ["C", "gamma", "horizon"],
            "additionalProperties": False,
            "properties": {
                "A": _MAT,
                "B": _TENSOR,
                "C": {"oneOf": [_VEC, _MAT]},
                "D": _VEC,
                "gamma": {"type": "number", "minimum": 0},
                "horizon": {"type": "integer", "minimum": 1},
                "policies": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                },
                "dirichlet": {
                    "type": "object",
                    "required": ["a", "b", "d"],
                    "additionalProperties": False,
                    "properties": {"a": _MAT, "b": _TENSOR, "d": _VEC},
                },
                "learning_rate": {"type": "number", "exclusiveMinimum": 0},
            },
            # without counts the model itself must be spelled out
            "anyOf": [{"required": ["dirichlet"]}, {"required": ["A", "B", "D"]}],
        },
        "regime": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "loop_I_learning": {"type": "boolean"},
                "loop_II": {"type": "boolean"},
                "loop_I_frozen_in_use": {"type": "boolean"},
            },
        },
        "episodes": {"type": "integer", "minimum": 1},
        "use_episodes": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "expansion": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "window": {"type": "integer", "minimum": 1},
                "threshold": {"type": ["number", "null"]},
                "prior": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}


class FormatError(ValueError):
    """Malformed input file: bad JSON, schema violation or invalid values."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


def _field_path(path) -> str:
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def parse_json(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", source) from None


def validate(obj: Any, schema: dict) -> None:
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise FormatError(err.message, _field_path(err.absolute_path))


def _build(field: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except DomainError as exc:
        raise FormatError(str(exc), field) from None


def matrix_from_obj(obj: Any) -> ConceptStimulusMatrix:
    """Matrix file contents, or an optimizer output holding one under ``matrix``."""
    if isinstance(obj, dict) and "matrix" in obj and "entries" not in obj:
        obj = obj["matrix"]
    validate(obj, MATRIX_SCHEMA)
    return _build("entries", ConceptStimulusMatrix.from_dict, obj)


def scenario_from_obj(obj: Any) -> Scenario:
    validate(obj, SCENARIO_SCHEMA)
    env = obj["environment"]
    process = _build(
        "environment",
        GenerativeProcess,
        env["A_star"],
        env.get("B_star", ()),
        env["initial_state"],
        env.get("autonomous"),
    )

    ag = obj["agent"]
    horizon = ag["horizon"]
    counts = None
    if "dirichlet" in ag:
        dc = ag["dirichlet"]
        counts = _build("agent.dirichlet", DirichletCounts, dc["a"], dc["b"], dc["d"])
        n_actions = counts.b.shape[0]
    else:
        n_actions = len(ag["B"])
    if "policies" in ag:
        policies = [tuple(p) for p in ag["policies"]]
    else:
        policies = _build("agent.policies", enumerate_policies, n_actions, horizon - 1)
    if counts is not None:
        # counts take precedence: the model is their Dirichlet mean
        model = _build("agent", expected_model, counts, ag["gamma"], horizon, ag["C"], policies)
    else:
        model = _build(
            "agent",
            GenerativeModel,
            ag["A"],
            ag["B"],
            ag["C"],
            ag["D"],
            ag["gamma"],
            horizon,
            tuple(policies),
        )
    agent = _build("agent", Agent, model, counts, float(ag.get("learning_rate", 1.0)))
    if process.n_stimuli != model.n_stimuli:
        raise FormatError(
            f"environment emits {process.n_stimuli} stimuli but the agent models {model.n_stimuli}",
            "agent.A",
        )

    regime = _build("regime", RegimeConfig, **obj["regime"])
    expansion = None
    if "expansion" in obj:
        expansion = ExpansionConfig(**obj["expansion"])
    return Scenario(
        process=process,
        agent=agent,
        regime=regime,
        episodes=obj["episodes"],
        use_episodes=obj.get("use_episodes", 0),
        seed=obj["seed"],
        expansion=expansion,
        name=obj.get("name", "scenario"),
    )


def scenario_to_obj(sc: Scenario) -> dict:
    gm = sc.agent.model
    agent: dict = {
        "A": gm.A.tolist(),
        "B": gm.B.tolist(),
        "C": gm.C.tolist(),
        "D": gm.D.tolist(),
        "gamma": gm.gamma,
        "horizon": gm.horizon,
        "policies": [list(p) for p in gm.policies],
        "learning_rate": sc.agent.learning_rate,
    }
    if sc.agent.counts is not None:
        c = sc.agent.counts
        agent["dirichlet"] = {"a": c.a.tolist(), "b": c.b.tolist(), "d": c.d.tolist()}
    obj = {
        "name": sc.name,
        "environment": sc.process.to_dict(),
        "agent": agent,
        "regime": sc.regime.to_dict(),
        "episodes": sc.episodes,
        "use_episodes": sc.use_episodes,
        "seed": sc.seed,
    }
    if sc.expansion is not None:
        e = sc.expansion
        obj["expansion"] = {"window": e.window, "threshold": e.threshold, "prior": e.prior}
    return obj


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
