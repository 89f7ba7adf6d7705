"""Scenario documents, built-in scenarios, and trajectory files.

Scenario documents are JSON, validated against ``scenario.schema.json``.
Agent ids in documents and output files are 1-based; everything inside the
library is 0-based, and the conversion happens here only.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import analysis
from .bias import BiasSpec, make_bias
from .dynamics import Trajectory
from .errors import ValidationError
from .graph import InfluenceGraph, build_graph

SCHEMA = json.loads(resources.files(__package__).joinpath("scenario.schema.json").read_text())
DEFAULT_STEPS = 10_000


class ScenarioError(ValidationError):
    """A scenario document failed validation.

    ``errors`` lists every problem found as ``(path, message)``.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(f"{p or '<root>'}: {m}" for p, m in self.errors))


@dataclass(frozen=True)
class Tolerances:
    consensus: float = analysis.EPS_CONSENSUS
    stall: float = analysis.EPS_STALL
    window: int = analysis.WINDOW


@dataclass(frozen=True)
class EdgeSpec:
    source: int  # 1-based
    target: int  # 1-based
    weight: float
    bias: BiasSpec


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    n: int
    edges: tuple[EdgeSpec, ...]
    initial_beliefs: tuple[float, ...]
    steps: int = DEFAULT_STEPS
    tolerances: Tolerances = field(default_factory=Tolerances)

    def graph(self) -> InfluenceGraph:
        return build_graph(self.n, [(e.source - 1, e.target - 1, e.weight, e.bias) for e in self.edges])

    def initial_state(self) -> np.ndarray:
        return np.array(self.initial_beliefs, dtype=float)

    def to_dict(self) -> dict:
        def bias_doc(b: BiasSpec) -> dict:
            doc = {"kind": b.kind}
            if b.params:
                doc["params"] = b.to_params()
            return doc

        return {
            "name": self.name,
            "n": self.n,
            "edges": [
                {"from": e.source, "to": e.target, "weight": e.weight, "bias": bias_doc(e.bias)}
                for e in self.edges
            ],
            "initial_beliefs": list(self.initial_beliefs),
            "steps": self.steps,
            "tolerances": {
                "consensus": self.tolerances.consensus,
                "stall": self.tolerances.stall,
                "window": self.tolerances.window,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse and fully validate a JSON scenario document.

    Raises ScenarioError carrying every problem found; nothing is accepted
    partially.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([(f"line {exc.lineno} column {exc.colno}", f"syntax error: {exc.msg}")]) from None

    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = [(_path(e.absolute_path), e.message) for e in sorted(validator.iter_errors(doc), key=str)]
    if errors:
        raise ScenarioError(errors)

    n = doc["n"]
    edges = []
    seen: dict[tuple[int, int], int] = {}
    for k, e in enumerate(doc["edges"]):
        where = f"edges[{k}]"
        for end in ("from", "to"):
            if e[end] > n:
                errors.append((f"{where}.{end}", f"agent {e[end]} out of range 1..{n}"))
        pair = (e["from"], e["to"])
        if pair in seen:
            errors.append((where, f"duplicate edge {pair[0]}->{pair[1]} (first at edges[{seen[pair]}])"))
        else:
            seen[pair] = k
        try:
            b = make_bias(e["bias"]["kind"], e["bias"].get("params"))
        except ValidationError as exc:
            errors.append((f"{where}.bias", str(exc)))
            continue
        edges.append(EdgeSpec(e["from"], e["to"], float(e["weight"]), b))

    beliefs = doc["initial_beliefs"]
    if len(beliefs) != n:
        errors.append(("initial_beliefs", f"has {len(beliefs)} entries, expected n={n}"))
    if errors:
        raise ScenarioError(errors)

    tol = doc.get("tolerances", {})
    return ScenarioConfig(
        name=doc["name"],
        n=n,
        edges=tuple(edges),
        initial_beliefs=tuple(float(v) for v in beliefs),
        steps=doc.get("steps", DEFAULT_STEPS),
        tolerances=Tolerances(
            consensus=float(tol.get("consensus", analysis.EPS_CONSENSUS)),
            stall=float(tol.get("stall", analysis.EPS_STALL)),
            window=int(tol.get("window", analysis.WINDOW)),
        ),
    )


def load_scenario(ref: str) -> ScenarioConfig:
    """Load ``builtin:NAME`` or a path to a JSON document."""
    if ref.startswith("builtin:"):
        return get_builtin(ref[len("builtin:"):])
    try:
        text = Path(ref).read_text()
    except OSError as exc:
        raise ScenarioError([(ref, f"cannot read: {exc.strerror}")]) from None
    return parse_scenario(text)


# -- built-in scenarios ------------------------------------------------------

VACCINE_BELIEFS = (1.0, 0.9, 0.8, 0.2, 0.1, 0.0)
VACCINE_EDGES = (
    (1, 2, 0.6), (2, 1, 0.6),
    (2, 4, 0.4),
    (4, 6, 0.4),
    (1, 3, 0.4),
    (3, 5, 0.6),
    (5, 6, 0.6),
    (3, 4, 0.2), (4, 3, 0.2),
    (6, 1, 1.0),
    (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0), (4, 4, 1.0), (5, 5, 1.0), (6, 6, 1.0),
)

# Overrides keyed by edge (influencer, influenced); all other edges use conf.
_FIG3 = {
    "a": {(1, 2): "fan", (6, 1): "backf", (2, 4): "degroot", (2, 1): "degroot"},
    "b": {(1, 2): "fan", (6, 1): "backf", (3, 5): "backf", (5, 6): "degroot", (4, 6): "degroot"},
    "c": {(3, 5): "fan", (3, 4): "backf", (5, 6): "degroot", (6, 1): "degroot"},
    "d": "degroot",
    "e": "fan",
    "f": "backf",
    "g": "conf",
}


def vaccine(name: str, assign) -> ScenarioConfig:
    """The six-agent vaccine graph with a bias per edge.

    ``assign`` is one bias kind for every edge, or a dict of per-edge
    overrides with conf elsewhere.
    """
    edges = []
    for s, t, w in VACCINE_EDGES:
        kind = assign if isinstance(assign, str) else assign.get((s, t), "conf")
        edges.append(EdgeSpec(s, t, w, make_bias(kind)))
    return ScenarioConfig(name, 6, tuple(edges), VACCINE_BELIEFS)


def two_agent(name: str, kind: str, beliefs, steps: int = DEFAULT_STEPS) -> ScenarioConfig:
    b = make_bias(kind)
    return ScenarioConfig(name, 2, (EdgeSpec(1, 2, 1.0, b), EdgeSpec(2, 1, 1.0, b)), tuple(beliefs), steps)


def _builtins() -> dict[str, ScenarioConfig]:
    out = {}
    for tag, assign in _FIG3.items():
        name = f"vaccine-fig3{tag}"
        out[name] = vaccine(name, assign)
    for cfg in (
        two_agent("two-agent-discontinuous", "step_discontinuous", (1.0, 0.0)),
        two_agent("two-agent-slow", "exp_slow", (0.0, 1.0), steps=1_000_000),
        two_agent("two-agent-arctan", "arctan_malleable", (0.0, 0.001), steps=1_000),
        two_agent("two-agent-fan", "fan", (0.0, 1.0)),
        two_agent("two-agent-ins", "ins", (0.0, 1.0)),
    ):
        out[cfg.name] = cfg
    return out


BUILTINS = _builtins()


def builtin_scenarios() -> list[ScenarioConfig]:
    return list(BUILTINS.values())


def get_builtin(name: str) -> ScenarioConfig:
    try:
        return BUILTINS[name]
    except KeyError:
        raise ScenarioError([("scenario", f"no built-in scenario named {name!r}")]) from None


# -- output files ------------------------------------------------------------

def trajectory_csv(traj: Trajectory) -> str:
    """CSV text with header ``t,agent_1,...``; values at 17 significant digits."""
    buf = io.StringIO()
    n = traj.states.shape[1]
    buf.write(",".join(["t", *(f"agent_{i + 1}" for i in range(n))]) + "\n")
    for t, row in enumerate(traj.states):
        buf.write(str(t) + "," + ",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def read_trajectory_csv(text: str) -> Trajectory:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if not header or header[0] != "t":
        raise ValidationError("trajectory CSV must start with a 't' column")
    for k, row in enumerate(body):
        if int(row[0]) != k:
            raise ValidationError(f"row {k + 1}: expected t={k}, got {row[0]}")
    return Trajectory(np.array([[float(v) for v in row[1:]] for row in body]).reshape(len(body), len(header) - 1))


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def summary_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name((p.name[:-4] if p.name.endswith(".csv") else p.name) + ".summary.txt")
