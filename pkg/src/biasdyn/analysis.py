"""Consensus detection, consensus prediction, and structural checks of the
update on concrete states.

Detection is empirical and bounded: a run is ``consensus`` once the gap
between the most and least convinced agents drops below a tolerance,
``no_consensus`` only on positive evidence (an exact cycle, or a gap that has
stopped moving), and ``undecided`` otherwise. Slow convergence is never
reported as failure.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory, as_state, simulate, step_many, update, update_unclamped
from .errors import PreconditionUnmet, ValidationError
from .graph import InfluenceGraph, is_strongly_connected, strongly_connected_components

EPS_CONSENSUS = 1e-6
EPS_STALL = 1e-12
WINDOW = 100
EPS_SOURCE = 1e-4
BOUNDS_SLACK = 1e-12

GUARANTEED = "guaranteed_consensus"
CONDITIONAL = "conditional_on_sources"
NO_GUARANTEE = "no_guarantee"


@dataclass(frozen=True)
class Prediction:
    """What the consensus theorems say about a graph.

    ``violations`` holds ``(kind, edge, detail)`` with 0-based edge ids, or
    ``edge=None`` for graph-level issues. ``source_limits`` is filled when
    initial beliefs were supplied for a graph that is not strongly connected.
    """

    kind: str
    violations: tuple = ()
    source_limits: tuple | None = None
    sources_agree: bool | None = None

    def reasons(self, base: int = 1) -> list[str]:
        out = []
        if self.kind == GUARANTEED:
            out.append("strongly connected and every bias is continuous and in R")
        elif self.kind == CONDITIONAL:
            out.append("every bias is continuous and in R but the graph is not strongly connected: "
                       "consensus holds iff all source components reach a common value")
        for kind, edge, detail in self.violations:
            where = "" if edge is None else f"edge {edge[0] + base}->{edge[1] + base}: "
            out.append(f"{kind}: {where}{detail}")
        if self.source_limits is not None:
            for comp, limit in self.source_limits:
                members = ",".join(str(a + base) for a in sorted(comp))
                shown = "undecided" if limit is None else f"{limit:.10g}"
                out.append(f"source component {{{members}}} -> {shown}")
            if self.sources_agree is not None:
                out.append("source limits agree" if self.sources_agree else "source limits differ")
        return out

    def __str__(self) -> str:
        return "\n".join([self.kind, *("  " + r for r in self.reasons())])


@dataclass(frozen=True)
class ConvergenceReport:
    verdict: str
    value: float | None
    final_gap: float
    steps_used: int
    envelope: tuple[float, float]
    reason: str = ""
    prediction: Prediction | None = field(default=None, compare=False)

    @property
    def label(self) -> str:
        return f"consensus({self.value:.17g})" if self.verdict == "consensus" else self.verdict

    def __str__(self) -> str:
        lines = [
            f"verdict: {self.label}",
            f"reason: {self.reason}",
            f"steps: {self.steps_used}",
            f"final gap: {self.final_gap:.17g}",
            f"envelope: [{self.envelope[0]:.17g}, {self.envelope[1]:.17g}]",
        ]
        if self.prediction is not None:
            lines.append(f"prediction: {self.prediction.kind}")
            lines.extend("  " + r for r in self.prediction.reasons())
        return "\n".join(lines)


def _check_tolerances(eps_consensus, eps_stall, window):
    if eps_consensus <= 0 or eps_stall <= 0:
        raise ValidationError("tolerances must be positive")
    if window < 1:
        raise ValidationError("window must be >= 1")


def _verdict(states: np.ndarray, steps_used: int, eps_consensus, eps_stall, window) -> ConvergenceReport:
    final = states[-1]
    lo, hi = float(final.min()), float(final.max())
    gap = hi - lo
    common = dict(final_gap=gap, steps_used=steps_used, envelope=(lo, hi))
    if gap <= eps_consensus:
        return ConvergenceReport("consensus", (lo + hi) / 2, reason=f"gap <= {eps_consensus:g}", **common)
    tail = states[-(window + 1):]
    for back in range(1, len(tail)):
        if np.array_equal(tail[-1 - back], final):
            what = "fixed point" if back == 1 else f"exact cycle of period {back}"
            return ConvergenceReport("no_consensus", None, reason=what, **common)
    if len(states) > window:
        before = states[-1 - window]
        moved = abs(gap - float(before.max() - before.min()))
        if moved < eps_stall:
            return ConvergenceReport(
                "no_consensus", None,
                reason=f"heuristic: gap moved {moved:.3g} < {eps_stall:g} over {window} steps", **common,
            )
    return ConvergenceReport("undecided", None, reason="budget exhausted before a verdict", **common)


def detect_convergence(
    traj: Trajectory,
    eps_consensus: float = EPS_CONSENSUS,
    eps_stall: float = EPS_STALL,
    window: int = WINDOW,
) -> ConvergenceReport:
    """Judge a finished trajectory; see the module docstring for the rules."""
    _check_tolerances(eps_consensus, eps_stall, window)
    if len(traj) == 0:
        raise ValidationError("empty trajectory")
    return _verdict(traj.states, traj.steps, eps_consensus, eps_stall, window)


def run_to_verdict(
    g: InfluenceGraph,
    B0,
    max_steps: int,
    eps_consensus: float = EPS_CONSENSUS,
    eps_stall: float = EPS_STALL,
    window: int = WINDOW,
    chunk: int = 10_000,
) -> ConvergenceReport:
    """Simulate until a verdict other than ``undecided`` or the budget runs out.

    Only the trailing ``window + 1`` states are kept, so long budgets are cheap
    in memory.
    """
    _check_tolerances(eps_consensus, eps_stall, window)
    B = as_state(B0, g.n)
    tail = deque([B], maxlen=window + 1)
    used = 0
    while True:
        report = _verdict(np.array(tail), used, eps_consensus, eps_stall, window)
        if report.verdict != "undecided" or used >= max_steps:
            return report
        part = simulate(g, tail[-1], min(chunk, max_steps - used), stop_gap=eps_consensus)
        tail.extend(part.states[1:])
        used += part.steps


def _bias_violations(g: InfluenceGraph) -> list:
    out = []
    for e in g.edges:
        edge = (e.source, e.target)
        certs = e.bias.certified_regions
        if "R" not in certs:
            if e.bias.kind == "piecewise_linear":
                out.append(("cannot certify", edge, f"{e.bias} is not provably in R"))
            elif certs:
                out.append(("bias not in R", edge, f"{e.bias} lies in {''.join(sorted(certs))}"))
            else:
                out.append(("cannot certify", edge, f"{e.bias} has no region certificate for R"))
        if not e.bias.continuous:
            out.append(("discontinuous bias", edge, str(e.bias)))
    return out


def predict_consensus(
    g: InfluenceGraph,
    B0=None,
    steps: int = 100_000,
    eps_consensus: float = EPS_CONSENSUS,
    eps_source: float = EPS_SOURCE,
) -> Prediction:
    """Apply the two consensus theorems to ``g``.

    ``guaranteed_consensus``: strongly connected with every bias continuous
    and certified in R. ``conditional_on_sources``: same biases, but several
    components; global consensus iff the source components share one limit.
    When ``B0`` is given, each source component is simulated on its own
    (nothing outside it can reach it) and the limits compared within
    ``eps_source``. ``no_guarantee`` lists every failed hypothesis.
    """
    violations = _bias_violations(g)
    connected = is_strongly_connected(g)
    if violations:
        if not connected:
            violations.append(("not strongly connected", None, "graph has several components"))
        return Prediction(NO_GUARANTEE, tuple(violations))
    if connected:
        return Prediction(GUARANTEED)
    if B0 is None:
        return Prediction(CONDITIONAL)

    B0 = as_state(B0, g.n)
    limits = []
    for comp in strongly_connected_components(g).sources:
        sub, ids = g.subgraph(comp)
        rep = run_to_verdict(sub, B0[ids], steps, eps_consensus=eps_consensus)
        limits.append((frozenset(comp), rep.value if rep.verdict == "consensus" else None))
    values = [v for _, v in limits]
    agree = None if None in values else (max(values) - min(values) <= eps_source)
    return Prediction(CONDITIONAL, (), tuple(limits), agree)


@dataclass(frozen=True)
class BoundsCheck:
    """Which bounds an updated state respects.

    ``lower``/``upper``: every entry within [min(B), max(B)] up to the slack.
    ``unit``: every entry within [0, 1]. Truthy iff ``lower and upper``.
    """

    lower: bool
    upper: bool
    unit: bool

    def __bool__(self) -> bool:
        return self.lower and self.upper


def check_update_bounds(B, B_next, slack: float = BOUNDS_SLACK) -> BoundsCheck:
    B = np.asarray(B, dtype=float)
    B_next = np.asarray(B_next, dtype=float)
    if B.shape != B_next.shape:
        raise ValidationError(f"length mismatch: {B.shape} vs {B_next.shape}")
    return BoundsCheck(
        lower=bool((B_next >= B.min() - slack).all()),
        upper=bool((B_next <= B.max() + slack).all()),
        unit=bool(((B_next >= 0) & (B_next <= 1)).all()),
    )


def _require_lemma_hypotheses(g: InfluenceGraph, B: np.ndarray, minimum: bool, require_r: bool) -> float:
    if require_r:
        bad = [e for e in g.edges if "R" not in e.bias.certified_regions]
        if bad:
            e = bad[0]
            raise PreconditionUnmet(f"bias {e.bias} on edge {e.source}->{e.target} is not certified in R")
    lo, hi = B.min(), B.max()
    if lo == hi:
        raise PreconditionUnmet("state is already a consensus (min == max)")
    extreme = lo if minimum else hi
    # multi-source search from every non-extreme agent
    seen = set(np.flatnonzero(B != extreme).tolist())
    frontier = list(seen)
    while frontier:
        v = frontier.pop()
        if B[v] == extreme:
            return float(extreme)
        for w in g.successors(v):
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    raise PreconditionUnmet("no path from a non-extreme agent to an extreme agent")


def check_extreme_reduction(g: InfluenceGraph, B, minimum: bool = False, require_r: bool = True) -> bool:
    """Does one update strictly shrink the set of agents at the extreme?

    Raises PreconditionUnmet when ``B`` is a consensus, when no extreme agent
    is reachable from a non-extreme one, or (with ``require_r``) when some
    bias is not certified in R.
    """
    B = as_state(B, g.n)
    ext = _require_lemma_hypotheses(g, B, minimum, require_r)
    nxt = update(g, B)
    if minimum:
        return int((B <= ext).sum()) > int((nxt <= ext).sum())
    return int((B >= ext).sum()) > int((nxt >= ext).sum())


def check_max_decrease_horizon(g: InfluenceGraph, B, minimum: bool = False, require_r: bool = True) -> bool:
    """Is the maximum strictly lower after ``n - 1`` updates?

    With ``minimum`` the mirror statement: the minimum strictly higher.
    Same preconditions as :func:`check_extreme_reduction`.
    """
    B = as_state(B, g.n)
    ext = _require_lemma_hypotheses(g, B, minimum, require_r)
    after = step_many(g, B, g.n - 1)
    return bool(after.min() > ext) if minimum else bool(after.max() < ext)


def check_clamp_free(g: InfluenceGraph, B) -> bool:
    """Do the clamped and unclamped updates agree exactly at ``B``?"""
    return bool(np.array_equal(update(g, B), update_unclamped(g, B)))
