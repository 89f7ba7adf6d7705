"""Bias functions on disagreement and the four bias regions.

A bias maps a disagreement ``x = B_j - B_i`` in [-1, 1] to the signed amount
``y`` in [-1, 1] agent ``i`` moves toward (or away from) agent ``j``. The
square [-1, 1]^2 is covered by four overlapping regions:

* ``M`` (malleable): moves at least as far as the disagreement.
* ``R`` (receptive-resistant): moves toward it, strictly less far.
* ``B`` (backfire): moves away from it.
* ``I`` (insular): ignores it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError, ValidationError

REGIONS = ("M", "R", "B", "I")

KINDS = (
    "degroot",
    "conf",
    "backf",
    "fan",
    "ins",
    "exp_slow",
    "step_discontinuous",
    "arctan_malleable",
    "piecewise_linear",
)

DEFAULT_DELTA = 1e-4


def _degroot(x):
    return x * 1.0


def _conf(x, delta):
    return x * (1.0 + delta - np.abs(x)) / (1.0 + delta)


def _backf(x):
    return -(x * x * x)


def _fan(x):
    return np.sign(x)


def _ins(x):
    return np.zeros_like(x)


def _exp_slow(x):
    with np.errstate(divide="ignore"):
        return np.sign(x) * np.exp(-1.0 / np.abs(x))


def _step(x):
    return np.where(
        np.abs(x) <= 0.5,
        x / 2.0,
        np.where(x > 0.5, (x - 0.5) / 8.0, (x + 0.5) / 8.0),
    )


_ATAN1 = float(np.arctan(1.0))


def _arctan(x):
    return np.arctan(x) / _ATAN1


@dataclass(frozen=True)
class BiasSpec:
    """A named, parameterized bias function.

    Construct with :func:`make_bias` or the helpers (:func:`conf`, ...).
    Calling it evaluates it elementwise on an array without domain
    checks; use :func:`eval_bias` for a checked scalar evaluation.
    """

    kind: str
    params: tuple = ()
    _fn: object = field(default=None, repr=False, compare=False, hash=False)

    def __call__(self, x):
        return self._fn(np.asarray(x, dtype=float))

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    @property
    def continuous(self) -> bool:
        return self.kind not in ("fan", "step_discontinuous")

    @property
    def certified_regions(self) -> frozenset[str]:
        """Regions the whole function graph provably lies in."""
        k = self.kind
        if k in ("degroot", "fan", "arctan_malleable"):
            return frozenset("M")
        if k == "conf":
            return frozenset("R") if self.param_dict["delta"] > 0 else frozenset()
        if k in ("exp_slow", "step_discontinuous"):
            return frozenset("R")
        if k == "backf":
            return frozenset("B")
        if k == "ins":
            return frozenset("I")
        if k == "piecewise_linear":
            p = self.param_dict
            return frozenset("R") if _pl_in_r(p["xs"], p["ys"]) else frozenset()
        return frozenset()

    def to_params(self) -> dict:
        """Parameters in their serializable form."""
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params}

    def __str__(self) -> str:
        if not self.params:
            return self.kind
        inner = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.kind}({inner})"


def _pl_in_r(xs, ys) -> bool:
    # Linear segments stay inside R iff their endpoints do and 0 is a knot
    # mapping to 0; R is convex on each open half-plane.
    if 0.0 not in xs or ys[xs.index(0.0)] != 0.0:
        return False
    for x, y in zip(xs, ys):
        if x < 0 and not (x < y < 0):
            return False
        if x > 0 and not (0 < y < x):
            return False
    return True


def make_bias(kind: str, params: Mapping | None = None) -> BiasSpec:
    """Build a validated :class:`BiasSpec` from a kind name and parameters."""
    params = dict(params or {})
    if kind not in KINDS:
        raise ValidationError(f"unknown bias kind {kind!r}; expected one of {', '.join(KINDS)}")
    allowed = {"conf": {"delta"}, "piecewise_linear": {"xs", "ys"}}.get(kind, set())
    extra = set(params) - allowed
    if extra:
        raise ValidationError(f"bias {kind!r} takes no parameter(s) {sorted(extra)}")

    if kind == "conf":
        delta = params.get("delta", DEFAULT_DELTA)
        if isinstance(delta, bool) or not isinstance(delta, (int, float)) or not math.isfinite(delta) or delta < 0:
            raise ValidationError(f"conf delta must be a finite number >= 0, got {delta!r}")
        delta = float(delta)
        return BiasSpec("conf", (("delta", delta),), lambda x: _conf(x, delta))

    if kind == "piecewise_linear":
        xs, ys = params.get("xs"), params.get("ys")
        if xs is None or ys is None:
            raise ValidationError("piecewise_linear needs 'xs' and 'ys'")
        try:
            xs = tuple(float(v) for v in xs)
            ys = tuple(float(v) for v in ys)
        except (TypeError, ValueError):
            raise ValidationError("piecewise_linear 'xs' and 'ys' must be lists of numbers") from None
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValidationError("piecewise_linear needs equally long 'xs' and 'ys' with at least 2 points")
        if xs[0] != -1.0 or xs[-1] != 1.0:
            raise ValidationError("piecewise_linear breakpoints must span [-1, 1]")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValidationError("piecewise_linear breakpoints must be strictly increasing")
        if any(not (-1.0 <= y <= 1.0) for y in ys):
            raise ValidationError("piecewise_linear values must lie in [-1, 1]")
        ax, ay = np.array(xs), np.array(ys)
        return BiasSpec("piecewise_linear", (("xs", xs), ("ys", ys)), lambda x: np.interp(x, ax, ay))

    fn = {
        "degroot": _degroot,
        "backf": _backf,
        "fan": _fan,
        "ins": _ins,
        "exp_slow": _exp_slow,
        "step_discontinuous": _step,
        "arctan_malleable": _arctan,
    }[kind]
    return BiasSpec(kind, (), fn)


def degroot() -> BiasSpec:
    return make_bias("degroot")


def conf(delta: float = DEFAULT_DELTA) -> BiasSpec:
    return make_bias("conf", {"delta": delta})


def backf() -> BiasSpec:
    return make_bias("backf")


def fan() -> BiasSpec:
    return make_bias("fan")


def ins() -> BiasSpec:
    return make_bias("ins")


def exp_slow() -> BiasSpec:
    return make_bias("exp_slow")


def step_discontinuous() -> BiasSpec:
    return make_bias("step_discontinuous")


def arctan_malleable() -> BiasSpec:
    return make_bias("arctan_malleable")


def piecewise_linear(xs, ys) -> BiasSpec:
    return make_bias("piecewise_linear", {"xs": xs, "ys": ys})


def _check_unit(name: str, v: float) -> float:
    v = float(v)
    if not (-1.0 <= v <= 1.0):
        raise DomainError(f"{name}={v} outside [-1, 1]")
    return v


def eval_bias(b: BiasSpec, x: float) -> float:
    x = _check_unit("x", x)
    y = float(b(x))
    assert -1.0 <= y <= 1.0, f"{b} produced {y} at x={x}"
    return y


# Region predicates, vectorized over arrays.

def in_m(x, y):
    return ((x < 0) & (y <= x)) | ((x > 0) & (y >= x)) | (x == 0)


def in_r(x, y):
    return ((x < 0) & (x < y) & (y < 0)) | ((x > 0) & (0 < y) & (y < x)) | ((x == 0) & (y == 0))


def in_b(x, y):
    return ((x < 0) & (0 < y)) | ((x > 0) & (y < 0)) | ((x == 0) & (y == 0))


def in_i(x, y):
    return y == 0


_PREDICATES = {"M": in_m, "R": in_r, "B": in_b, "I": in_i}


def region_membership(x: float, y: float) -> frozenset[str]:
    """All regions containing the point ``(x, y)``."""
    x = _check_unit("x", x)
    y = _check_unit("y", y)
    return frozenset(r for r in REGIONS if _PREDICATES[r](x, y))


@dataclass(frozen=True)
class RegionReport:
    bias: str
    samples: int
    membership: dict
    sampled_membership: dict
    witnesses: dict
    certified: bool
    certified_regions: frozenset

    def __str__(self) -> str:
        lines = [f"bias: {self.bias}", f"samples: {self.samples}"]
        for r in REGIONS:
            tag = " (certified)" if r in self.certified_regions else ""
            line = f"  {r}: {self.membership[r]}{tag}"
            if r in self.witnesses:
                x, y = self.witnesses[r]
                line += f"  e.g. ({x:.6g}, {y:.6g})"
            lines.append(line)
        return "\n".join(lines)


def sample_grid(grid: int, include_endpoints: bool = True) -> np.ndarray:
    if grid < 3:
        raise ValidationError(f"grid must be >= 3, got {grid}")
    if include_endpoints:
        return np.linspace(-1.0, 1.0, grid)
    return np.linspace(-1.0, 1.0, grid + 2)[1:-1]


def classify_bias(b: BiasSpec, grid: int = 2001, include_endpoints: bool = True) -> RegionReport:
    """Place a bias against the M/R/B/I regions by sampling its graph.

    Each region gets ``all``, ``some`` or ``none`` over the sampled points.
    Regions in ``b.certified_regions`` report ``all`` regardless of what the
    samples show, since sampling can never prove membership everywhere.
    """
    xs = sample_grid(grid, include_endpoints)
    ys = b(xs)
    sampled, witnesses = {}, {}
    for r in REGIONS:
        hit = _PREDICATES[r](xs, ys)
        if hit.all():
            sampled[r] = "all"
        elif hit.any():
            sampled[r] = "some"
            k = int(np.flatnonzero(hit)[0])
            witnesses[r] = (float(xs[k]), float(ys[k]))
        else:
            sampled[r] = "none"
    certs = b.certified_regions
    membership = {r: ("all" if r in certs else sampled[r]) for r in REGIONS}
    witnesses = {r: w for r, w in witnesses.items() if membership[r] == "some"}
    return RegionReport(
        bias=str(b),
        samples=len(xs),
        membership=membership,
        sampled_membership=sampled,
        witnesses=witnesses,
        certified=bool(certs),
        certified_regions=certs,
    )


def continuity_probe(b: BiasSpec, grid: int = 4001, jump_threshold: float = 50.0) -> list[tuple[float, float]]:
    """Intervals between samples where the function looks discontinuous.

    An interval is suspect when its rise exceeds ``jump_threshold`` times its
    run, i.e. the local slope is implausibly steep. Adjacent suspects are
    merged. Advisory only; see ``BiasSpec.continuous`` for the analytic flag.
    """
    if jump_threshold <= 0:
        raise ValidationError("jump_threshold must be positive")
    xs = sample_grid(grid)
    ys = b(xs)
    steep = np.abs(np.diff(ys)) > jump_threshold * np.diff(xs)
    out: list[tuple[float, float]] = []
    for k in np.flatnonzero(steep):
        lo, hi = float(xs[k]), float(xs[k + 1])
        if out and out[-1][1] == lo:
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out
