import numpy as np
import pytest

from biasdyn import bias as bz
from biasdyn.analysis import (
    CONDITIONAL,
    GUARANTEED,
    NO_GUARANTEE,
    check_clamp_free,
    check_extreme_reduction,
    check_max_decrease_horizon,
    check_update_bounds,
    detect_convergence,
    predict_consensus,
    run_to_verdict,
)
from biasdyn.dynamics import Trajectory, simulate, step_many, update, update_unclamped
from biasdyn.errors import PreconditionUnmet, ValidationError
from biasdyn.graph import build_graph, is_strongly_connected
from conftest import two_agent_graph, vaccine_graph
from randgraphs import random_graph, random_grid_state, random_r_bias, random_state


def test_detect_consensus_vaccine_conf(B0):
    rep = detect_convergence(simulate(vaccine_graph("conf"), B0, 5000), eps_consensus=1e-6)
    assert rep.verdict == "consensus"
    assert 0 <= rep.value <= 1
    assert rep.final_gap <= 1e-6
    assert rep.envelope[0] <= rep.value <= rep.envelope[1]


def test_detect_fan_cycle():
    rep = detect_convergence(simulate(two_agent_graph("fan"), [0.0, 1.0], 50))
    assert rep.verdict == "no_consensus"
    assert "period 2" in rep.reason


def test_detect_ins_fixed_point():
    rep = detect_convergence(simulate(two_agent_graph("ins"), [0.0, 1.0], 200))
    assert rep.verdict == "no_consensus"
    assert rep.final_gap == 1.0


def test_detect_stall_without_repeat():
    # gap frozen, states still moving: both agents drift up together
    states = np.array([[0.1 + 1e-6 * t, 0.6 + 1e-6 * t] for t in range(300)])
    rep = detect_convergence(Trajectory(states), window=100)
    assert rep.verdict == "no_consensus" and "heuristic" in rep.reason


def test_detect_undecided_short_run(B0):
    rep = detect_convergence(simulate(vaccine_graph("conf"), B0, 10))
    assert rep.verdict == "undecided"


def test_detect_validation():
    with pytest.raises(ValidationError):
        detect_convergence(Trajectory(np.empty((0, 2))))
    tr = simulate(two_agent_graph("conf"), [0, 1], 3)
    with pytest.raises(ValidationError):
        detect_convergence(tr, eps_consensus=0)
    with pytest.raises(ValidationError):
        detect_convergence(tr, window=0)


def test_run_to_verdict_matches_full_run(B0):
    g = vaccine_graph("conf")
    rep = run_to_verdict(g, B0, 100_000, chunk=137)
    full = simulate(g, B0, rep.steps_used)
    assert rep.verdict == "consensus"
    assert rep.final_gap == full.gap[-1] and full.gap[-2] > 1e-6


def test_predict_examples():
    assert predict_consensus(vaccine_graph("conf")).kind == GUARANTEED
    p = predict_consensus(vaccine_graph("backf"))
    assert p.kind == NO_GUARANTEE
    assert all(v[0] == "bias not in R" for v in p.violations)
    assert len(p.violations) == 16
    p = predict_consensus(vaccine_graph("fan"))
    kinds = {v[0] for v in p.violations}
    assert kinds == {"bias not in R", "discontinuous bias"}
    p = predict_consensus(two_agent_graph("step_discontinuous"))
    assert p.kind == NO_GUARANTEE and {v[0] for v in p.violations} == {"discontinuous bias"}


def test_predict_uncertified_user_bias():
    b = bz.piecewise_linear([-1, 1], [-0.5, 0.5])
    g = build_graph(2, [(0, 1, 1.0, b), (1, 0, 1.0, b)])
    p = predict_consensus(g)
    assert p.kind == NO_GUARANTEE
    assert any("cannot certify" in r for r in p.reasons())


def test_predict_lists_connectivity_with_other_violations():
    g = build_graph(2, [(0, 1, 1.0, bz.backf())])
    p = predict_consensus(g)
    assert p.kind == NO_GUARANTEE
    assert ("not strongly connected", None, "graph has several components") in p.violations


def two_sources_graph():
    """Two identical conf 3-cycles (agents 0-2 and 3-5) feeding a sink chain 6 -> 7 -> 8."""
    c = bz.conf()
    edges = []
    for base in (0, 3):
        for k in range(3):
            edges.append((base + k, base + (k + 1) % 3, 0.7, c))
            edges.append((base + k, base + k, 0.3, c))
    edges += [(1, 6, 0.5, c), (4, 6, 0.5, c), (6, 7, 1.0, c), (7, 8, 0.8, c), (8, 8, 0.2, c)]
    return build_graph(9, edges)


def test_predict_conditional_on_sources():
    g = two_sources_graph()
    assert predict_consensus(g).kind == CONDITIONAL
    same = [0.2, 0.9, 0.5, 0.2, 0.9, 0.5, 0.0, 1.0, 0.3]
    p = predict_consensus(g, same)
    assert p.kind == CONDITIONAL and p.sources_agree is True
    assert len(p.source_limits) == 2
    assert detect_convergence(simulate(g, same, 20_000), eps_consensus=1e-4).verdict == "consensus"

    apart = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5]
    p = predict_consensus(g, apart)
    assert p.sources_agree is False
    assert [lim for _, lim in p.source_limits] == [0.0, 1.0]


def test_check_update_bounds_examples(rng):
    g = vaccine_graph("conf")
    B = rng.random(6)
    assert check_update_bounds(B, update(g, B))
    fan = two_agent_graph("fan")
    assert check_update_bounds([0, 1], update(fan, [0.0, 1.0]))

    arct = two_agent_graph("arctan_malleable")
    raw = update_unclamped(arct, [0.0, 0.001])
    res = check_update_bounds([0.0, 0.001], raw)
    assert not res and not res.lower and not res.unit
    res = check_update_bounds([0.0, 0.001], update(arct, [0.0, 0.001]))
    assert res.unit and res.lower and not res.upper and not res
    with pytest.raises(ValidationError):
        check_update_bounds([0.1], [0.1, 0.2])


def test_extreme_reduction_examples(B0):
    g = vaccine_graph("conf")
    assert check_extreme_reduction(g, B0)
    assert check_extreme_reduction(g, B0, minimum=True)
    with pytest.raises(PreconditionUnmet, match="consensus"):
        check_extreme_reduction(g, [0.4] * 6)
    # agent 0 holds the max but nobody can reach it
    lonely = build_graph(2, [(0, 1, 1.0, bz.conf())])
    with pytest.raises(PreconditionUnmet, match="no path"):
        check_extreme_reduction(lonely, [1.0, 0.2])
    with pytest.raises(PreconditionUnmet, match="not certified"):
        check_extreme_reduction(vaccine_graph("degroot"), B0)


def test_max_decrease_horizon_examples(B0):
    g = vaccine_graph("conf")
    assert check_max_decrease_horizon(g, B0)
    assert step_many(g, B0, 5).max() < B0.max()
    two = two_agent_graph("conf")
    assert check_max_decrease_horizon(two, [0.0, 1.0])
    assert update(two, [0.0, 1.0]).max() < 1.0
    with pytest.raises(PreconditionUnmet):
        check_max_decrease_horizon(g, [0.3] * 6)


def test_update_bounds_and_clamp_free_randomized(rng):
    for _ in range(500):
        n = int(rng.integers(1, 11))
        g = random_graph(rng, n, strongly=bool(rng.integers(2)))
        B = random_state(rng, n)
        assert check_update_bounds(B, update(g, B))
        assert check_clamp_free(g, B)


EXTREME_KINDS = ("conf", "piecewise_linear")


def test_extreme_agents_randomized(rng):
    held = 0
    for _ in range(500):
        n = int(rng.integers(2, 11))
        g = random_graph(rng, n, make_bias=lambda: random_r_bias(rng, EXTREME_KINDS))
        B = random_grid_state(rng, n)
        # strongly connected and not a consensus: the path hypothesis always holds
        assert check_extreme_reduction(g, B)
        assert check_extreme_reduction(g, B, minimum=True)
        assert check_max_decrease_horizon(g, B)
        assert check_max_decrease_horizon(g, B, minimum=True)
        held += 1
    assert held == 500


def test_strongly_connected_r_graphs_reach_consensus(rng):
    # Rates, not limits, decide a bounded-horizon check. Self-loops make the
    # linearized chain aperiodic (see test_periodic_pair_converges_slowly) and
    # the default slope and weight floors keep the geometric rate usable.
    kinds = ("conf", "piecewise_linear")
    steps = []
    for _ in range(100):
        n = int(rng.integers(2, 9))
        g = random_graph(rng, n, self_loops=True, make_bias=lambda: random_r_bias(rng, kinds))
        assert is_strongly_connected(g)
        assert predict_consensus(g).kind == GUARANTEED
        rep = run_to_verdict(g, random_state(rng, n), 1_000_000)
        assert rep.verdict == "consensus", rep
        steps.append(rep.steps_used)
    print("steps to consensus: max", max(steps), "median", int(np.median(steps)))


def test_periodic_pair_converges_slowly():
    # conf has slope 1 at the origin, so two mutual sole influencers keep
    # swapping sides while the gap shrinks only like 1/t.
    tr = simulate(two_agent_graph("conf"), [0.0, 1.0], 10_000)
    d = tr.states[:, 1] - tr.states[:, 0]
    assert (np.sign(d[100:-1]) == -np.sign(d[101:])).all()
    assert (np.abs(d[1:]) < np.abs(d[:-1])).all()
    assert 1e-5 < abs(d[-1]) < 1e-3
    assert run_to_verdict(two_agent_graph("conf"), [0.0, 1.0], 10_000).verdict == "undecided"


def _two_source_random(rng, k, sink):
    """Two copies of one random strongly connected k-agent source, feeding ``sink`` agents."""
    src = random_graph(rng, k, make_bias=lambda: random_r_bias(rng, ("conf", "piecewise_linear")))
    edges = []
    for off in (0, k):
        edges += [(e.source + off, e.target + off, e.weight, e.bias) for e in src.edges]
    first = 2 * k
    c = bz.conf(float(rng.uniform(0.01, 1)))
    edges += [(int(rng.integers(k)), first, 0.5, c), (k + int(rng.integers(k)), first, 0.5, c)]
    for s in range(first, first + sink - 1):
        edges.append((s, s + 1, float(rng.uniform(0.1, 1)), c))
        if rng.random() < 0.5:
            edges.append((int(rng.integers(2 * k)), s + 1, float(rng.uniform(0.1, 1)), c))
    return build_graph(2 * k + sink, edges)


def test_source_components_decide_consensus(rng):
    for _ in range(20):
        k, sink = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        g = _two_source_random(rng, k, sink)
        assert predict_consensus(g).kind == CONDITIONAL

        src_beliefs = rng.random(k)
        B = np.concatenate([src_beliefs, src_beliefs, rng.random(sink)])
        assert predict_consensus(g, B).sources_agree
        rep = run_to_verdict(g, B, 1_000_000)
        assert rep.verdict == "consensus"

        B = np.concatenate([np.zeros(k), np.ones(k), rng.random(sink)])
        assert predict_consensus(g, B).sources_agree is False
        tr = simulate(g, B, 2000)
        assert (tr.gap >= 0.5).all()


def test_guaranteed_implies_detected(rng, B0):
    g = vaccine_graph("conf")
    for _ in range(20):
        B = rng.random(6)
        assert run_to_verdict(g, B, 100_000).verdict == "consensus"
