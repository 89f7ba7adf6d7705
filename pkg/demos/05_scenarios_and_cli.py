"""
Scenario files and the command line
===================================

Scenarios are JSON documents with 1-based agent ids. They can be written by
hand, validated, run from Python and reproduced with the ``biasdyn`` command.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from biasdyn import ScenarioError, detect_convergence, parse_scenario, simulate

doc = {
    "name": "triangle",
    "n": 3,
    "edges": [
        {"from": 1, "to": 2, "weight": 1.0, "bias": {"kind": "conf"}},
        {"from": 2, "to": 3, "weight": 0.6, "bias": {"kind": "conf", "params": {"delta": 0.5}}},
        {"from": 3, "to": 1, "weight": 0.8, "bias": {"kind": "piecewise_linear",
                                                    "params": {"xs": [-1, 0, 1], "ys": [-0.5, 0, 0.5]}}},
        {"from": 3, "to": 3, "weight": 0.5, "bias": {"kind": "degroot"}},
    ],
    "initial_beliefs": [0.9, 0.1, 0.4],
    "steps": 2000,
}

# %%
cfg = parse_scenario(json.dumps(doc))
traj = simulate(cfg.graph(), cfg.initial_state(), cfg.steps)
print(detect_convergence(traj))

# %%
# Errors are collected and reported with their location.
bad = dict(doc, edges=[dict(doc["edges"][0], weight=1.5), dict(doc["edges"][1], to=7)])
try:
    parse_scenario(json.dumps(bad))
except ScenarioError as exc:
    for path, msg in exc.errors:
        print(f"{path}: {msg}")

# %%
# The same file through the command line.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "triangle.json"
    path.write_text(json.dumps(doc))
    for args in (["components", "--scenario", str(path)],
                 ["predict", "--scenario", str(path)],
                 ["reproduce", "two-agent-fan", "--out-dir", tmp]):
        res = subprocess.run([sys.executable, "-m", "biasdyn", *args], capture_output=True, text=True)
        print("$ biasdyn", " ".join(args), f"(exit {res.returncode})")
        print(res.stdout)
    print((Path(tmp) / "two-agent-fan.csv").read_text().splitlines()[:4])
