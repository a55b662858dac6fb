"""Smoke test for the pygrowfem bindings."""

import math
import tempfile
from pathlib import Path

import pygrowfem as g


def main() -> None:
    assert g.hill_act(2.0, 2.0) == 0.5
    assert abs(g.hill_act(3.0, 1.5) + g.hill_inh(3.0, 1.5) - 1.0) < 1e-14

    arc = [(math.cos(t), math.sin(t)) for t in (i * math.pi / 40 for i in range(41))]
    pts = g.resample(arc, 11)
    chords = [math.dist(a, b) for a, b in zip(pts, pts[1:])]
    assert len(pts) == 11 and max(chords) - min(chords) < 1e-9

    hits = g.find_intersections([(0, -1), (0, 1)], [(-1, 0), (1, 0)])
    assert len(hits) == 1 and abs(hits[0][2] - 0.5) < 1e-12

    assert abs(g.quality((0, 0), (1, 0), (0.5, math.sqrt(3) / 2)) - 1.0) < 1e-12
    assert g.quality((0, 0), (0.5, math.sqrt(3) / 2), (1, 0)) < 0

    m1 = g.run_fixture(1.0, "model1")
    m2 = g.run_fixture(1.0, "model2")
    assert m2["max_junction_error"] <= 1e-9 and not m2["any_inverted"]
    assert m1["max_area_error"] > m2["max_area_error"]

    with tempfile.TemporaryDirectory() as d:
        assert g.cli(["fixture", "--out", d]) == 0
        assert g.cli(["simulate", "--config", str(Path(d, "config.toml"))]) == 0
        assert Path(d, "out", "areas.csv").exists()
        assert g.cli(["simulate"]) == 2

    print(f"model1 area error {m1['max_area_error']:.4f}, model2 {m2['max_area_error']:.4f}")
    print("smoke test passed")


if __name__ == "__main__":
    main()
