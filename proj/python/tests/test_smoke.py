import math
import random

import pytest

import leakscope


def result(doc, label):
    return next(r for r in doc["results"] if r["label"] == label)


def test_scenarios_listed():
    names = leakscope.scenario_names()
    assert "agg-kal" in names and "syn-disc" in names


def test_exact_run_matches_closed_form():
    doc = leakscope.run("syn-disc", method="exact", n=100, measures=["P(o=100)"])
    assert abs(result(doc, "P(o=100)")["value_bits_or_prob"] - 1 / 101) < 1e-12
    assert doc["method"] == "exact"


def test_kal_posterior():
    doc = leakscope.run("agg-kal", method="metropolis", samples=2000, measures=["mean(a)", "P(a<18)"])
    assert abs(result(doc, "mean(a)")["value_bits_or_prob"] - 55.6) < 0.02
    assert result(doc, "P(a<18)")["value_bits_or_prob"] == 0.0


def test_runs_are_deterministic():
    a = leakscope.run("dp-agg", samples=500, epsilon=0.5, measures=["mean(o)"])
    b = leakscope.run("dp-agg", samples=500, epsilon=0.5, measures=["mean(o)"])
    assert a["results"] == b["results"]


def test_errors_map_to_exceptions(tmp_path):
    with pytest.raises(leakscope.UsageError):
        leakscope.run("nope")
    with pytest.raises(leakscope.UsageError):
        leakscope.run("agg-kal", method="sideways")
    with pytest.raises(leakscope.InferenceError):
        leakscope.run("agg-kal", method="exact")
    with pytest.raises(leakscope.IoError):
        leakscope.dump_samples(leakscope.make_spec("syn-disc", samples=5), str(tmp_path / "no" / "x.csv"))


def test_sweep_and_bench():
    spec = leakscope.make_spec("syn-disc", method="forward", measures=["P(o=100)"])
    rows = leakscope.sweep(spec, [200, 400], repeats=2)
    assert [r["n"] for r in rows] == [200, 400]
    bench = leakscope.bench(leakscope.make_spec("syn-complex", samples=3), [50])
    assert bench[0]["payload_seconds"] is not None


def test_estimators():
    rng = random.Random(3)
    xs = [rng.gauss(0, 1) for _ in range(4000)]
    expected = 0.5 * math.log2(2 * math.pi * math.e)
    assert abs(leakscope.knn_entropy_bits(xs) - expected) < 0.1
    ys = [x + rng.gauss(0, 1) for x in xs]
    assert leakscope.ksg_mi_bits(xs, ys) == pytest.approx(0.5, abs=0.08)
