"""Probabilistic privacy-risk analysis of data-processing programs."""

import json

from ._leakscope import (
    InferenceError,
    IoError,
    LeakscopeError,
    RunSpec,
    UsageError,
    __version__,
    bench,
    dump_samples,
    knn_entropy_bits,
    knn_kl_bits,
    ksg_mi_bits,
    run_json,
    scenario_names,
    sweep,
)


def make_spec(scenario, **options):
    """Build a RunSpec from keyword options named like its fields."""
    spec = RunSpec()
    spec.scenario = scenario
    for key, value in options.items():
        if not hasattr(spec, key):
            raise UsageError(f"unknown option: {key}")
        setattr(spec, key, value)
    return spec


def run(scenario, **options):
    """Run a scenario and return the results document as a dict."""
    return json.loads(run_json(make_spec(scenario, **options)))


__all__ = [
    "InferenceError",
    "IoError",
    "LeakscopeError",
    "RunSpec",
    "UsageError",
    "__version__",
    "bench",
    "dump_samples",
    "knn_entropy_bits",
    "knn_kl_bits",
    "ksg_mi_bits",
    "make_spec",
    "run",
    "run_json",
    "scenario_names",
    "sweep",
]
