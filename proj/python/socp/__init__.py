"""Second-order cone constrained optimization: solvers and optimality checks."""

import json

from ._socp import (
    Problem,
    SpecError,
    UsageError,
    builtin_names,
    project_cone,
    residuals,
    run_cli,
)
from . import _socp

__all__ = [
    "Problem",
    "SpecError",
    "UsageError",
    "builtin_names",
    "project_cone",
    "residuals",
    "run_cli",
    "solve",
]


def _problem(problem):
    return problem if isinstance(problem, Problem) else Problem.builtin(problem)


def solve(problem, solver="auglag", **settings):
    """Run ``auglag`` or ``sqp``; returns x, mu, omega, status, trace and certificate."""
    if solver not in ("auglag", "sqp"):
        raise ValueError(f"unknown solver {solver!r}")
    out = getattr(_socp, solver)(_problem(problem), settings)
    out["trace"] = json.loads(out.pop("trace_json"))
    out["certificate"] = json.loads(out.pop("certificate_json"))
    return out
