"""Polyharmonic spline surrogate optimizer."""

from ._core import (
    Dimension,
    Direction,
    ParamSpace,
    Phase,
    PointKind,
    Rationale,
    SearchConfig,
    SplineModel,
    SplineNasError,
    Study,
    StudyConfig,
    Suggestion,
    SupportPoint,
    benchmark,
    benchmark_names,
    fit,
    fixture_names,
    halton,
    halton_point,
    project,
    replay_fixture,
    search,
)

__all__ = [
    "Dimension",
    "Direction",
    "ParamSpace",
    "Phase",
    "PointKind",
    "Rationale",
    "SearchConfig",
    "SplineModel",
    "SplineNasError",
    "Study",
    "StudyConfig",
    "Suggestion",
    "SupportPoint",
    "benchmark",
    "benchmark_names",
    "fit",
    "fixture_names",
    "halton",
    "halton_point",
    "project",
    "replay_fixture",
    "search",
]
