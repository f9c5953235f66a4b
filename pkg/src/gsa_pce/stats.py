"""Bootstrap confidence intervals and replication sweeps.

Two resampling protocols live here and should not be confused:

* bootstrap_ci resamples the rows of one dataset (always whole rows, inputs
  and output together) and re-runs the estimator from scratch on each
  resample.  It quantifies the sampling variability of a single-dataset
  estimate.
* replicate draws fresh datasets from a benchmark spec, one independent
  PRNG stream per replication, and bootstrap_mean_ci then resamples the
  per-replication estimates to interval the replication mean.  This is the
  protocol behind the published benchmark tables.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from ._parallel import ordered_map
from .benchmarks import BenchmarkSpec, generate_replication
from .errors import ConfigError, GsaPceError, NumericalError
from .ortho import Dataset

# SeedSequence tags keeping the resampling streams disjoint from the
# (seed, replication) dataset streams, which use 2-tuples.
_ROWS_STREAM = 101
_MEANS_STREAM = 102


@dataclass(frozen=True)
class ResamplingPlan:
    """How many resamples and replications, at what level, under which seed."""

    bootstrap_samples: int = 10_000
    replications: int = 1
    samples_per_replication: int | None = None
    ci_level: float = 0.95
    seed: int = 0
    max_retries: int = 100

    def __post_init__(self):
        if self.bootstrap_samples < 1:
            raise ConfigError("bootstrap_samples must be positive")
        if self.replications < 1:
            raise ConfigError("replications must be positive")
        if not 0.0 < self.ci_level < 1.0:
            raise ConfigError(f"ci_level must be in (0, 1), got {self.ci_level}")
        if self.max_retries < 1:
            raise ConfigError("max_retries must be positive")


@dataclass(frozen=True)
class BootstrapResult:
    point: float
    lower: float
    upper: float
    level: float
    n_resamples: int
    n_retried: int
    failures: tuple[str, ...]

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _percentile_interval(samples: np.ndarray, level: float) -> tuple[float, float]:
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(samples, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def bootstrap_resample_matrix(
    ds: Dataset,
    estimator: Callable[[Dataset], np.ndarray],
    plan: ResamplingPlan,
) -> tuple[np.ndarray, int, tuple[str, ...]]:
    """Estimator values over row-resampled copies of the dataset.

    ``estimator`` may return a scalar or a 1-D vector; the result is a
    (bootstrap_samples, k) matrix.  A resample whose estimation fails is
    redrawn from the same stream (up to ``plan.max_retries`` attempts) and the
    failure is recorded.
    """
    n = ds.n_samples

    def one(b: int):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((plan.seed, _ROWS_STREAM, b)))
        )
        errors = []
        for _ in range(plan.max_retries):
            rows = rng.integers(0, n, size=n)
            try:
                return np.atleast_1d(np.asarray(estimator(ds.take_rows(rows)),
                                                dtype=np.float64)), errors
            except GsaPceError as exc:
                errors.append(f"resample {b}: {exc}")
        raise NumericalError(
            f"bootstrap resample {b} kept failing after {plan.max_retries} attempts: "
            f"{errors[-1]}"
        )

    results = ordered_map(one, range(plan.bootstrap_samples))
    matrix = np.vstack([value for value, _ in results])
    failures = [msg for _, errs in results for msg in errs]
    return matrix, len(failures), tuple(failures[:20])


def bootstrap_ci(
    ds: Dataset, estimator: Callable[[Dataset], float], plan: ResamplingPlan
) -> BootstrapResult:
    """Percentile interval of a scalar estimator over row resamples."""
    point = float(estimator(ds))
    matrix, n_retried, failures = bootstrap_resample_matrix(ds, estimator, plan)
    lower, upper = _percentile_interval(matrix[:, 0], plan.ci_level)
    return BootstrapResult(
        point=point,
        lower=lower,
        upper=upper,
        level=plan.ci_level,
        n_resamples=plan.bootstrap_samples,
        n_retried=n_retried,
        failures=failures,
    )


@dataclass(frozen=True)
class ReplicationResult:
    """Per-replication estimates keyed by quantity name.

    ``std_error`` values are None when only one replication was run.
    """

    values: dict[str, np.ndarray]
    mean: dict[str, float]
    std_error: dict[str, float | None]
    replications: int


def replicate(
    spec: BenchmarkSpec,
    estimator: Callable[[Dataset], Mapping[str, float] | float],
    plan: ResamplingPlan,
) -> ReplicationResult:
    """Apply the estimator to independently generated replication datasets.

    Replication r draws from the stream seeded by (spec.seed, r), so results
    do not depend on execution order.  Scalar estimators are reported under
    the key "value".
    """
    n_samples = plan.samples_per_replication or spec.n_samples
    run_spec = dataclasses.replace(spec, n_samples=n_samples)

    def one(rep: int):
        ds = generate_replication(run_spec, rep)
        try:
            out = estimator(ds)
        except GsaPceError as exc:
            raise NumericalError(f"replication {rep} failed: {exc}") from exc
        if isinstance(out, Mapping):
            return dict(out)
        return {"value": float(out)}

    rows = ordered_map(one, range(plan.replications))
    keys = list(rows[0].keys())
    for rep, row in enumerate(rows):
        if list(row.keys()) != keys:
            raise NumericalError(f"replication {rep} returned different quantities")
    values = {k: np.array([row[k] for row in rows]) for k in keys}
    mean = {k: float(v.mean()) for k, v in values.items()}
    if plan.replications > 1:
        std_error = {
            k: float(v.std(ddof=1) / np.sqrt(plan.replications))
            for k, v in values.items()
        }
    else:
        std_error = {k: None for k in keys}
    return ReplicationResult(values, mean, std_error, plan.replications)


def bootstrap_mean_ci(
    values: np.ndarray, plan: ResamplingPlan
) -> tuple[float, float, float]:
    """Percentile interval for the mean of per-replication estimates.

    Returns (mean, lower, upper).  Resampling is vectorized and seeded from
    (plan.seed, means-stream), independent of the row-resampling streams.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size < 1:
        raise ConfigError("values must be a non-empty 1-D array")
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((plan.seed, _MEANS_STREAM)))
    )
    n = values.size
    means = np.empty(plan.bootstrap_samples)
    chunk = max(1, min(plan.bootstrap_samples, 2_000_000 // max(n, 1)))
    done = 0
    while done < plan.bootstrap_samples:
        m = min(chunk, plan.bootstrap_samples - done)
        rows = rng.integers(0, n, size=(m, n))
        means[done:done + m] = values[rows].mean(axis=1)
        done += m
    lower, upper = _percentile_interval(means, plan.ci_level)
    return float(values.mean()), lower, upper
