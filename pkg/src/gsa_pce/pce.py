"""Projection of the output onto an orthonormal basis and variance bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .ortho import Dataset, OrthonormalBasis, evaluate_basis


@dataclass(frozen=True)
class BlockVariance:
    """Per-block sums of squared coefficients, in orthogonalization order."""

    per_block: tuple[tuple[str, float], ...]

    def value(self, label: str) -> float:
        for name, v in self.per_block:
            if name == label:
                return v
        raise KeyError(label)


@dataclass(frozen=True)
class PceModel:
    """Fitted expansion: coefficients, their basis, and variance diagnostics.

    ``sample_variance`` is the (1/N) mean squared deviation of the output;
    ``r_squared`` is the share of it captured by the non-constant polynomials.
    """

    coefficients: np.ndarray
    basis: OrthonormalBasis
    sample_variance: float
    r_squared: float
    block_variance: BlockVariance

    @property
    def mean(self) -> float:
        return float(self.coefficients[0])

    @property
    def explained_variance(self) -> float:
        """Sum of squared non-constant coefficients (block sums, fixed order)."""
        return sum(v for label, v in self.block_variance.per_block if label != "const")


def fit(ds: Dataset, onb: OrthonormalBasis) -> PceModel:
    """Project the output onto the orthonormal polynomials.

    Because the polynomials are orthonormal under the empirical measure, the
    sample-average inner products below coincide with the least-squares
    solution on the training data.
    """
    if onb.n_samples != ds.n_samples:
        raise DimensionError(
            f"basis was built on {onb.n_samples} samples, dataset has {ds.n_samples}"
        )
    y = ds.output
    n = ds.n_samples
    theta = (onb.train_evaluations.T @ y) / n
    theta.setflags(write=False)

    y_mean = float(y.mean())
    centered = y - y_mean
    sample_variance = float(centered @ centered) / n

    sq = theta**2
    per_block = tuple(
        (label, float(sq[sl].sum())) for label, sl in onb.block_slices()
    )
    block_variance = BlockVariance(per_block)
    explained = sum(v for label, v in per_block if label != "const")
    r_squared = explained / sample_variance if sample_variance > 0.0 else 0.0
    return PceModel(theta, onb, sample_variance, r_squared, block_variance)


def moments(m: PceModel) -> tuple[float, float]:
    """(mean, variance) of the fitted expansion; the constant coefficient and
    the sum of the squared remaining ones."""
    return m.mean, m.explained_variance


def block_variances(m: PceModel) -> BlockVariance:
    return m.block_variance


def predict(m: PceModel, new_inputs) -> np.ndarray:
    """Evaluate the fitted surrogate at new input rows."""
    return evaluate_basis(m.basis, new_inputs) @ m.coefficients


def group_by_support(
    m: PceModel, denominator: str = "sample"
) -> dict[tuple[int, ...], float]:
    """Variance shares keyed by the dataset columns each polynomial involves.

    Each squared coefficient is attributed to the support of its polynomial's
    pivot monomial (the diagonal term of the triangular transform).  For
    independent inputs these shares estimate the classical variance
    decomposition; for dependent inputs they depend on the analysis ordering
    and should be read as diagnostics only.
    """
    denom = m.sample_variance if denominator == "sample" else m.explained_variance
    if denom <= 0.0:
        return {}
    perm = m.basis.basis.permutation
    shares: dict[tuple[int, ...], float] = {}
    for j, mi in enumerate(m.basis.monomials):
        if mi.degree == 0:
            continue
        cols = tuple(sorted(perm[pos] for pos in mi.support))
        shares[cols] = shares.get(cols, 0.0) + float(m.coefficients[j]) ** 2
    return {cols: v / denom for cols, v in shares.items()}
