"""Empirical inner product and modified Gram-Schmidt orthonormalization.

The inner product of two sample vectors is the plain average (1/N) sum f_k g_k,
i.e. the expectation under the discrete uniform measure on the observed rows.

Orthonormalization runs in two stages.  Each input column first gets its own
family of univariate polynomials, orthonormal under that column's empirical
marginal; the working basis is then tensor products of those factors, one per
exponent vector, walked in the ordered-partition sequence by the multivariate
modified Gram-Schmidt pass.  Starting from marginal-orthonormal factors
instead of raw powers matters: every factor of degree >= 1 averages to zero,
so a cross term such as q2(x1)q1(x4) carries no main effect of x4 and block
sums stay readable as variance contributions even when input means and
variances are arbitrary.  The multivariate pass then removes what joint
dependence between inputs still mixes in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import MultiIndex, OrderedBasis
from .errors import (
    DataError,
    DimensionError,
    InsufficientSamplesError,
    LinearDependenceError,
    NumericalError,
)


@dataclass(frozen=True)
class Dataset:
    """Paired observations: an (N, n) input matrix and a length-N output.

    ``column_names`` holds the n input names followed by the output name.
    Arrays are copied, coerced to float64 and frozen; non-finite entries are
    rejected up front.
    """

    inputs: np.ndarray
    output: np.ndarray
    column_names: tuple[str, ...]

    def __post_init__(self):
        inputs = np.array(self.inputs, dtype=np.float64, order="C")
        output = np.array(self.output, dtype=np.float64)
        if inputs.ndim != 2 or inputs.shape[1] < 1:
            raise DimensionError("inputs must be a 2-D (N, n) matrix")
        if output.ndim != 1:
            raise DimensionError("output must be a 1-D vector")
        if inputs.shape[0] != output.shape[0]:
            raise DimensionError(
                f"{inputs.shape[0]} input rows vs {output.shape[0]} output values"
            )
        if inputs.shape[0] < 1:
            raise DataError("dataset is empty")
        if not np.isfinite(inputs).all():
            raise DataError("inputs contain NaN or infinite entries")
        if not np.isfinite(output).all():
            raise DataError("output contains NaN or infinite entries")
        names = tuple(str(c) for c in self.column_names)
        if len(names) != inputs.shape[1] + 1:
            raise DimensionError(
                f"expected {inputs.shape[1] + 1} column names, got {len(names)}"
            )
        inputs.setflags(write=False)
        output.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "output", output)
        object.__setattr__(self, "column_names", names)

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    @property
    def input_names(self) -> tuple[str, ...]:
        return self.column_names[:-1]

    @property
    def output_name(self) -> str:
        return self.column_names[-1]

    def take_rows(self, rows: np.ndarray) -> "Dataset":
        """Row-resampled copy (used by the bootstrap)."""
        return Dataset(self.inputs[rows], self.output[rows], self.column_names)


@dataclass(frozen=True)
class OrthoOptions:
    """Knobs for the orthogonalization.

    drop_tolerance is relative: a residual with norm below
    drop_tolerance * (norm of the incoming basis column) counts as linearly
    dependent.  By default that raises; with drop_dependent=True the offending
    element is removed instead and recorded.  reorthogonalize runs every
    projection sweep a second time before normalizing, which keeps the Gram
    matrix within 1e-8 of the identity on realistically conditioned data.
    """

    drop_dependent: bool = False
    drop_tolerance: float = 1e-10
    reorthogonalize: bool = True


def empirical_inner(f_values, g_values) -> float:
    """Sample-average inner product (1/N) sum f_k g_k."""
    f = np.asarray(f_values, dtype=np.float64)
    g = np.asarray(g_values, dtype=np.float64)
    if f.shape != g.shape or f.ndim != 1:
        raise DimensionError(
            f"inner product needs equal-length vectors, got {f.shape} and {g.shape}"
        )
    return float(f @ g) / f.shape[0]


class MonomialMatrixCache:
    """Raw monomial evaluation columns, keyed by dataset-coordinate exponents.

    Sharing one cache across different input orderings is free because a
    monomial's values do not depend on the analysis order, only its position
    in the orthogonalization does.
    """

    def __init__(self, inputs: np.ndarray):
        self._inputs = np.asarray(inputs, dtype=np.float64)
        if self._inputs.ndim != 2:
            raise DimensionError("inputs must be a 2-D (N, n) matrix")
        self._ones = np.ones(self._inputs.shape[0])
        self._ones.setflags(write=False)
        self._powers: dict[int, list[np.ndarray]] = {}
        self._columns: dict[tuple[int, ...], np.ndarray] = {}

    @property
    def n_inputs(self) -> int:
        return self._inputs.shape[1]

    def _power(self, col: int, exponent: int) -> np.ndarray:
        table = self._powers.setdefault(col, [self._ones])
        with np.errstate(over="ignore"):  # overflow is caught as non-finite later
            while len(table) <= exponent:
                table.append(table[-1] * self._inputs[:, col])
        return table[exponent]

    def column(self, dataset_exponents: tuple[int, ...]) -> np.ndarray:
        cached = self._columns.get(dataset_exponents)
        if cached is not None:
            return cached
        out = None
        for col, e in enumerate(dataset_exponents):
            if e == 0:
                continue
            pw = self._power(col, e)
            out = pw.copy() if out is None else out * pw
        if out is None:
            out = self._ones
        else:
            out.setflags(write=False)
        self._columns[dataset_exponents] = out
        return out

    def matrix_for(self, ob: OrderedBasis) -> np.ndarray:
        if len(ob.permutation) != self.n_inputs:
            raise DimensionError(
                f"basis expects {len(ob.permutation)} inputs, data has {self.n_inputs}"
            )
        monomials = ob.flattened()
        out = np.empty((self._inputs.shape[0], len(monomials)))
        for j, mi in enumerate(monomials):
            out[:, j] = self.column(mi.to_dataset_exponents(ob.permutation))
        if not np.isfinite(out).all():
            bad = int(np.argwhere(~np.isfinite(out))[0, 1])
            raise NumericalError(
                f"monomial {monomials[bad].label()} evaluated to a non-finite value; "
                "consider rescaling the inputs or lowering the degree"
            )
        return out


def evaluate_monomials(ds: Dataset, ob: OrderedBasis) -> np.ndarray:
    """(N, P+1) matrix of raw monomial values, columns in ``ob``'s order."""
    return MonomialMatrixCache(ds.inputs).matrix_for(ob)


def orthonormalize_columns(
    matrix: np.ndarray, opts: OrthoOptions
) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[int]]:
    """Sequential modified Gram-Schmidt on the columns of ``matrix``.

    Dependent columns (relative residual norm below opts.drop_tolerance) are
    skipped and reported, never raised here; the caller decides what a skip
    means.  Returns (orthonormal columns, upper-triangular coefficient matrix
    over the kept columns, pre-normalization norms, kept column indices).
    """
    n_samples, n_cols = matrix.shape
    psi = np.empty((n_samples, n_cols))
    coeff = np.zeros((n_cols, n_cols))
    norms = np.empty(n_cols)
    kept: list[int] = []
    passes = 2 if opts.reorthogonalize else 1

    for t in range(n_cols):
        e = matrix[:, t]
        norm_e = math.sqrt(float(e @ e) / n_samples)
        phi = e.copy()
        c = np.zeros(n_cols)
        c[t] = 1.0
        k = len(kept)
        for _ in range(passes):
            for j in range(k):
                r = float(phi @ psi[:, j]) / n_samples
                phi -= r * psi[:, j]
                c -= r * coeff[:, j]
        norm_phi = math.sqrt(float(phi @ phi) / n_samples)
        if not math.isfinite(norm_phi):
            raise NumericalError(f"non-finite residual at basis column {t}")
        if norm_e == 0.0 or norm_phi < opts.drop_tolerance * norm_e:
            continue
        psi[:, k] = phi / norm_phi
        coeff[:, k] = c / norm_phi
        norms[k] = norm_phi
        kept.append(t)

    n_kept = len(kept)
    return (
        psi[:, :n_kept].copy(),
        coeff[np.ix_(kept, range(n_kept))],
        norms[:n_kept].copy(),
        kept,
    )


class TensorFactorCache:
    """Per-dataset univariate factor tables and tensor-product columns.

    For each input column, raw powers of the standardized values are
    orthonormalized against the column's empirical marginal (a univariate
    Gram-Schmidt, run twice).  A basis element with exponents (a, b, ...) is
    then the pointwise product q_a(x_1) q_b(x_2) ...; products are cached by
    dataset-coordinate exponents so one cache serves every input ordering.

    A column degree that is empirically dependent on lower degrees (fewer
    distinct values than p+1) yields an all-zero factor; the multivariate pass
    turns that into a dependence error or a recorded drop.
    """

    def __init__(self, inputs: np.ndarray, degree: int, opts: OrthoOptions):
        inputs = np.asarray(inputs, dtype=np.float64)
        if inputs.ndim != 2:
            raise DimensionError("inputs must be a 2-D (N, n) matrix")
        self.degree = degree
        n_samples, n_inputs = inputs.shape
        self.shift = inputs.mean(axis=0)
        scale = inputs.std(axis=0)
        self.scale = np.where(scale > 0.0, scale, 1.0)
        standardized = (inputs - self.shift) / self.scale

        self.factors: list[np.ndarray] = []
        self.univariate_transforms: list[np.ndarray] = []
        for col in range(n_inputs):
            powers = np.empty((n_samples, degree + 1))
            powers[:, 0] = 1.0
            for k in range(1, degree + 1):
                powers[:, k] = powers[:, k - 1] * standardized[:, col]
            q, u, _, kept = orthonormalize_columns(powers, opts)
            factor = np.zeros((n_samples, degree + 1))
            transform = np.zeros((degree + 1, degree + 1))
            for j, t in enumerate(kept):
                factor[:, t] = q[:, j]
                transform[np.ix_(kept, [t])] = u[:, [j]]
            self.factors.append(factor)
            self.univariate_transforms.append(transform)

        self._ones = np.ones(n_samples)
        self._ones.setflags(write=False)
        self._columns: dict[tuple[int, ...], np.ndarray] = {}

    @property
    def n_inputs(self) -> int:
        return len(self.factors)

    def column(self, dataset_exponents: tuple[int, ...]) -> np.ndarray:
        cached = self._columns.get(dataset_exponents)
        if cached is not None:
            return cached
        out = None
        for col, e in enumerate(dataset_exponents):
            if e == 0:
                continue
            factor = self.factors[col][:, e]
            out = factor.copy() if out is None else out * factor
        if out is None:
            out = self._ones
        else:
            out.setflags(write=False)
        self._columns[dataset_exponents] = out
        return out

    def matrix_for(self, ob: OrderedBasis) -> np.ndarray:
        if len(ob.permutation) != self.n_inputs:
            raise DimensionError(
                f"basis expects {len(ob.permutation)} inputs, data has {self.n_inputs}"
            )
        if ob.p > self.degree:
            raise DimensionError(
                f"cache built for degree {self.degree}, basis needs {ob.p}"
            )
        monomials = ob.flattened()
        out = np.empty((self._ones.shape[0], len(monomials)))
        for j, mi in enumerate(monomials):
            out[:, j] = self.column(mi.to_dataset_exponents(ob.permutation))
        if not np.isfinite(out).all():
            bad = int(np.argwhere(~np.isfinite(out))[0, 1])
            raise NumericalError(
                f"basis element {monomials[bad].label()} evaluated to a non-finite "
                "value; consider rescaling the inputs or lowering the degree"
            )
        return out


def build_cache(ds: Dataset, degree: int, opts: OrthoOptions) -> TensorFactorCache:
    return TensorFactorCache(ds.inputs, degree, opts)


@dataclass(frozen=True)
class OrthonormalBasis:
    """Result of the orthogonalization.

    ``transform`` is upper triangular with positive diagonal over the kept
    basis elements: evaluating the tensor-factor columns into a matrix E and
    forming E @ transform reproduces the orthonormal polynomial evaluations,
    so polynomial i only involves basis elements 0..i.  ``norms`` are the
    residual norms seen just before each normalization.  ``dropped`` lists
    (position, exponent vector) pairs removed as numerically dependent (empty
    unless drop_dependent was set).  ``input_shift``/``input_scale`` and
    ``univariate_transforms`` reproduce the per-column factors on new data.
    """

    transform: np.ndarray
    basis: OrderedBasis
    norms: np.ndarray
    dropped: tuple[tuple[int, MultiIndex], ...]
    kept_positions: tuple[int, ...]
    monomials: tuple[MultiIndex, ...]
    block_labels: tuple[str, ...]
    gram_deviation: float
    n_samples: int
    input_shift: np.ndarray
    input_scale: np.ndarray
    univariate_transforms: tuple[np.ndarray, ...]
    train_evaluations: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.transform.shape[0]

    def block_slices(self) -> list[tuple[str, slice]]:
        """Contiguous (label, positions) runs of the kept basis elements."""
        out: list[tuple[str, slice]] = []
        start = 0
        for i, label in enumerate(self.block_labels):
            if i + 1 == len(self.block_labels) or self.block_labels[i + 1] != label:
                out.append((label, slice(start, i + 1)))
                start = i + 1
        return out


def modified_gram_schmidt(
    ds: Dataset, ob: OrderedBasis, opts: OrthoOptions | None = None
) -> OrthonormalBasis:
    """Orthonormalize the ordered basis against the joint empirical measure.

    Walks the basis elements in block order; each one is reduced by the
    projections onto the polynomials already produced, subtracting with the
    running residual (the modified update, which is what keeps rounding errors
    from compounding), then normalized.  With ``opts.reorthogonalize`` the
    projection sweep runs twice per polynomial.

    Raises InsufficientSamplesError when N < P+1, and LinearDependenceError
    when an element's residual norm falls below the relative drop tolerance
    (unless ``opts.drop_dependent`` asks for removal instead).
    """
    opts = opts or OrthoOptions()
    return _mgs_from_cache(ds, ob, opts, build_cache(ds, ob.p, opts))


def _mgs_from_cache(
    ds: Dataset, ob: OrderedBasis, opts: OrthoOptions, cache: TensorFactorCache
) -> OrthonormalBasis:
    E = cache.matrix_for(ob)
    n_samples, n_terms = E.shape
    if n_samples < n_terms:
        raise InsufficientSamplesError(
            f"{n_samples} samples cannot support {n_terms} basis terms; "
            f"need N >= {n_terms}"
        )
    monomials = ob.flattened()
    labels = ob.flattened_labels()

    psi, transform, norms, kept = orthonormalize_columns(E, opts)
    if len(kept) < n_terms and not opts.drop_dependent:
        dropped_pos = sorted(set(range(n_terms)) - set(kept))[0]
        label = monomials[dropped_pos].label(
            tuple(ds.input_names[col] for col in ob.permutation)
        )
        raise LinearDependenceError(
            f"basis element {label} (position {dropped_pos}) is numerically "
            "dependent on its predecessors; drop_dependent=True removes it instead",
            position=dropped_pos,
            monomial_label=label,
        )
    dropped = tuple(
        (t, monomials[t]) for t in sorted(set(range(n_terms)) - set(kept))
    )

    n_kept = len(kept)
    gram = psi.T @ psi / n_samples
    gram_deviation = float(np.abs(gram - np.eye(n_kept)).max()) if n_kept else 0.0

    for arr in (psi, transform, norms):
        arr.setflags(write=False)
    return OrthonormalBasis(
        transform=transform,
        basis=ob,
        norms=norms,
        dropped=dropped,
        kept_positions=tuple(kept),
        monomials=tuple(monomials[t] for t in kept),
        block_labels=tuple(labels[t] for t in kept),
        gram_deviation=gram_deviation,
        n_samples=n_samples,
        input_shift=cache.shift,
        input_scale=cache.scale,
        univariate_transforms=tuple(cache.univariate_transforms),
        train_evaluations=psi,
    )


def evaluate_basis(onb: OrthonormalBasis, new_inputs) -> np.ndarray:
    """Evaluate the orthonormal polynomials on new input rows."""
    inputs = np.asarray(new_inputs, dtype=np.float64)
    if inputs.ndim == 1:
        inputs = inputs[None, :]
    if inputs.shape[1] != len(onb.basis.permutation):
        raise DimensionError(
            f"expected {len(onb.basis.permutation)} input columns, got {inputs.shape[1]}"
        )
    if not np.isfinite(inputs).all():
        raise DataError("evaluation points contain NaN or infinite entries")

    degree = onb.basis.p
    standardized = (inputs - onb.input_shift) / onb.input_scale
    factors = []
    for col in range(inputs.shape[1]):
        powers = np.empty((inputs.shape[0], degree + 1))
        powers[:, 0] = 1.0
        for k in range(1, degree + 1):
            powers[:, k] = powers[:, k - 1] * standardized[:, col]
        factors.append(powers @ onb.univariate_transforms[col])

    perm = onb.basis.permutation
    E = np.empty((inputs.shape[0], onb.size))
    for j, mi in enumerate(onb.monomials):
        col = np.ones(inputs.shape[0])
        for dataset_col, e in enumerate(mi.to_dataset_exponents(perm)):
            if e:
                col = col * factors[dataset_col][:, e]
        E[:, j] = col
    out = E @ onb.transform
    if not np.isfinite(out).all():
        raise NumericalError("basis evaluation produced non-finite values")
    return out
