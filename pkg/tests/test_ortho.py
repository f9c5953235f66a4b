import numpy as np
import pytest

from gsa_pce.basis import Block, OrderedBasis, enumerate_monomials, partition_full
from gsa_pce.errors import (
    DataError,
    DimensionError,
    InsufficientSamplesError,
    LinearDependenceError,
)
from gsa_pce.ortho import (
    Dataset,
    OrthoOptions,
    empirical_inner,
    evaluate_basis,
    evaluate_monomials,
    modified_gram_schmidt,
    orthonormalize_columns,
)
from oracles import classical_gram_schmidt, gram_deviation, rng


def make_dataset(inputs, output=None, names=None):
    inputs = np.asarray(inputs, dtype=float)
    if output is None:
        output = np.zeros(inputs.shape[0])
    if names is None:
        names = tuple(f"X{i+1}" for i in range(inputs.shape[1])) + ("Y",)
    return Dataset(inputs, output, names)


def test_empirical_inner_examples():
    assert empirical_inner([1, 1, 1], [1, 1, 1]) == pytest.approx(1.0)
    assert empirical_inner([1, -1], [1, 1]) == pytest.approx(0.0)
    assert empirical_inner([-1, 0, 1], [-1, 0, 1]) == pytest.approx(2 / 3)


def test_empirical_inner_length_mismatch():
    with pytest.raises(DimensionError):
        empirical_inner([1, 2], [1, 2, 3])


def test_dataset_rejects_non_finite():
    with pytest.raises(DataError):
        make_dataset([[1.0], [np.nan]])
    with pytest.raises(DataError):
        make_dataset([[1.0], [2.0]], output=[1.0, np.inf])


def test_dataset_shape_checks():
    with pytest.raises(DimensionError):
        Dataset(np.ones((3, 2)), np.ones(4), ("a", "b", "y"))
    with pytest.raises(DimensionError):
        Dataset(np.ones((3, 2)), np.ones(3), ("a", "y"))


def test_evaluate_monomials_rows():
    ob = partition_full(enumerate_monomials(1, 2))
    ds = make_dataset([[2.0]])
    row = evaluate_monomials(ds, ob)[0]
    assert row == pytest.approx([1.0, 2.0, 4.0])


def test_evaluate_monomials_product():
    ob = partition_full(enumerate_monomials(2, 2))
    ds = make_dataset([[2.0, 3.0]])
    matrix = evaluate_monomials(ds, ob)
    position = ob.flattened().index(next(
        m for m in ob.flattened() if m.exponents == (1, 1)
    ))
    assert matrix[0, position] == pytest.approx(6.0)
    assert matrix[:, 0] == pytest.approx([1.0])


def test_evaluate_monomials_respects_permutation():
    from gsa_pce.basis import permute_inputs

    ob = permute_inputs(partition_full(enumerate_monomials(2, 1)), (1, 0))
    ds = make_dataset([[2.0, 5.0]])
    matrix = evaluate_monomials(ds, ob)
    # analysis position 1 is dataset column 2, so pure:1 evaluates to 5
    assert matrix[0].tolist() == [1.0, 5.0, 2.0]


def test_mgs_symmetric_three_point_example():
    ds = make_dataset([[-1.0], [0.0], [1.0]])
    onb = modified_gram_schmidt(ds, partition_full(enumerate_monomials(1, 1)))
    psi = onb.train_evaluations
    assert psi[:, 0] == pytest.approx([1.0, 1.0, 1.0])
    assert psi[:, 1] == pytest.approx(np.sqrt(1.5) * np.array([-1.0, 0.0, 1.0]))


def test_mgs_constant_polynomial_is_one():
    data = rng(1).standard_normal((60, 2))
    ds = make_dataset(data)
    onb = modified_gram_schmidt(ds, partition_full(enumerate_monomials(2, 2)))
    assert onb.train_evaluations[:, 0] == pytest.approx(np.ones(60))


def test_mgs_insufficient_samples():
    ds = make_dataset(rng(2).standard_normal((5, 2)))
    with pytest.raises(InsufficientSamplesError):
        modified_gram_schmidt(ds, partition_full(enumerate_monomials(2, 2)))


def duplicated_basis(n, p):
    ob = partition_full(enumerate_monomials(n, p))
    pure = ob.blocks[1]
    doubled = Block(pure.label, pure.members + (pure.members[0],))
    blocks = (ob.blocks[0], doubled) + ob.blocks[2:]
    return OrderedBasis(blocks, ob.permutation, ob.partition, ob.n, ob.p)


def test_mgs_duplicate_monomial_raises():
    ds = make_dataset(rng(3).standard_normal((80, 2)))
    with pytest.raises(LinearDependenceError) as err:
        modified_gram_schmidt(ds, duplicated_basis(2, 2))
    assert "X1" in str(err.value)


def test_mgs_drop_dependent_records_and_continues():
    ds = make_dataset(rng(3).standard_normal((80, 2)))
    onb = modified_gram_schmidt(
        ds, duplicated_basis(2, 2), OrthoOptions(drop_dependent=True)
    )
    assert len(onb.dropped) == 1
    assert onb.size == 6
    assert onb.gram_deviation < 1e-8


def test_gram_identity_on_dependent_inputs():
    r = rng(4)
    z = r.standard_normal((400, 3))
    inputs = z @ np.array([[1.0, 0.6, 0.0], [0.0, 0.8, 0.3], [0.0, 0.0, 1.0]])
    ds = make_dataset(inputs)
    onb = modified_gram_schmidt(ds, partition_full(enumerate_monomials(3, 3)))
    assert onb.gram_deviation <= 1e-8
    assert gram_deviation(onb.train_evaluations) <= 1e-8


def test_triangular_transform_and_prefix_spans():
    r = rng(5)
    ds = make_dataset(r.random((200, 2)))
    onb = modified_gram_schmidt(ds, partition_full(enumerate_monomials(2, 3)))
    transform = onb.transform
    assert np.allclose(transform, np.triu(transform))
    assert (np.diag(transform) > 0).all()

    # every prebasis element is recovered by projecting onto psi_0..psi_m
    prebasis = onb.train_evaluations @ np.linalg.inv(transform)
    n = ds.n_samples
    for m in range(onb.size):
        e = prebasis[:, m]
        coef = onb.train_evaluations[:, : m + 1].T @ e / n
        recovered = onb.train_evaluations[:, : m + 1] @ coef
        assert np.linalg.norm(recovered - e) <= 1e-8 * np.linalg.norm(e)


def test_modified_beats_classical_on_ill_conditioned_columns():
    r = rng(6)
    x = r.random(300)
    degree = 11
    powers = np.column_stack([x**k for k in range(degree + 1)])
    opts = OrthoOptions(reorthogonalize=False, drop_tolerance=1e-14)
    psi, _, _, kept = orthonormalize_columns(powers, opts)
    assert len(kept) == degree + 1
    modified_dev = gram_deviation(psi)
    classical_dev = gram_deviation(classical_gram_schmidt(powers))
    assert modified_dev <= classical_dev
    assert classical_dev > 1e-8  # the comparison is non-trivial


def test_scaling_equivariance():
    r = rng(7)
    base = r.random((300, 2)) + 0.5
    scaled = base.copy()
    scaled[:, 1] *= 37.0
    ob = partition_full(enumerate_monomials(2, 3))
    psi_a = modified_gram_schmidt(make_dataset(base), ob).train_evaluations
    psi_b = modified_gram_schmidt(make_dataset(scaled), ob).train_evaluations
    assert np.abs(psi_a - psi_b).max() <= 1e-8


def test_evaluate_basis_reproduces_training_columns():
    r = rng(8)
    ds = make_dataset(r.random((150, 2)))
    onb = modified_gram_schmidt(ds, partition_full(enumerate_monomials(2, 2)))
    again = evaluate_basis(onb, ds.inputs)
    assert np.abs(again - onb.train_evaluations).max() <= 1e-8
    assert gram_deviation(again) <= 1e-8


def test_evaluate_basis_constant_and_single_point():
    r = rng(9)
    ds = make_dataset(r.random((100, 2)))
    onb = modified_gram_schmidt(ds, partition_full(enumerate_monomials(2, 2)))
    fresh = evaluate_basis(onb, r.random((20, 2)))
    assert fresh[:, 0] == pytest.approx(np.ones(20))
    point = evaluate_basis(onb, ds.inputs[3])
    assert point[0] == pytest.approx(onb.train_evaluations[3], rel=1e-8, abs=1e-10)


def test_evaluate_basis_dimension_mismatch():
    ds = make_dataset(rng(10).random((50, 2)))
    onb = modified_gram_schmidt(ds, partition_full(enumerate_monomials(2, 1)))
    with pytest.raises(DimensionError):
        evaluate_basis(onb, np.ones((5, 3)))


def test_norms_are_prenormalization_residual_norms():
    ds = make_dataset(np.array([[-1.0], [0.0], [1.0]]))
    onb = modified_gram_schmidt(ds, partition_full(enumerate_monomials(1, 1)))
    assert onb.norms[0] == pytest.approx(1.0)
    assert onb.norms[1] == pytest.approx(1.0)  # univariate factor is prenormalized


def test_raw_monomial_overflow_is_surfaced():
    from gsa_pce.errors import NumericalError

    ds = make_dataset([[1e200], [2e200], [-3e200]])
    with pytest.raises(NumericalError):
        evaluate_monomials(ds, partition_full(enumerate_monomials(1, 2)))


def test_extreme_scales_are_handled_by_standardized_factors():
    # the orthonormalization works on standardized columns, so inputs with
    # enormous magnitudes stay finite through high powers
    r = rng(11)
    inputs = np.column_stack([r.random(200) * 1e150, r.random(200)])
    ds = make_dataset(inputs)
    onb = modified_gram_schmidt(ds, partition_full(enumerate_monomials(2, 3)))
    assert onb.gram_deviation <= 1e-8
