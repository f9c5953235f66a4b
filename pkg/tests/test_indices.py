import warnings

import numpy as np
import pytest

from gsa_pce.basis import Block, OrderedBasis, enumerate_monomials, partition_full
from gsa_pce.errors import ConfigError, DegenerateOutputWarning
from gsa_pce.indices import (
    Pipeline,
    all_indices,
    conditional_total_sweep,
    first_order_full,
    first_order_uncorrelated,
    group_total,
    interaction_coefficient_report,
    order_based_sweep,
    screen_interactions,
    total_full,
    total_uncorrelated,
)
from gsa_pce.ortho import Dataset, modified_gram_schmidt
from gsa_pce.pce import fit
from oracles import rng


def make_ds(inputs, y, names=None):
    names = names or tuple(f"X{i+1}" for i in range(inputs.shape[1])) + ("Y",)
    return Dataset(inputs, y, names)


def test_first_order_full_identity_model():
    r = rng(40)
    x = r.random((600, 2))
    ds = make_ds(x, x[:, 0].copy())
    assert first_order_full(ds, 2, 0) == pytest.approx(1.0, abs=1e-9)
    assert first_order_full(ds, 2, 1) == pytest.approx(0.0, abs=0.02)


def test_total_full_pure_interaction():
    r = rng(41)
    x = r.standard_normal((800, 2))
    ds = make_ds(x, x[:, 0] * x[:, 1])
    # the interaction lives in the leading input's blocks, up to the O(k/N)
    # finite-sample exchange with the later pure-x2 blocks
    assert total_full(ds, 2, 0) == pytest.approx(1.0, abs=0.01)
    assert first_order_full(ds, 2, 0) == pytest.approx(0.0, abs=0.03)


def test_indices_of_constant_output_are_zero():
    r = rng(42)
    ds = make_ds(r.random((200, 3)), np.full(200, 2.5))
    assert total_full(ds, 2, 0) == 0.0
    assert total_uncorrelated(ds, 2, 1) == 0.0
    assert first_order_uncorrelated(ds, 2, 2) == 0.0
    sweep = conditional_total_sweep(ds, 2)
    assert [v for _, v in sweep] == [0.0, 0.0, 0.0]


def test_conditional_sweep_additive_matches_sobol():
    r = rng(43)
    x = r.standard_normal((4000, 3))
    ds = make_ds(x, x.sum(axis=1))
    sweep = conditional_total_sweep(ds, 2)
    for col, value in sweep:
        assert value == pytest.approx(1 / 3, abs=0.02)
    assert [c for c, _ in sweep] == [0, 1, 2]


def test_conditional_sweep_budget_identity():
    from gsa_pce.benchmarks import BenchmarkSpec, generate

    ds = generate(BenchmarkSpec(3, 2500, seed=44))
    pipe = Pipeline(ds, 2)
    sweep = conditional_total_sweep(ds, 2, pipeline=pipe)
    model = pipe.model("nested")
    assert sum(v for _, v in sweep) == pytest.approx(model.r_squared, abs=1e-10)
    assert model.r_squared >= 0.999

    # with the expansion-variance denominator the sweep sums to exactly 1,
    # i.e. r_squared * (sample variance / denominator)
    sweep_pce = conditional_total_sweep(ds, 2, denominator="pce", pipeline=pipe)
    assert sum(v for _, v in sweep_pce) == pytest.approx(1.0, abs=1e-10)


def test_conditional_sweep_custom_order():
    r = rng(45)
    x = r.random((1500, 3))
    ds = make_ds(x, 2 * x[:, 2].copy())
    sweep = conditional_total_sweep(ds, 2, (2, 0, 1))
    assert sweep[0][0] == 2
    assert sweep[0][1] == pytest.approx(1.0, abs=1e-9)
    assert sweep[1][1] == pytest.approx(0.0, abs=1e-9)


def test_group_total_additive_groups():
    r = rng(46)
    x = r.standard_normal((4000, 3))
    y = x[:, 0] * x[:, 1] + x[:, 2]
    ds = make_ds(x, y)
    # Var(x1 x2) = 1, Var(x3) = 1
    assert group_total(ds, 2, (0, 1)) == pytest.approx(0.5, abs=0.03)
    assert group_total(ds, 2, (2,)) == pytest.approx(0.5, abs=0.03)


def test_group_total_validation():
    r = rng(47)
    ds = make_ds(r.random((100, 3)), r.random(100))
    with pytest.raises(ConfigError):
        group_total(ds, 2, ())
    with pytest.raises(ConfigError):
        group_total(ds, 2, (0, 0))
    with pytest.raises(ConfigError):
        group_total(ds, 2, (5,))


def test_uncorrelated_equals_full_for_independent_inputs():
    r = rng(48)
    x = r.random((5000, 2))
    ds = make_ds(x, x[:, 0] + x[:, 1] ** 2)
    assert first_order_uncorrelated(ds, 3, 0) == pytest.approx(
        first_order_full(ds, 3, 0), abs=0.02
    )
    assert total_uncorrelated(ds, 3, 0) == pytest.approx(
        total_full(ds, 3, 0), abs=0.02
    )


def test_order_sweep_additive_model():
    r = rng(49)
    x = r.random((2000, 3))
    ds = make_ds(x, x.sum(axis=1))
    sweep = order_based_sweep(ds, 2)
    assert sweep.entries[0][1] == pytest.approx(sweep.r_squared, abs=1e-9)
    assert sweep.entries[1][1] == pytest.approx(0.0, abs=1e-9)
    assert screen_interactions(sweep) == 1


def test_order_sweep_three_way_interaction():
    r = rng(50)
    x = r.standard_normal((4000, 3))
    ds = make_ds(x, x[:, 0] * x[:, 1] * x[:, 2])
    sweep = order_based_sweep(ds, 3)
    assert sweep.entries[2][1] >= 0.95
    assert screen_interactions(sweep) == 3


def test_screen_constant_output_warns():
    r = rng(51)
    ds = make_ds(r.random((200, 2)), np.zeros(200))
    sweep = order_based_sweep(ds, 2)
    with pytest.warns(DegenerateOutputWarning):
        assert screen_interactions(sweep) == 0


def test_screen_threshold_validation():
    r = rng(52)
    ds = make_ds(r.random((100, 2)), r.random(100))
    sweep = order_based_sweep(ds, 2)
    with pytest.raises(ConfigError):
        screen_interactions(sweep, 0.0)
    with pytest.raises(ConfigError):
        screen_interactions(sweep, 1.5)


def test_interaction_coefficients_single_dominant_term():
    r = rng(53)
    x = r.random((3000, 3))
    ds = make_ds(x, 5.0 * x[:, 0] * x[:, 1])
    report = interaction_coefficient_report(ds, 2, 2)
    assert report[0][0] == "X1*X2"
    total = sum(theta**2 for _, theta in report)
    assert report[0][1] ** 2 >= 0.999 * total


def test_interaction_coefficients_additive_model_near_zero():
    r = rng(54)
    x = r.random((3000, 3))
    ds = make_ds(x, x.sum(axis=1))
    report = interaction_coefficient_report(ds, 2, 2)
    assert max(abs(theta) for _, theta in report) <= 0.02 * np.std(x.sum(axis=1))


def test_all_indices_empty_families():
    r = rng(55)
    ds = make_ds(r.random((100, 2)), r.random(100))
    report = all_indices(ds, 2, ())
    assert report.entries == ()


def test_all_indices_single_input():
    r = rng(56)
    x = r.random((500, 1))
    ds = make_ds(x, 2 * x[:, 0] + 1)
    report = all_indices(ds, 2, ("full", "uncorrelated"))
    assert report.find("first_order_full", "X1").value == pytest.approx(1.0, abs=1e-9)
    assert report.find("total_uncorrelated", "X1").value == pytest.approx(1.0, abs=1e-9)


def test_all_indices_unknown_family():
    r = rng(57)
    ds = make_ds(r.random((100, 2)), r.random(100))
    with pytest.raises(ConfigError):
        all_indices(ds, 2, ("full", "bogus"))
    with pytest.raises(ConfigError):
        all_indices(ds, 2, ("groups",))


def test_all_indices_values_clamped_and_raw_kept():
    r = rng(58)
    x = r.random((300, 2))
    ds = make_ds(x, x[:, 0].copy())
    report = all_indices(ds, 2, ("full", "uncorrelated", "conditional", "order"))
    for entry in report.entries:
        assert 0.0 <= entry.value <= 1.0
        assert entry.raw_value == pytest.approx(entry.value, abs=1e-9)
    assert "r_squared" in report.diagnostics


def test_all_indices_conditional_given_lists_predecessors():
    r = rng(59)
    ds = make_ds(r.random((400, 3)), r.random(400))
    report = all_indices(ds, 2, ("conditional",))
    given = [e.given for e in report.entries]
    assert given == [(), ("X1",), ("X1", "X2")]


def test_within_block_shuffle_invariance():
    from gsa_pce.benchmarks import BenchmarkSpec, generate

    ds = generate(BenchmarkSpec(2, 700, seed=60))
    ob = partition_full(enumerate_monomials(4, 3))
    model = fit(ds, modified_gram_schmidt(ds, ob))
    sums = dict(model.block_variance.per_block)

    shuffler = rng(61)
    blocks = []
    for block in ob.blocks:
        members = list(block.members)
        shuffler.shuffle(members)
        blocks.append(Block(block.label, tuple(members)))
    shuffled = OrderedBasis(tuple(blocks), ob.permutation, ob.partition, ob.n, ob.p)
    model2 = fit(ds, modified_gram_schmidt(ds, shuffled))
    sums2 = dict(model2.block_variance.per_block)
    for label, value in sums.items():
        assert sums2[label] == pytest.approx(value, abs=1e-8)


def test_positive_scaling_leaves_indices_unchanged():
    from gsa_pce.benchmarks import BenchmarkSpec, generate

    ds = generate(BenchmarkSpec(2, 600, seed=62))
    scaled_inputs = ds.inputs.copy()
    scaled_inputs[:, 2] *= 250.0
    scaled = Dataset(scaled_inputs, ds.output, ds.column_names)
    for target in range(4):
        assert total_full(scaled, 2, target) == pytest.approx(
            total_full(ds, 2, target), abs=1e-8
        )
        assert total_uncorrelated(scaled, 2, target) == pytest.approx(
            total_uncorrelated(ds, 2, target), abs=1e-8
        )


def test_affine_invariance_of_first_order_full():
    from gsa_pce.benchmarks import BenchmarkSpec, generate

    ds = generate(BenchmarkSpec(1, 800, seed=63, rho=(0.5, 0.8, 0.0)))
    shifted_inputs = ds.inputs.copy()
    shifted_inputs[:, 1] = -1.7 * shifted_inputs[:, 1] + 4.0
    shifted = Dataset(shifted_inputs, ds.output, ds.column_names)
    for target in range(3):
        assert first_order_full(shifted, 2, target) == pytest.approx(
            first_order_full(ds, 2, target), abs=1e-8
        )


def test_pipeline_caches_fits():
    r = rng(64)
    ds = make_ds(r.random((200, 2)), r.random(200))
    pipe = Pipeline(ds, 2)
    a = pipe.model("full", (0, 1))
    b = pipe.model("full", (0, 1))
    assert a is b
    c = pipe.model("full", (1, 0))
    assert c is not a
