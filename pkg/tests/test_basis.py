import math

import pytest

from gsa_pce.basis import (
    MultiIndex,
    basis_size,
    cyclic_permutation,
    enumerate_monomials,
    partition_full,
    partition_nested,
    partition_order_based,
    partition_uncorrelated,
    permute_inputs,
)
from gsa_pce.errors import BasisSizeError, InvalidPermutationError


def labels(block):
    return [m.label() for m in block.members]


def block_map(ob):
    return {b.label: b.members for b in ob.blocks}


def test_basis_size_values():
    assert basis_size(3, 3) == 20
    assert basis_size(1, 0) == 1
    assert basis_size(4, 2) == 15


def test_basis_size_validation():
    with pytest.raises(ValueError):
        basis_size(0, 2)
    with pytest.raises(ValueError):
        basis_size(2, -1)
    with pytest.raises(BasisSizeError):
        basis_size(200, 200)


def test_enumerate_small_case():
    ms = enumerate_monomials(2, 2)
    assert [m.label() for m in ms.members] == ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"]


def test_enumerate_univariate():
    ms = enumerate_monomials(1, 3)
    assert [m.label() for m in ms.members] == ["1", "x1", "x1^2", "x1^3"]


def test_enumerate_includes_three_way():
    ms = enumerate_monomials(3, 3)
    assert len(ms.members) == 20
    assert MultiIndex((1, 1, 1)) in ms.members


def test_partition_full_worked_example():
    ob = partition_full(enumerate_monomials(3, 3))
    blocks = block_map(ob)
    assert labels(ob.blocks[1]) == ["x1", "x1^2", "x1^3"]
    assert len(blocks["pure:1"]) + len(blocks["mixed:1"]) == 10
    assert set(labels(ob.blocks[3])) == {"x2", "x2^2", "x2^3", "x2*x3", "x2^2*x3", "x2*x3^2"}
    assert set(labels(ob.blocks[4])) == {"x3", "x3^2", "x3^3"}


def test_partition_full_univariate():
    ob = partition_full(enumerate_monomials(1, 2))
    assert labels(ob.blocks[0]) == ["1"]
    assert labels(ob.blocks[1]) == ["x1", "x1^2"]
    assert labels(ob.blocks[2]) == []


def test_partition_full_degree_one():
    ob = partition_full(enumerate_monomials(2, 1))
    assert [b.label for b in ob.blocks] == ["const", "pure:1", "mixed:1", "lead:2"]
    assert labels(ob.blocks[1]) == ["x1"]
    assert labels(ob.blocks[2]) == []
    assert labels(ob.blocks[3]) == ["x2"]


def test_partition_uncorrelated_structure():
    ob = partition_uncorrelated(enumerate_monomials(3, 3))
    blocks = block_map(ob)
    assert [b.label for b in ob.blocks] == ["const", "others", "pure:1", "mixed:1"]
    assert len(blocks["others"]) == 9
    assert labels(ob.blocks[2]) == ["x1", "x1^2", "x1^3"]


def test_partition_uncorrelated_univariate():
    ob = partition_uncorrelated(enumerate_monomials(1, 2))
    blocks = block_map(ob)
    assert blocks["others"] == ()
    assert [m.label() for m in blocks["pure:1"]] == ["x1", "x1^2"]


def test_partition_uncorrelated_two_inputs():
    ob = partition_uncorrelated(enumerate_monomials(2, 2))
    blocks = block_map(ob)
    assert [m.label() for m in blocks["others"]] == ["x2", "x2^2"]
    assert [m.label() for m in blocks["pure:1"]] == ["x1", "x1^2"]
    assert [m.label() for m in blocks["mixed:1"]] == ["x1*x2"]


def test_partition_order_based_worked_example():
    ob = partition_order_based(enumerate_monomials(3, 3))
    blocks = block_map(ob)
    assert set(labels_of(blocks["order:2:deg:2"])) == {"x1*x2", "x1*x3", "x2*x3"}
    assert len(blocks["order:2:deg:3"]) == 6
    assert labels_of(blocks["order:3:deg:3"]) == ["x1*x2*x3"]
    two_way = sum(len(v) for k, v in blocks.items() if k.startswith("order:2:"))
    assert two_way == math.comb(3, 2) * math.comb(3, 2)


def labels_of(members):
    return [m.label() for m in members]


def test_partition_order_based_no_interactions_possible():
    ob = partition_order_based(enumerate_monomials(2, 1))
    assert [b.label for b in ob.blocks] == ["const", "order:1:deg:1"]
    assert set(labels(ob.blocks[1])) == {"x1", "x2"}


def test_partition_nested_spans():
    ob = partition_nested(enumerate_monomials(3, 2))
    blocks = block_map(ob)
    assert labels_of(blocks["closed:1"]) == ["x1", "x1^2"]
    assert set(labels_of(blocks["closed:2"])) == {"x2", "x1*x2", "x2^2"}
    assert set(labels_of(blocks["closed:3"])) == {"x3", "x1*x3", "x2*x3", "x3^2"}


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("p", range(0, 6))
def test_partitions_cover_exactly(n, p):
    ms = enumerate_monomials(n, p)
    expected = set(ms.members)
    assert len(expected) == basis_size(n, p)
    for builder in (partition_full, partition_uncorrelated, partition_nested,
                    partition_order_based):
        ob = builder(ms)
        flattened = ob.flattened()
        assert len(flattened) == len(expected)
        assert set(flattened) == expected


@pytest.mark.parametrize("n,p", [(3, 3), (4, 2), (5, 3)])
def test_order_based_block_sizes(n, p):
    ob = partition_order_based(enumerate_monomials(n, p))
    for i in range(1, min(n, p) + 1):
        size = sum(
            len(b.members) for b in ob.blocks if b.label.startswith(f"order:{i}:")
        )
        assert size == math.comb(n, i) * math.comb(p, i)


def test_full_block_membership_property():
    ob = partition_full(enumerate_monomials(4, 3))
    blocks = block_map(ob)
    touching_first = blocks["pure:1"] + blocks["mixed:1"]
    assert all(m.exponents[0] >= 1 for m in touching_first)
    for i in (2, 3, 4):
        for m in blocks[f"lead:{i}"]:
            assert m.exponents[i - 1] >= 1
            assert all(e == 0 for e in m.exponents[: i - 1])


def test_permute_identity_is_noop():
    ob = partition_full(enumerate_monomials(3, 2))
    assert permute_inputs(ob, (0, 1, 2)) == ob


def test_permute_moves_first_input():
    ob = partition_full(enumerate_monomials(3, 3))
    moved = permute_inputs(ob, (1, 2, 0))
    pure = [b for b in moved.blocks if b.label == "pure:1"][0]
    exps = [m.to_dataset_exponents(moved.permutation) for m in pure.members]
    assert exps == [(0, 1, 0), (0, 2, 0), (0, 3, 0)]


def test_permute_round_trip():
    ob = partition_full(enumerate_monomials(4, 2))
    sigma = (2, 0, 3, 1)
    inverse = tuple(sigma.index(i) for i in range(4))
    assert permute_inputs(permute_inputs(ob, sigma), inverse) == ob


def test_permute_rejects_non_bijection():
    ob = partition_full(enumerate_monomials(3, 2))
    with pytest.raises(InvalidPermutationError):
        permute_inputs(ob, (0, 0, 2))
    with pytest.raises(InvalidPermutationError):
        permute_inputs(ob, (0, 1))


def test_cyclic_permutation():
    assert cyclic_permutation(2, 4) == (2, 3, 0, 1)
    assert cyclic_permutation(0, 3) == (0, 1, 2)
    with pytest.raises(InvalidPermutationError):
        cyclic_permutation(5, 3)


def test_enumeration_deterministic():
    a = enumerate_monomials(4, 3)
    b = enumerate_monomials(4, 3)
    assert a == b
    assert partition_full(a) == partition_full(b)


def test_multiindex_support_and_degree():
    mi = MultiIndex((0, 2, 0, 1))
    assert mi.degree == 3
    assert mi.support == (1, 3)
    assert mi.n_active == 2
    assert mi.label(("a", "b", "c", "d")) == "b^2*d"
