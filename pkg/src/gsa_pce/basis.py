"""Monomial bookkeeping: total-degree enumeration, ordered partitions, permutations.

All multi-indices live in *analysis coordinates*: position ``l`` of an exponent
vector refers to the l-th input of the current analysis ordering, and the
:class:`OrderedBasis` carries a permutation that maps analysis positions to
dataset columns.  Re-ordering the inputs therefore never rebuilds the block
structure, it only swaps the permutation vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

from .errors import BasisSizeError, InvalidPermutationError

# Basis positions index numpy arrays, so the size must fit a signed 64-bit int.
_MAX_BASIS_SIZE = 2**63 - 1


@dataclass(frozen=True)
class MultiIndex:
    """Exponent vector of one monomial, e.g. (1, 0, 2) for x1 * x3^2."""

    exponents: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def support(self) -> tuple[int, ...]:
        """Positions (0-based) with a non-zero exponent."""
        return tuple(l for l, e in enumerate(self.exponents) if e)

    @property
    def n_active(self) -> int:
        return sum(1 for e in self.exponents if e)

    def to_dataset_exponents(self, permutation: tuple[int, ...]) -> tuple[int, ...]:
        """Re-express the exponents in dataset column order."""
        out = [0] * len(self.exponents)
        for pos, col in enumerate(permutation):
            out[col] = self.exponents[pos]
        return tuple(out)

    def label(self, names: tuple[str, ...] | None = None) -> str:
        """Human-readable product form, e.g. ``X1*X3^2``; ``1`` for the constant."""
        if names is None:
            names = tuple(f"x{l + 1}" for l in range(len(self.exponents)))
        parts = []
        for name, e in zip(names, self.exponents):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class MonomialSet:
    """All monomials of total degree <= p in n inputs, graded-lex ordered."""

    members: tuple[MultiIndex, ...]
    n: int
    p: int


@dataclass(frozen=True)
class Block:
    label: str
    members: tuple[MultiIndex, ...]


@dataclass(frozen=True)
class OrderedBasis:
    """A sequence of labelled monomial blocks in orthogonalization order.

    ``permutation[pos]`` is the dataset column evaluated at analysis position
    ``pos``.  ``partition`` records which block scheme produced the object
    ("full", "uncorrelated" or "order").
    """

    blocks: tuple[Block, ...]
    permutation: tuple[int, ...]
    partition: str
    n: int
    p: int

    @property
    def size(self) -> int:
        return sum(len(b.members) for b in self.blocks)

    def flattened(self) -> tuple[MultiIndex, ...]:
        return tuple(m for b in self.blocks for m in b.members)

    def flattened_labels(self) -> tuple[str, ...]:
        """Block label of each basis position, in orthogonalization order."""
        return tuple(b.label for b in self.blocks for _ in b.members)


def basis_size(n: int, p: int) -> int:
    """Number of monomials of total degree <= p in n inputs: C(n+p, n)."""
    if n < 1:
        raise ValueError(f"need at least one input, got n={n}")
    if p < 0:
        raise ValueError(f"degree must be non-negative, got p={p}")
    size = math.comb(n + p, n)
    if size > _MAX_BASIS_SIZE:
        raise BasisSizeError(
            f"basis with n={n}, p={p} has {size} terms, beyond 64-bit indexing"
        )
    return size


def _graded_lex_key(mi: MultiIndex) -> tuple:
    # Total degree first, then lexicographic with earlier inputs ranked higher,
    # so x1^2 precedes x1*x2 precedes x2^2.
    return (mi.degree, tuple(-e for e in mi.exponents))


def enumerate_monomials(n: int, p: int) -> MonomialSet:
    """Enumerate every monomial with total degree <= p, in graded-lex order."""
    size = basis_size(n, p)
    members = []
    for degree in range(p + 1):
        # Multisets of input positions of cardinality `degree`.
        for combo in combinations_with_replacement(range(n), degree):
            exps = [0] * n
            for pos in combo:
                exps[pos] += 1
            members.append(MultiIndex(tuple(exps)))
    members.sort(key=_graded_lex_key)
    assert len(members) == size
    return MonomialSet(tuple(members), n, p)


def _sorted_block(members) -> tuple[MultiIndex, ...]:
    return tuple(sorted(members, key=_graded_lex_key))


def partition_full(ms: MonomialSet) -> OrderedBasis:
    """Ordered blocks: constant, pure powers of the first input, its
    interactions, then one block per later input holding the monomials that
    input introduces (no earlier input involved)."""
    n = ms.n
    const = []
    pure_first = []
    mixed_first = []
    introduced = [[] for _ in range(n + 1)]  # 1-based, slots 2..n used
    for mi in ms.members:
        if mi.degree == 0:
            const.append(mi)
            continue
        first_active = mi.support[0]
        if first_active == 0:
            if mi.n_active == 1:
                pure_first.append(mi)
            else:
                mixed_first.append(mi)
        else:
            introduced[first_active + 1].append(mi)
    blocks = [
        Block("const", _sorted_block(const)),
        Block("pure:1", _sorted_block(pure_first)),
        Block("mixed:1", _sorted_block(mixed_first)),
    ]
    for i in range(2, n + 1):
        blocks.append(Block(f"lead:{i}", _sorted_block(introduced[i])))
    return OrderedBasis(tuple(blocks), tuple(range(n)), "full", n, ms.p)


def partition_uncorrelated(ms: MonomialSet) -> OrderedBasis:
    """Ordered blocks: constant, everything not involving the first input,
    then the first input's pure powers and interactions.

    Orthogonalizing the other inputs' polynomials first strips from the first
    input's blocks anything those polynomials can explain.
    """
    full = partition_full(ms)
    const, pure_first, mixed_first = full.blocks[0], full.blocks[1], full.blocks[2]
    others = [m for b in full.blocks[3:] for m in b.members]
    blocks = (
        const,
        Block("others", _sorted_block(others)),
        pure_first,
        mixed_first,
    )
    return OrderedBasis(blocks, tuple(range(ms.n)), "uncorrelated", ms.n, ms.p)


def partition_nested(ms: MonomialSet) -> OrderedBasis:
    """Ordered blocks by the highest analysis position a monomial involves.

    Block ``closed:i`` holds the monomials whose support lies within the first
    i inputs and that actually involve input i, so the blocks through
    ``closed:i`` span exactly the polynomials in the leading i inputs.  Partial
    sums over this ordering measure what each additional input explains
    together with everything before it, which is what group totals need.
    """
    n = ms.n
    const = []
    closing = [[] for _ in range(n + 1)]
    for mi in ms.members:
        if mi.degree == 0:
            const.append(mi)
        else:
            closing[mi.support[-1] + 1].append(mi)
    blocks = [Block("const", _sorted_block(const))]
    for i in range(1, n + 1):
        blocks.append(Block(f"closed:{i}", _sorted_block(closing[i])))
    return OrderedBasis(tuple(blocks), tuple(range(n)), "nested", n, ms.p)


def partition_order_based(ms: MonomialSet) -> OrderedBasis:
    """Ordered blocks grouping monomials by (number of active inputs, degree).

    Block ``order:i:deg:j`` holds the monomials with exactly i active inputs
    and total degree j; blocks are emitted for i = 1..min(n, p), j = i..p,
    preceded by the constant.
    """
    k = min(ms.n, ms.p)
    buckets: dict[tuple[int, int], list[MultiIndex]] = {}
    const = []
    for mi in ms.members:
        if mi.degree == 0:
            const.append(mi)
        else:
            buckets.setdefault((mi.n_active, mi.degree), []).append(mi)
    blocks = [Block("const", _sorted_block(const))]
    for i in range(1, k + 1):
        for j in range(i, ms.p + 1):
            blocks.append(Block(f"order:{i}:deg:{j}",
                                _sorted_block(buckets.pop((i, j), []))))
    assert not buckets
    return OrderedBasis(tuple(blocks), tuple(range(ms.n)), "order", ms.n, ms.p)


def check_permutation(perm, n: int) -> tuple[int, ...]:
    """Validate a 0-based permutation of range(n) and return it as a tuple."""
    perm = tuple(int(x) for x in perm)
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise InvalidPermutationError(
            f"{perm} is not a permutation of the {n} input positions"
        )
    return perm


def cyclic_permutation(first: int, n: int) -> tuple[int, ...]:
    """The ordering (first, first+1, ..., n-1, 0, ..., first-1), 0-based."""
    if not 0 <= first < n:
        raise InvalidPermutationError(f"input position {first} outside 0..{n - 1}")
    return tuple((first + k) % n for k in range(n))


def permute_inputs(ob: OrderedBasis, perm) -> OrderedBasis:
    """Rebuild the ordered basis with a new analysis order.

    ``perm[pos]`` names the input (a position of the *current* analysis order)
    placed at analysis position ``pos``.  Blocks are unchanged because they are
    expressed in analysis coordinates; only the column mapping is composed, so
    applying a permutation and then its inverse restores the original object.
    """
    perm = check_permutation(perm, ob.n)
    composed = tuple(ob.permutation[perm[pos]] for pos in range(ob.n))
    return OrderedBasis(ob.blocks, composed, ob.partition, ob.n, ob.p)
