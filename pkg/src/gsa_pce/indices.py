"""Sensitivity index families computed from block-wise coefficient power.

Every index here is a ratio: the sum of squared expansion coefficients over
some blocks of the ordered basis, divided by the output variance.  Which
blocks, and in which input ordering the basis was orthogonalized, is what
distinguishes the families:

* first_order_full / total_full: the target input is orthogonalized first,
  so its blocks absorb everything it carries, including variance shared with
  correlated inputs.
* first_order_uncorrelated / total_uncorrelated: all other inputs' blocks are
  orthogonalized first, so the target's blocks keep only what the other
  inputs' polynomials cannot explain.
* conditional totals: one ordering, each input's block read as its increment
  given all inputs placed before it.
* order-based: blocks grouped by interaction order, for screening how deep
  the interactions of a model actually go.

Functions return raw (unclamped) ratios; clamping to [0, 1] happens only when
entries are assembled into an :class:`IndexReport`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .basis import (
    OrderedBasis,
    check_permutation,
    cyclic_permutation,
    enumerate_monomials,
    partition_full,
    partition_nested,
    partition_order_based,
    partition_uncorrelated,
    permute_inputs,
)
from .errors import ConfigError, DegenerateOutputWarning
from .ortho import Dataset, OrthoOptions, _mgs_from_cache, build_cache
from .pce import PceModel, fit

FAMILIES = ("full", "uncorrelated", "conditional", "order", "groups")
DENOMINATORS = ("sample", "pce")

_FULL_FIRST = frozenset({"pure:1"})
_FULL_TOTAL = frozenset({"pure:1", "mixed:1"})


class Pipeline:
    """Shared fit cache for one dataset and degree.

    Monomial columns are evaluated once and reused across input orderings
    (their values do not depend on the ordering), and each (partition,
    ordering) pair is orthogonalized and fitted at most once.
    """

    def __init__(self, ds: Dataset, p: int, ortho: OrthoOptions | None = None):
        if p < 0:
            raise ConfigError(f"degree must be non-negative, got {p}")
        self.ds = ds
        self.p = p
        self.opts = ortho or OrthoOptions()
        self.n = ds.n_inputs
        self._monomials = enumerate_monomials(self.n, p)
        self._cache = build_cache(ds, p, self.opts)
        self._bases: dict[str, OrderedBasis] = {}
        self._models: dict[tuple[str, tuple[int, ...]], PceModel] = {}

    def _base(self, kind: str) -> OrderedBasis:
        if kind not in self._bases:
            builder = {
                "full": partition_full,
                "uncorrelated": partition_uncorrelated,
                "nested": partition_nested,
                "order": partition_order_based,
            }[kind]
            self._bases[kind] = builder(self._monomials)
        return self._bases[kind]

    def model(self, kind: str, perm: Sequence[int] | None = None) -> PceModel:
        identity = tuple(range(self.n))
        perm = identity if perm is None else check_permutation(perm, self.n)
        key = (kind, perm)
        if key not in self._models:
            ob = self._base(kind)
            if perm != identity:
                ob = permute_inputs(ob, perm)
            onb = _mgs_from_cache(self.ds, ob, self.opts, self._cache)
            self._models[key] = fit(self.ds, onb)
        return self._models[key]


def _denominator_value(model: PceModel, denominator: str) -> float:
    if denominator not in DENOMINATORS:
        raise ConfigError(f"denominator must be one of {DENOMINATORS}, got {denominator!r}")
    return model.sample_variance if denominator == "sample" else model.explained_variance


def _block_sum(model: PceModel, wanted) -> float:
    return sum(v for label, v in model.block_variance.per_block if label in wanted)


def _ratio(numerator: float, denom: float) -> float:
    return numerator / denom if denom > 0.0 else 0.0


def _pipe(ds, p, ortho, pipeline) -> Pipeline:
    return pipeline if pipeline is not None else Pipeline(ds, p, ortho)


def first_order_full(
    ds: Dataset, p: int, target_input: int, *,
    denominator: str = "sample", ortho: OrthoOptions | None = None,
    pipeline: Pipeline | None = None,
) -> float:
    """Share of output variance carried by the target input's own polynomials
    when that input is orthogonalized first (dependence included)."""
    pipe = _pipe(ds, p, ortho, pipeline)
    m = pipe.model("full", cyclic_permutation(target_input, pipe.n))
    return _ratio(_block_sum(m, _FULL_FIRST), _denominator_value(m, denominator))


def total_full(
    ds: Dataset, p: int, target_input: int, *,
    denominator: str = "sample", ortho: OrthoOptions | None = None,
    pipeline: Pipeline | None = None,
) -> float:
    """Like first_order_full but also counting the target's interaction terms."""
    pipe = _pipe(ds, p, ortho, pipeline)
    m = pipe.model("full", cyclic_permutation(target_input, pipe.n))
    return _ratio(_block_sum(m, _FULL_TOTAL), _denominator_value(m, denominator))


def conditional_total_sweep(
    ds: Dataset, p: int, input_order: Sequence[int] | None = None, *,
    denominator: str = "sample", ortho: OrthoOptions | None = None,
    pipeline: Pipeline | None = None,
) -> list[tuple[int, float]]:
    """One ordering, one fit: each input's incremental variance share given
    every input placed before it.

    Built on the nested partition, so the partial sum over the first d entries
    is the share explained by polynomials in the leading d inputs alone (their
    closed contribution); for a leading group that is independent of and does
    not interact with the rest, that partial sum estimates the group's total
    variance share.  Returns (dataset column, value) pairs in analysis order;
    the values sum to the explained-variance ratio exactly.
    """
    pipe = _pipe(ds, p, ortho, pipeline)
    perm = (
        tuple(range(pipe.n)) if input_order is None
        else check_permutation(input_order, pipe.n)
    )
    m = pipe.model("nested", perm)
    denom = _denominator_value(m, denominator)
    return [
        (perm[pos - 1], _ratio(_block_sum(m, {f"closed:{pos}"}), denom))
        for pos in range(1, pipe.n + 1)
    ]


def group_total(
    ds: Dataset, p: int, group: Sequence[int], *,
    denominator: str = "sample", ortho: OrthoOptions | None = None,
    pipeline: Pipeline | None = None,
) -> float:
    """Total variance share of a set of inputs placed first in the ordering.

    This reads the group's inputs as the leading entries of one conditional
    sweep and sums their values.  The interpretation as the group's total
    Sobol index requires the group to be independent of, and non-interacting
    with, the remaining inputs; that assumption is the caller's and is not
    checked here.
    """
    pipe = _pipe(ds, p, ortho, pipeline)
    group = tuple(int(g) for g in group)
    if len(set(group)) != len(group) or not group:
        raise ConfigError(f"group must be a non-empty set of distinct inputs, got {group}")
    if any(g < 0 or g >= pipe.n for g in group):
        raise ConfigError(f"group {group} names inputs outside 0..{pipe.n - 1}")
    order = group + tuple(sorted(set(range(pipe.n)) - set(group)))
    sweep = conditional_total_sweep(
        ds, p, order, denominator=denominator, pipeline=pipe
    )
    return sum(value for _, value in sweep[: len(group)])


def total_uncorrelated(
    ds: Dataset, p: int, target_input: int, *,
    denominator: str = "sample", ortho: OrthoOptions | None = None,
    pipeline: Pipeline | None = None,
) -> float:
    """Variance share of the target input's polynomials after every other
    input's polynomial block has been orthogonalized first."""
    pipe = _pipe(ds, p, ortho, pipeline)
    m = pipe.model("uncorrelated", cyclic_permutation(target_input, pipe.n))
    return _ratio(_block_sum(m, _FULL_TOTAL), _denominator_value(m, denominator))


def first_order_uncorrelated(
    ds: Dataset, p: int, target_input: int, *,
    denominator: str = "sample", ortho: OrthoOptions | None = None,
    pipeline: Pipeline | None = None,
) -> float:
    """As total_uncorrelated, restricted to the target's pure powers."""
    pipe = _pipe(ds, p, ortho, pipeline)
    m = pipe.model("uncorrelated", cyclic_permutation(target_input, pipe.n))
    return _ratio(_block_sum(m, _FULL_FIRST), _denominator_value(m, denominator))


@dataclass(frozen=True)
class OrderSweep:
    """Conditional interaction-order shares from one order-partition fit.

    ``entries[k-1]`` is (k, share of variance at interaction order k given all
    lower orders).  ``total_ratio`` is their exact sum and ``r_squared`` the
    fit quality; with the sample-variance denominator the two coincide.
    """

    entries: tuple[tuple[int, float], ...]
    r_squared: float
    total_ratio: float
    degenerate: bool
    denominator: str
    model: PceModel = field(repr=False)

    def values(self) -> list[float]:
        return [v for _, v in self.entries]


def order_based_sweep(
    ds: Dataset, p: int, *,
    denominator: str = "sample", ortho: OrthoOptions | None = None,
    pipeline: Pipeline | None = None,
) -> OrderSweep:
    """Fit under the interaction-order partition and split the variance by
    interaction order."""
    pipe = _pipe(ds, p, ortho, pipeline)
    m = pipe.model("order")
    denom = _denominator_value(m, denominator)
    entries = []
    for k in range(1, min(pipe.n, p) + 1):
        labels = {f"order:{k}:deg:{j}" for j in range(k, p + 1)}
        entries.append((k, _ratio(_block_sum(m, labels), denom)))
    total = sum(v for _, v in entries)
    return OrderSweep(
        entries=tuple(entries),
        r_squared=m.r_squared,
        total_ratio=total,
        degenerate=m.sample_variance <= 0.0,
        denominator=denominator,
        model=m,
    )


def screen_interactions(sweep: OrderSweep, threshold: float = 0.99) -> int:
    """Smallest interaction order whose cumulative share reaches the threshold
    fraction of everything the expansion explains.

    Interaction terms of higher order can be excluded from the model.  A
    constant output has nothing to attribute: the recommendation is 0 and a
    DegenerateOutputWarning is emitted.
    """
    if not 0.0 < threshold <= 1.0:
        raise ConfigError(f"threshold must be in (0, 1], got {threshold}")
    if sweep.degenerate:
        warnings.warn(
            "output variance is zero; no interaction order recommended",
            DegenerateOutputWarning,
            stacklevel=2,
        )
        return 0
    target = threshold * sweep.total_ratio
    cumulative = 0.0
    for k, value in sweep.entries:
        cumulative += value
        if cumulative >= target:
            return k
    return sweep.entries[-1][0] if sweep.entries else 0


def interaction_coefficient_report(
    ds: Dataset, p: int, order: int, *,
    ortho: OrthoOptions | None = None, pipeline: Pipeline | None = None,
) -> list[tuple[str, float]]:
    """Coefficients whose pivot monomial has the given interaction order,
    labelled with input names and sorted by magnitude, largest first."""
    pipe = _pipe(ds, p, ortho, pipeline)
    if not 1 <= order <= min(pipe.n, p):
        raise ConfigError(
            f"interaction order must be in 1..{min(pipe.n, p)}, got {order}"
        )
    m = pipe.model("order")
    onb = m.basis
    names = tuple(ds.input_names[col] for col in onb.basis.permutation)
    prefix = f"order:{order}:"
    items = [
        (onb.monomials[j].label(names), float(m.coefficients[j]))
        for j, label in enumerate(onb.block_labels)
        if label.startswith(prefix)
    ]
    items.sort(key=lambda item: -abs(item[1]))
    return items


@dataclass(frozen=True)
class IndexEntry:
    """One reported sensitivity value with its provenance."""

    index_name: str
    target: str
    value: float
    raw_value: float
    partition: str
    permutation: tuple[int, ...]
    denominator: str
    r_squared: float
    given: tuple[str, ...] = ()


@dataclass(frozen=True)
class IndexReport:
    entries: tuple[IndexEntry, ...]
    diagnostics: dict

    def find(self, index_name: str, target: str) -> IndexEntry:
        for e in self.entries:
            if e.index_name == index_name and e.target == target:
                return e
        raise KeyError(f"{index_name} for {target} not in report")


def _clamp(raw: float) -> float:
    return min(1.0, max(0.0, raw))


def _entry(index_name, target, raw, partition, perm, denominator, r2, given=()):
    return IndexEntry(
        index_name=index_name,
        target=target,
        value=_clamp(raw),
        raw_value=raw,
        partition=partition,
        permutation=perm,
        denominator=denominator,
        r_squared=r2,
        given=tuple(given),
    )


def all_indices(
    ds: Dataset,
    p: int,
    families: Sequence[str],
    *,
    groups: Sequence[Sequence[int]] | None = None,
    denominator: str = "sample",
    ortho: OrthoOptions | None = None,
    screen_threshold: float = 0.99,
    seed: int | None = None,
    pipeline: Pipeline | None = None,
) -> IndexReport:
    """Run the requested index families and assemble one report.

    ``full`` and ``uncorrelated`` sweep the inputs with cyclic orderings (one
    fit per input per family); ``conditional`` and ``order`` use a single fit
    each; ``groups`` needs ``groups``, a list of input-column groups, and adds
    one conditional sweep per group.  Reported values are clamped to [0, 1];
    the raw estimates stay on the entries.
    """
    fams = list(dict.fromkeys(families))
    unknown = [f for f in fams if f not in FAMILIES]
    if unknown:
        raise ConfigError(f"unknown families {unknown}; valid: {list(FAMILIES)}")
    if denominator not in DENOMINATORS:
        raise ConfigError(f"denominator must be one of {DENOMINATORS}, got {denominator!r}")
    if "groups" in fams and not groups:
        raise ConfigError("families include 'groups' but no groups were given")

    pipe = pipeline if pipeline is not None else Pipeline(ds, p, ortho)
    names = ds.input_names
    entries: list[IndexEntry] = []
    r2_map: dict[str, float] = {}
    warnings_list: list[str] = []
    diagnostics: dict = {
        "n_samples": ds.n_samples,
        "n_inputs": ds.n_inputs,
        "degree": p,
        "denominator": denominator,
        "seed": seed,
        "input_names": list(names),
        "output_name": ds.output_name,
        "families": fams,
    }

    y = ds.output
    if float(((y - y.mean()) ** 2).sum()) == 0.0:
        warnings_list.append("output variance is zero; all indices reported as 0")

    def note(kind: str, perm: tuple[int, ...]) -> float:
        m = pipe.model(kind, perm)
        r2_map[f"{kind}:" + ",".join(map(str, perm))] = m.r_squared
        return m.r_squared

    for fam in fams:
        if fam == "full":
            for i in range(pipe.n):
                perm = cyclic_permutation(i, pipe.n)
                r2 = note("full", perm)
                entries.append(_entry(
                    "first_order_full", names[i],
                    first_order_full(ds, p, i, denominator=denominator, pipeline=pipe),
                    "full", perm, denominator, r2,
                ))
                entries.append(_entry(
                    "alt_total_full", names[i],
                    total_full(ds, p, i, denominator=denominator, pipeline=pipe),
                    "full", perm, denominator, r2,
                ))
        elif fam == "uncorrelated":
            for i in range(pipe.n):
                perm = cyclic_permutation(i, pipe.n)
                r2 = note("uncorrelated", perm)
                entries.append(_entry(
                    "alt_first_order_uncorrelated", names[i],
                    first_order_uncorrelated(
                        ds, p, i, denominator=denominator, pipeline=pipe
                    ),
                    "uncorrelated", perm, denominator, r2,
                ))
                entries.append(_entry(
                    "total_uncorrelated", names[i],
                    total_uncorrelated(ds, p, i, denominator=denominator, pipeline=pipe),
                    "uncorrelated", perm, denominator, r2,
                ))
        elif fam == "conditional":
            perm = tuple(range(pipe.n))
            r2 = note("nested", perm)
            sweep = conditional_total_sweep(
                ds, p, perm, denominator=denominator, pipeline=pipe
            )
            for pos, (col, value) in enumerate(sweep):
                entries.append(_entry(
                    "conditional_total", names[col], value, "nested", perm,
                    denominator, r2, given=tuple(names[c] for c, _ in sweep[:pos]),
                ))
        elif fam == "order":
            perm = tuple(range(pipe.n))
            r2 = note("order", perm)
            sweep = order_based_sweep(ds, p, denominator=denominator, pipeline=pipe)
            for k, value in sweep.entries:
                entries.append(_entry(
                    "order_conditional", f"order:{k}", value, "order", perm,
                    denominator, r2,
                ))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateOutputWarning)
                recommended = screen_interactions(sweep, screen_threshold)
            if sweep.degenerate:
                warnings_list.append(
                    "output variance is zero; no interaction order recommended"
                )
            cumulative = []
            running = 0.0
            for _, value in sweep.entries:
                running += value
                cumulative.append(running)
            diagnostics["interaction_screen"] = {
                "threshold": screen_threshold,
                "recommended_order": recommended,
                "cumulative": cumulative,
            }
        elif fam == "groups":
            for group in groups:
                group = tuple(int(g) for g in group)
                order = group + tuple(sorted(set(range(pipe.n)) - set(group)))
                r2 = note("nested", order)
                value = group_total(ds, p, group, denominator=denominator, pipeline=pipe)
                entries.append(_entry(
                    "group_total", ",".join(names[g] for g in group), value,
                    "nested", order, denominator, r2,
                ))

    diagnostics["r_squared"] = r2_map
    diagnostics["warnings"] = warnings_list
    return IndexReport(tuple(entries), diagnostics)
