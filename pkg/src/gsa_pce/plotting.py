"""Static SVG charts rendered from report documents."""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigError

_FULL_PAIR = ("first_order_full", "alt_total_full")
_UNCORR_PAIR = ("alt_first_order_uncorrelated", "total_uncorrelated")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "gsa-pce"
    import matplotlib.pyplot as plt

    return plt


def _save(fig, out_path):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format="svg", metadata={"Date": None}, bbox_inches="tight")


def _collect(document: dict, index_name: str) -> dict[str, float]:
    return {
        e["target"]: e["value"]
        for e in document.get("indices", [])
        if e["index_name"] == index_name
    }


def plot_index_decomposition(document: dict, out_path) -> None:
    """Two panels, one per ordering family: first-order vs total share per
    input.  The vertical gap between the series is the interaction share."""
    if not document.get("indices"):
        raise ConfigError("report contains no index entries; nothing to plot")
    series = {name: _collect(document, name) for name in _FULL_PAIR + _UNCORR_PAIR}
    names = document.get("diagnostics", {}).get("input_names")
    if not names:
        # fall back to first-appearance order of the plotted entries
        names = list(dict.fromkeys(
            e["target"] for e in document["indices"]
            if e["index_name"] in _FULL_PAIR + _UNCORR_PAIR
        ))
    missing = []
    if not (series[_FULL_PAIR[0]] and series[_FULL_PAIR[1]]):
        missing.append("full")
    if not (series[_UNCORR_PAIR[0]] and series[_UNCORR_PAIR[1]]):
        missing.append("uncorrelated")
    if missing:
        raise ConfigError(
            "report lacks the families needed for an index decomposition plot: "
            + ", ".join(missing)
            + "; re-run the analysis with --families full,uncorrelated"
        )

    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(9.5, 4.0), sharey=True)
    panels = (
        (axes[0], "full contributions", _FULL_PAIR),
        (axes[1], "uncorrelated contributions", _UNCORR_PAIR),
    )
    x = range(len(names))
    for ax, title, (first_name, total_name) in panels:
        first = [series[first_name].get(n, 0.0) for n in names]
        total = [series[total_name].get(n, 0.0) for n in names]
        ax.plot(x, total, "s-", color="#c44e52", label="total")
        ax.plot(x, first, "o-", color="#4c72b0", label="first-order")
        for xi, (f, t) in enumerate(zip(first, total)):
            ax.annotate(f"{f:.3f}", (xi, f), textcoords="offset points",
                        xytext=(0, -12), ha="center", fontsize=7)
            ax.annotate(f"{t:.3f}", (xi, t), textcoords="offset points",
                        xytext=(0, 6), ha="center", fontsize=7)
        ax.set_title(title)
        ax.set_xticks(list(x))
        ax.set_xticklabels(names)
        ax.set_ylim(-0.05, 1.05)
        ax.grid(True, alpha=0.3)
    axes[0].set_ylabel("share of output variance")
    axes[0].legend(loc="upper left")
    fig.tight_layout()
    _save(fig, out_path)
    plt.close(fig)


def plot_interaction_coefficients(document: dict, out_path) -> None:
    """Bar chart of coefficient magnitudes per two-way interaction term."""
    table = next(
        (t for t in document.get("tables", []) if t.get("title") == "two_way_coefficients"),
        None,
    )
    if table is None or not table.get("rows"):
        raise ConfigError(
            "report has no two-way coefficient table; re-run the analysis "
            "with --families order (or benchmark example 3)"
        )
    rows = table["rows"]
    labels = [r["term"] for r in rows]
    magnitudes = [abs(r["coefficient"]) for r in rows]

    plt = _pyplot()
    width = max(6.0, 0.28 * len(labels) + 1.5)
    fig, ax = plt.subplots(figsize=(width, 4.0))
    ax.bar(range(len(labels)), magnitudes, color="#4c72b0")
    for xi, m in enumerate(magnitudes):
        ax.annotate(f"{m:.3f}", (xi, m), textcoords="offset points",
                    xytext=(0, 2), ha="center", fontsize=6, rotation=90)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90, fontsize=7)
    ax.set_ylabel("|coefficient|")
    ax.set_title("two-way interaction coefficients")
    fig.tight_layout()
    _save(fig, out_path)
    plt.close(fig)


PLOT_KINDS = {
    "index_decomposition": plot_index_decomposition,
    "interaction_coefficients": plot_interaction_coefficients,
}
