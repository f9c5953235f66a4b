"""Command-line front end: analyze CSV data, run benchmarks, plot reports.

Configuration for `analyze` comes from an optional flat key=value file with
dotted keys; every key has a same-named CLI flag and flags win over the file.
Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import basis_size
from .benchmarks import BenchmarkSpec, generate
from .dataio import read_csv, write_csv
from .errors import (
    BasisSizeError,
    ConfigError,
    DataError,
    DimensionError,
    GsaPceError,
    InsufficientSamplesError,
    InvalidPermutationError,
    LinearDependenceError,
    NumericalError,
)
from .indices import FAMILIES, Pipeline, all_indices, interaction_coefficient_report
from .ortho import OrthoOptions
from .plotting import PLOT_KINDS
from .report import (
    VERSION,
    index_report_to_document,
    interval_to_dict,
    load_report,
    write_report,
)
from .runner import run_benchmark
from .stats import ResamplingPlan, bootstrap_resample_matrix


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_names(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    if not names:
        raise ConfigError(f"expected a comma-separated list, got {text!r}")
    return names


def _parse_groups(text: str) -> tuple[tuple[str, ...], ...]:
    groups = tuple(
        _parse_names(part) for part in text.split(";") if part.strip()
    )
    if not groups:
        raise ConfigError(f"expected semicolon-separated groups, got {text!r}")
    return groups


def _parse_float_triple(text: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"expected three comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise ConfigError(f"expected numbers, got {text!r}") from None


# key -> (argparse dest, value parser, help text)
CONFIG_KEYS = {
    "data.path": ("data_path", str, "input CSV file"),
    "data.output_column": ("data_output_column", str,
                           "output column name (default: last column)"),
    "data.input_columns": ("data_input_columns", _parse_names,
                           "ordered input column names (default: all others)"),
    "degree": ("degree", int, "highest polynomial degree"),
    "families": ("families", _parse_names,
                 f"index families, subset of {','.join(FAMILIES)}"),
    "groups": ("groups", _parse_groups,
               "input groups for group totals, e.g. 'X1,X2;X3,X4'"),
    "denominator": ("denominator", str, "variance denominator: sample or pce"),
    "ortho.drop_dependent": ("ortho_drop_dependent", _parse_bool,
                             "drop dependent monomials instead of failing"),
    "ortho.drop_tolerance": ("ortho_drop_tolerance", float,
                             "relative dependence tolerance"),
    "ortho.reorthogonalize": ("ortho_reorthogonalize", _parse_bool,
                              "run the projection sweep twice"),
    "resampling.bootstrap_samples": ("resampling_bootstrap_samples", int,
                                     "row-bootstrap resamples for intervals"),
    "resampling.ci_level": ("resampling_ci_level", float,
                            "confidence level in (0, 1)"),
    "seed": ("seed", int, "seed recorded in reports and used for resampling"),
    "report.path": ("report_path", str, "where to write the JSON report"),
}

_RESAMPLING_KEYS = ("resampling.bootstrap_samples", "resampling.ci_level")


@dataclass
class AnalysisConfig:
    input_path: Path
    output_column: str | None
    input_columns: tuple[str, ...] | None
    degree: int
    families: tuple[str, ...]
    groups: tuple[tuple[str, ...], ...] | None
    denominator: str
    ortho: OrthoOptions
    resampling: ResamplingPlan | None
    seed: int
    report_path: Path


def parse_config_file(path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(
                f"{path}: line {lineno}: unknown key {key!r}; "
                f"valid keys: {', '.join(sorted(CONFIG_KEYS))}"
            )
        values[key] = value.strip()
    return values


def build_analysis_config(file_values: dict[str, str],
                          cli_values: dict[str, object]) -> AnalysisConfig:
    merged: dict[str, object] = {}
    for key, text in file_values.items():
        _, parser, _ = CONFIG_KEYS[key]
        merged[key] = parser(text) if isinstance(text, str) else text
    for key, value in cli_values.items():
        if value is not None:
            merged[key] = value

    if "data.path" not in merged:
        raise ConfigError("data.path is required (config key or --data.path)")
    if "report.path" not in merged:
        raise ConfigError("report.path is required (config key, --report.path or --out)")
    if "degree" not in merged:
        raise ConfigError("degree is required (config key or --degree)")
    degree = int(merged["degree"])
    if degree < 1:
        raise ConfigError(f"degree must be >= 1, got {degree}")

    families = tuple(merged.get("families", ("full", "uncorrelated")))
    unknown = [f for f in families if f not in FAMILIES]
    if unknown:
        raise ConfigError(f"unknown families {unknown}; valid: {list(FAMILIES)}")
    groups = merged.get("groups")
    if groups is not None:
        flat = [name for group in groups for name in group]
        if len(set(flat)) != len(flat):
            raise ConfigError("groups must be disjoint")
    denominator = str(merged.get("denominator", "sample"))
    if denominator not in ("sample", "pce"):
        raise ConfigError(f"denominator must be 'sample' or 'pce', got {denominator!r}")

    ortho = OrthoOptions(
        drop_dependent=bool(merged.get("ortho.drop_dependent", False)),
        drop_tolerance=float(merged.get("ortho.drop_tolerance", 1e-10)),
        reorthogonalize=bool(merged.get("ortho.reorthogonalize", True)),
    )
    seed = int(merged.get("seed", 0))
    resampling = None
    if any(k in merged for k in _RESAMPLING_KEYS):
        resampling = ResamplingPlan(
            bootstrap_samples=int(merged.get("resampling.bootstrap_samples", 10_000)),
            ci_level=float(merged.get("resampling.ci_level", 0.95)),
            seed=seed,
        )
    return AnalysisConfig(
        input_path=Path(str(merged["data.path"])),
        output_column=merged.get("data.output_column"),
        input_columns=merged.get("data.input_columns"),
        degree=degree,
        families=families,
        groups=groups,
        denominator=denominator,
        ortho=ortho,
        resampling=resampling,
        seed=seed,
        report_path=Path(str(merged["report.path"])),
    )


def _config_echo(cfg: AnalysisConfig) -> dict:
    return {
        "data.path": str(cfg.input_path),
        "data.output_column": cfg.output_column,
        "data.input_columns": list(cfg.input_columns) if cfg.input_columns else None,
        "degree": cfg.degree,
        "families": list(cfg.families),
        "groups": [list(g) for g in cfg.groups] if cfg.groups else None,
        "denominator": cfg.denominator,
        "ortho.drop_dependent": cfg.ortho.drop_dependent,
        "ortho.drop_tolerance": cfg.ortho.drop_tolerance,
        "ortho.reorthogonalize": cfg.ortho.reorthogonalize,
        "resampling.bootstrap_samples": (
            cfg.resampling.bootstrap_samples if cfg.resampling else None
        ),
        "resampling.ci_level": cfg.resampling.ci_level if cfg.resampling else None,
        "seed": cfg.seed,
        "report.path": str(cfg.report_path),
    }


def cmd_analyze(args) -> int:
    file_values = parse_config_file(args.config) if args.config else {}
    cli_values = {key: getattr(args, dest) for key, (dest, _, _) in CONFIG_KEYS.items()}
    if args.out is not None:
        cli_values["report.path"] = args.out
    cfg = build_analysis_config(file_values, cli_values)

    ds = read_csv(cfg.input_path, cfg.input_columns, cfg.output_column)
    size = basis_size(ds.n_inputs, cfg.degree)
    if ds.n_samples < size:
        raise InsufficientSamplesError(
            f"{ds.n_samples} rows cannot support degree {cfg.degree} with "
            f"{ds.n_inputs} inputs; need at least {size} rows"
        )
    group_indices = None
    if cfg.groups:
        name_to_col = {name: i for i, name in enumerate(ds.input_names)}
        missing = [n for g in cfg.groups for n in g if n not in name_to_col]
        if missing:
            raise ConfigError(f"group inputs {missing} are not input columns")
        group_indices = tuple(tuple(name_to_col[n] for n in g) for g in cfg.groups)
    families = cfg.families
    if group_indices and "groups" not in families:
        families = families + ("groups",)

    pipe = Pipeline(ds, cfg.degree, cfg.ortho)
    report = all_indices(
        ds, cfg.degree, families, groups=group_indices,
        denominator=cfg.denominator, seed=cfg.seed, pipeline=pipe,
    )

    intervals = []
    if cfg.resampling is not None:
        entries = report.entries

        def vector(ds2):
            rep2 = all_indices(
                ds2, cfg.degree, families, groups=group_indices,
                denominator=cfg.denominator, ortho=cfg.ortho,
            )
            return np.array([e.raw_value for e in rep2.entries])

        matrix, n_retried, failures = bootstrap_resample_matrix(
            ds, vector, cfg.resampling
        )
        alpha = (1.0 - cfg.resampling.ci_level) / 2.0
        lows, highs = np.quantile(matrix, [alpha, 1.0 - alpha], axis=0)
        for entry, lo, hi in zip(entries, lows, highs):
            intervals.append(interval_to_dict(
                entry.index_name, entry.target, entry.raw_value, float(lo),
                float(hi), cfg.resampling.ci_level, "rows",
                cfg.resampling.bootstrap_samples,
            ))
        report.diagnostics["bootstrap"] = {
            "resamples": cfg.resampling.bootstrap_samples,
            "retried": n_retried,
            "failures": list(failures),
        }

    tables = []
    if "order" in families and min(ds.n_inputs, cfg.degree) >= 2:
        tables.append({
            "title": "two_way_coefficients",
            "columns": ["term", "coefficient", "magnitude"],
            "rows": [
                {"term": label, "coefficient": theta, "magnitude": abs(theta)}
                for label, theta in interaction_coefficient_report(
                    ds, cfg.degree, 2, pipeline=pipe
                )
            ],
        })

    document = index_report_to_document(report, _config_echo(cfg), intervals, tables)
    write_report(document, cfg.report_path)
    print(f"wrote {cfg.report_path}")
    return 0


def cmd_benchmark(args) -> int:
    document = run_benchmark(
        args.example,
        replications=args.reps,
        samples=args.samples,
        degree=args.degree,
        seed=args.seed,
        rho=args.rho,
        thetas=args.thetas,
        bootstrap_samples=args.bootstrap,
        ci_level=args.ci_level,
        include_screen=not args.no_screen,
    )
    write_report(document, args.out)
    if args.write_data:
        spec = BenchmarkSpec(
            args.example,
            document["config"]["samples_per_replication"],
            seed=args.seed,
            rho=args.rho,
            thetas=args.thetas or (0.4, 0.6, 1.0),
        )
        write_csv(generate(spec), args.write_data)
    print(f"wrote {args.out}")
    return 0


def cmd_generate(args) -> int:
    spec = BenchmarkSpec(
        args.example, args.samples, seed=args.seed,
        rho=args.rho, thetas=args.thetas or (0.4, 0.6, 1.0),
    )
    write_csv(generate(spec), args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_plot(args) -> int:
    document = load_report(args.report)
    PLOT_KINDS[args.kind](document, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsa-pce",
        description="Variance-based sensitivity analysis for dependent inputs "
                    "via data-driven polynomial chaos expansions.",
    )
    parser.add_argument("--version", action="version", version=f"gsa-pce {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="analyze a CSV dataset")
    analyze.add_argument("--config", help="flat key=value configuration file")
    for key, (dest, parser_fn, help_text) in CONFIG_KEYS.items():
        analyze.add_argument(f"--{key}", dest=dest, type=parser_fn, help=help_text)
    analyze.add_argument("--out", help="alias for --report.path")
    analyze.set_defaults(func=cmd_analyze)

    bench = sub.add_parser("benchmark", help="reproduce a published example")
    bench.add_argument("--example", type=int, required=True, choices=(1, 2, 3))
    bench.add_argument("--rho", type=_parse_float_triple,
                       help="example 1 correlations, e.g. 0.5,0.8,0")
    bench.add_argument("--thetas", type=_parse_float_triple,
                       help="example 3 parameters, default 0.4,0.6,1")
    bench.add_argument("--reps", type=int, help="replications (default per example)")
    bench.add_argument("--samples", type=int, help="samples per replication")
    bench.add_argument("--degree", type=int, help="polynomial degree")
    bench.add_argument("--seed", type=int, default=42)
    bench.add_argument("--bootstrap", type=int, default=10_000)
    bench.add_argument("--ci-level", type=float, default=0.95, dest="ci_level")
    bench.add_argument("--no-screen", action="store_true",
                       help="skip the example 3 interaction screening study")
    bench.add_argument("--write-data", help="also write replication 0 as CSV")
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=cmd_benchmark)

    gen = sub.add_parser("generate", help="write a benchmark dataset as CSV")
    gen.add_argument("--example", type=int, required=True, choices=(1, 2, 3))
    gen.add_argument("--samples", type=int, required=True)
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--rho", type=_parse_float_triple)
    gen.add_argument("--thetas", type=_parse_float_triple)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_generate)

    plot = sub.add_parser("plot", help="render an SVG chart from a report")
    plot.add_argument("--report", required=True)
    plot.add_argument("--kind", required=True, choices=sorted(PLOT_KINDS))
    plot.add_argument("--out", required=True)
    plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (ConfigError, BasisSizeError, InvalidPermutationError) as exc:
        print(f"gsa-pce: configuration error: {exc}", file=sys.stderr)
        return 2
    except (DataError, DimensionError, InsufficientSamplesError) as exc:
        print(f"gsa-pce: data error: {exc}", file=sys.stderr)
        return 3
    except (LinearDependenceError, NumericalError) as exc:
        print(f"gsa-pce: numerical failure: {exc}", file=sys.stderr)
        return 4
    except GsaPceError as exc:
        print(f"gsa-pce: error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
