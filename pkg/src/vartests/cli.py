"""Command-line interface.

Four subcommands: ``test`` (spread homogeneity), ``trend`` (monotone
spread), ``anova`` (means, classic/Welch/adaptive), and ``simulate``
(Monte Carlo size/power grids).  Dataset files are CSV with ``group``
and ``value`` columns; reports are JSON (default) or plain text with
full-precision numbers, so piping the JSON back into a program loses
nothing.

Exit codes: 0 on success, 2 for input or usage errors, 3 when the data
are degenerate (a test's statistic would be 0/0).
"""

from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
import warnings
from typing import Any, Sequence

from .errors import DegenerateDataError, ValidationError
from .means import AdaptiveConfig, adaptive_anova, anova_f, welch_anova
from .numerics import derive_seed
from .samples import (
    CenterKind,
    GroupedSample,
    as_center_kind,
    deviations,
    hines_hines_correct,
    obrien_scale,
    trimmed,
)
from .sim import Scenario, SimulationReport, compile_test_label, power_ordering_grid, run_grid, table1_grid
from .spread import TestResult, as_correction, bartlett_m, box_anderson_b3, levene_test
from .trend import trend_test

__all__ = ["main"]

_CENTER_CHOICES = ("mean", "median", "trimmed")
_CORRECTION_CHOICES = ("none", "hines-hines", "obrien")
_SIDE_CHOICES = ("increasing", "decreasing", "two-sided")

_REPORT_COLUMNS = (
    "grid_seed",
    "scenario",
    "distribution",
    "group_sizes",
    "sigma_ratios",
    "mean_shifts",
    "nominal_level",
    "replications",
    "master_seed",
    "test",
    "rejection_rate",
    "mc_standard_error",
    "error_count",
)


# ---------------------------------------------------------------------------
# dataset files


def _read_dataset(path: str, group_order: Sequence[str] | None = None) -> GroupedSample:
    try:
        handle = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise ValidationError(f"cannot read dataset {path!r}: {exc}") from None
    with handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        for required in ("group", "value"):
            if required not in fields:
                raise ValidationError(f"dataset {path!r} is missing the {required!r} column")
        labels: list[str] = []
        values: list[float] = []
        for row_number, row in enumerate(reader, start=2):
            label = (row.get("group") or "").strip()
            raw = (row.get("value") or "").strip()
            if not label:
                raise ValidationError(f"{path}:{row_number}: empty group label")
            try:
                value = float(raw)
            except ValueError:
                raise ValidationError(f"{path}:{row_number}: bad value {raw!r}") from None
            labels.append(label)
            values.append(value)
    if not labels:
        raise ValidationError(f"dataset {path!r} has no data rows")
    return GroupedSample.from_columns(labels, values, group_order)


def _parse_group_order(text: str | None) -> list[str] | None:
    if text is None:
        return None
    order = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not order:
        raise ValidationError("--group-order lists no labels")
    return order


# ---------------------------------------------------------------------------
# report documents


def _center_fields(kind: CenterKind | None) -> dict[str, Any]:
    if kind is None:
        return {"center": None, "trim_proportion": None}
    return {"center": kind.name, "trim_proportion": kind.trim_proportion}


def _group_rows(sample: GroupedSample, kind: CenterKind | None) -> list[dict[str, Any]]:
    """Per-group summaries: location estimate, mean deviation, variance."""
    effective = kind if kind is not None else as_center_kind("mean")
    dev = deviations(sample, effective)
    rows = []
    for (label, arr), c, z in zip(sample.groups, dev.centers, dev.values):
        rows.append(
            {
                "label": label,
                "size": int(arr.size),
                "center": float(c),
                "deviation_mean": float(z.mean()),
                "variance": float(arr.var(ddof=1)) if arr.size > 1 else None,
            }
        )
    return rows


def _test_result_fields(result: TestResult) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "method": result.method,
        "statistic": float(result.statistic),
        "df1": float(result.df1),
        "df2": None if result.df2 is None else float(result.df2),
        "p_value": float(result.p_value),
    }
    doc.update(_center_fields(result.center))
    doc["correction"] = result.correction
    if result.details:
        doc["details"] = {key: float(value) for key, value in result.details.items()}
    return doc


def _analyzed_deviation_means(sample: GroupedSample, kind: CenterKind, correction: str):
    """Group means of the deviations exactly as the test analyzed them."""
    dev = deviations(sample, kind)
    if correction == "hines-hines":
        dev = hines_hines_correct(dev)
    elif correction == "obrien":
        dev = obrien_scale(dev)
    return [float(z.mean()) for z in dev.values]


def _finish(doc: dict[str, Any], caught: list[warnings.WarningMessage], fmt: str) -> int:
    doc["warnings"] = [str(item.message) for item in caught]
    if fmt == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(_render_text(doc))
    return 0


def _scalar_text(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_text(doc: dict[str, Any]) -> str:
    lines: list[str] = []
    for key, value in doc.items():
        if key == "groups":
            lines.append("groups:")
            for row in value:
                pieces = " ".join(f"{k}={_scalar_text(v)}" for k, v in row.items())
                lines.append(f"  {pieces}")
        elif isinstance(value, dict):
            lines.append(f"{key}:")
            for sub_key, sub_value in value.items():
                lines.append(f"  {sub_key}: {_scalar_text(sub_value)}")
        elif key == "warnings":
            if value:
                lines.append("warnings:")
                lines.extend(f"  - {item}" for item in value)
            else:
                lines.append("warnings: none")
        elif isinstance(value, (list, tuple)):
            lines.append(f"{key}: {', '.join(_scalar_text(item) for item in value)}")
        else:
            lines.append(f"{key}: {_scalar_text(value)}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands


def _resolve_center(name: str | None, trim_proportion: float, default: str) -> CenterKind:
    chosen = default if name is None else name
    if chosen == "trimmed":
        return trimmed(trim_proportion)
    return as_center_kind(chosen)


def _cmd_test(args: argparse.Namespace) -> int:
    method = args.method
    if method in ("bartlett", "box-anderson"):
        if args.center is not None or args.correction is not None:
            raise ValidationError(f"--center/--correction do not apply to --method {method}")
        sample = _read_dataset(args.input)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = bartlett_m(sample) if method == "bartlett" else box_anderson_b3(sample)
        doc = _test_result_fields(result)
        doc["groups"] = _group_rows(sample, None)
        return _finish(doc, caught, args.format)

    if method == "bfl":
        if args.center not in (None, "median"):
            raise ValidationError("--method bfl fixes the center to median; use --method levene to vary it")
        center = as_center_kind("median")
    elif method == "trimmed":
        if args.center not in (None, "trimmed"):
            raise ValidationError("--method trimmed fixes the center to trimmed; use --method levene to vary it")
        center = trimmed(args.trim_proportion)
    else:  # levene
        center = _resolve_center(args.center, args.trim_proportion, "median")
    correction = as_correction(args.correction)
    sample = _read_dataset(args.input)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = levene_test(sample, center, correction)
    doc = _test_result_fields(result)
    doc["groups"] = _group_rows(sample, center)
    for row, analyzed in zip(doc["groups"], _analyzed_deviation_means(sample, center, correction)):
        row["deviation_mean"] = analyzed
    return _finish(doc, caught, args.format)


def _parse_scores(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(piece) for piece in text.split(",")]
    except ValueError:
        raise ValidationError(f"bad --scores {text!r}; expected comma-separated numbers") from None


def _cmd_trend(args: argparse.Namespace) -> int:
    center = _resolve_center(args.center, args.trim_proportion, "median")
    scores = _parse_scores(args.scores)
    sample = _read_dataset(args.input, _parse_group_order(args.group_order))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = trend_test(sample, scores, center)
    headline = {
        "increasing": result.p_increasing,
        "decreasing": result.p_decreasing,
        "two-sided": result.p_two_sided,
    }[args.side]
    doc: dict[str, Any] = {
        "method": "trend",
        "beta_hat": float(result.beta_hat),
        "std_error": float(result.std_error),
        "z_statistic": float(result.z_statistic),
        "side": args.side,
        "p_value": float(headline),
        "p_increasing": float(result.p_increasing),
        "p_decreasing": float(result.p_decreasing),
        "p_two_sided": float(result.p_two_sided),
    }
    doc.update(_center_fields(result.center))
    doc["scores"] = [float(w) for w in result.scores]
    doc["groups"] = _group_rows(sample, result.center)
    return _finish(doc, caught, args.format)


def _cmd_anova(args: argparse.Namespace) -> int:
    method = args.method
    if method != "adaptive" and (args.prelim_level is not None or args.prelim_center is not None):
        raise ValidationError("--prelim-level/--prelim-center only apply to --method adaptive")
    sample = _read_dataset(args.input)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if method == "classic":
            doc = _test_result_fields(anova_f(sample))
        elif method == "welch":
            doc = _test_result_fields(welch_anova(sample))
        else:
            level = 0.15 if args.prelim_level is None else args.prelim_level
            prelim_center = _resolve_center(args.prelim_center, args.trim_proportion, "median")
            config = AdaptiveConfig(preliminary_level=level, preliminary_center=prelim_center)
            outcome = adaptive_anova(sample, config)
            doc = {
                "method": "adaptive",
                "branch": outcome.chosen_branch,
                "statistic": float(outcome.final.statistic),
                "df1": float(outcome.final.df1),
                "df2": float(outcome.final.df2),
                "p_value": float(outcome.final.p_value),
                "preliminary_level": float(config.preliminary_level),
                "preliminary": _test_result_fields(outcome.preliminary),
                "final": _test_result_fields(outcome.final),
            }
    doc["groups"] = _group_rows(sample, None)
    return _finish(doc, caught, args.format)


# ---------------------------------------------------------------------------
# simulate


_SCENARIO_KEYS = (
    "distribution",
    "group_sizes",
    "sigma_ratios",
    "mean_shifts",
    "tests",
    "nominal_level",
    "replications",
    "master_seed",
)


def _parse_scenario_file(path: str, default_reps: int, grid_seed: int) -> tuple[Scenario, ...]:
    """Parse a scenario file: blocks of ``key = value`` lines.

    A block starts with ``scenario = NAME``.  Lists are comma-separated;
    blank lines and ``#`` lines are skipped.  Scenarios without an
    explicit ``master_seed`` get one derived from the grid seed and
    their position in the file.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            raw_lines = handle.readlines()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario file {path!r}: {exc}") from None
    blocks: list[dict[str, str]] = []
    current: dict[str, str] | None = None
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key or not value:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        if key == "scenario":
            current = {"scenario": value}
            blocks.append(current)
            continue
        if current is None:
            raise ValidationError(f"{path}:{lineno}: file must open a block with 'scenario = NAME' first")
        if key not in _SCENARIO_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
        if key in current:
            raise ValidationError(f"{path}:{lineno}: duplicate key {key!r} in scenario {current['scenario']!r}")
        current[key] = value
    if not blocks:
        raise ValidationError(f"scenario file {path!r} defines no scenarios")

    def _int_list(text: str) -> tuple[int, ...]:
        return tuple(int(piece.strip()) for piece in text.split(","))

    def _float_list(text: str) -> tuple[float, ...]:
        return tuple(float(piece.strip()) for piece in text.split(","))

    scenarios = []
    for index, block in enumerate(blocks):
        name = block["scenario"]
        try:
            for required in ("group_sizes", "sigma_ratios", "tests"):
                if required not in block:
                    raise ValidationError(f"missing key {required!r}")
            scenarios.append(
                Scenario(
                    name=name,
                    distribution=block.get("distribution", "normal"),
                    group_sizes=_int_list(block["group_sizes"]),
                    sigma_ratios=_float_list(block["sigma_ratios"]),
                    mean_shifts=_float_list(block["mean_shifts"]) if "mean_shifts" in block else None,
                    tests=tuple(piece.strip() for piece in block["tests"].split(",")),
                    nominal_level=float(block.get("nominal_level", "0.05")),
                    replications=int(block["replications"]) if "replications" in block else default_reps,
                    master_seed=int(block["master_seed"]) if "master_seed" in block else derive_seed(grid_seed, index),
                )
            )
        except (ValueError, ValidationError) as exc:
            raise ValidationError(f"{path}: scenario {name!r}: {exc}") from None
    return tuple(scenarios)


def _format_ratio(value: float) -> str:
    return format(value, "g")


def write_report_csv(report: SimulationReport, path: str, grid_seed: int) -> None:
    """Write one CSV row per (scenario, test) cell; numbers keep full precision."""
    try:
        handle = open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot write report {path!r}: {exc}") from None
    with handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_REPORT_COLUMNS)
        for cell in report.cells:
            scenario = cell.scenario
            writer.writerow(
                (
                    str(grid_seed),
                    scenario.name,
                    scenario.distribution,
                    ":".join(str(n) for n in scenario.group_sizes),
                    ":".join(_format_ratio(r) for r in scenario.sigma_ratios),
                    ":".join(_format_ratio(m) for m in scenario.mean_shifts),
                    repr(scenario.nominal_level),
                    str(scenario.replications),
                    str(scenario.master_seed),
                    cell.test,
                    repr(cell.rejection_rate),
                    repr(cell.mc_standard_error),
                    str(cell.error_count),
                )
            )


def _cmd_simulate(args: argparse.Namespace) -> int:
    grid_seed = secrets.randbits(63) if args.seed is None else args.seed
    if not 0 <= grid_seed < 2**64:
        raise ValidationError(f"--seed must lie in [0, 2**64), got {grid_seed!r}")
    if args.grid == "table1":
        scenarios = table1_grid(grid_seed, args.reps)
    elif args.grid == "power-ordering":
        scenarios = tuple(
            scenario
            for center in ("mean", "median", "trimmed")
            for scenario in power_ordering_grid(center, grid_seed, args.reps)
        )
    else:
        scenarios = _parse_scenario_file(args.grid, args.reps, grid_seed)
    report = run_grid(scenarios, workers=args.workers)
    write_report_csv(report, args.out, grid_seed)
    print(
        f"wrote {len(report.cells)} cells ({len(scenarios)} scenarios) to {args.out} "
        f"[grid seed {grid_seed}, {report.elapsed:.1f}s]"
    )
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vartests",
        description="Levene-type spread tests, spread-trend tests, and adaptive ANOVA.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", required=True, help="CSV dataset with 'group' and 'value' columns")
        p.add_argument("--format", choices=("json", "text"), default="json", help="report format")

    p_test = sub.add_parser("test", help="test equality of spread across groups")
    add_common(p_test)
    p_test.add_argument(
        "--method",
        choices=("levene", "bfl", "trimmed", "bartlett", "box-anderson"),
        default="levene",
        help="bfl = levene with median centers; trimmed = levene with trimmed-mean centers",
    )
    p_test.add_argument("--center", choices=_CENTER_CHOICES, default=None)
    p_test.add_argument("--correction", choices=_CORRECTION_CHOICES, default=None)
    p_test.add_argument("--trim-proportion", type=float, default=0.25, help="tail fraction for trimmed centers")
    p_test.set_defaults(handler=_cmd_test)

    p_trend = sub.add_parser("trend", help="test for a monotone trend in spread")
    add_common(p_trend)
    p_trend.add_argument("--scores", default=None, help="comma-separated group scores (default 1..k)")
    p_trend.add_argument("--center", choices=_CENTER_CHOICES, default=None)
    p_trend.add_argument("--trim-proportion", type=float, default=0.25)
    p_trend.add_argument("--side", choices=_SIDE_CHOICES, default="two-sided")
    p_trend.add_argument("--group-order", default=None, help="comma-separated labels fixing the group order")
    p_trend.set_defaults(handler=_cmd_trend)

    p_anova = sub.add_parser("anova", help="test equality of means")
    add_common(p_anova)
    p_anova.add_argument("--method", choices=("classic", "welch", "adaptive"), default="adaptive")
    p_anova.add_argument("--prelim-level", type=float, default=None, help="level of the preliminary spread test")
    p_anova.add_argument("--prelim-center", choices=_CENTER_CHOICES, default=None)
    p_anova.add_argument("--trim-proportion", type=float, default=0.25)
    p_anova.set_defaults(handler=_cmd_anova)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo size/power grid")
    p_sim.add_argument("--grid", required=True, help="'table1', 'power-ordering', or a scenario file path")
    p_sim.add_argument("--seed", type=int, default=None, help="grid seed (default: fresh OS entropy, recorded in the output)")
    p_sim.add_argument("--reps", type=int, default=10000, help="replications per scenario (scenario files may override)")
    p_sim.add_argument("--workers", type=int, default=1, help="worker processes; results do not depend on this")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.set_defaults(handler=_cmd_simulate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except DegenerateDataError as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
