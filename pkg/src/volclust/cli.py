"""Command-line front end: analyze price files, simulate GARCH data, run the
surrogate / filtering validation experiments, and tabulate results.

Exit codes: 0 success, 1 usage or input validation error, 2 unexpected
internal error. Every successful run writes a manifest recording the
resolved configuration, seeds, and input digests next to its outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import statistics
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dvc import AnalysisConfig, _run_stage, analyze
from .garch import GarchParams, filter_returns, fit, simulate
from .ingest import PriceSeries, compute_returns, load_prices
from .surrogate import shuffle

# surrogate streams must not reuse the simulation streams of nearby seeds
SHUFFLE_SEED_OFFSET = 2**32

REPORT_COLUMNS = (
    "input",
    "dvc_p",
    "dvc_n",
    "abs_dvc_n",
    "n_points_pos",
    "n_points_neg",
    "status",
)
_SLOPE_NOTE = (
    "dvc_p / dvc_n: least-squares slope of the mean absolute successor "
    "symbol value against the conditioning symbol value (nonnegative / "
    "negative side)."
)


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _sha256(path: str | Path) -> str | None:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError:
        return None


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _manifest(command: str, config: dict, seeds: list[int], inputs: list) -> dict:
    return {
        "command": command,
        "version": __version__,
        "config": config,
        "seeds": [int(s) for s in seeds],
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
    }


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONFIG_KEYS = {
    "n_bins": int,
    "clip_sigmas": float,
    "min_count": int,
    "standardize_first": _parse_bool,
}
_CONFIG_ALIASES = {"bins": "n_bins", "clip-sigmas": "clip_sigmas", "min-count": "min_count"}


def _read_config_file(path: str | Path) -> dict:
    """Parse a key = value config file (one pair per line, # comments)."""
    options = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        key = _CONFIG_ALIASES.get(key, key)
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}: line {lineno}: unknown config key {key!r}")
        try:
            options[key] = _CONFIG_KEYS[key](value.strip().strip("\"'"))
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from None
    return options


def _resolve_config(args) -> AnalysisConfig:
    """Merge config file and flags into an AnalysisConfig; flags win."""
    values = {}
    if getattr(args, "config", None):
        values.update(_read_config_file(args.config))
    if args.bins is not None:
        values["n_bins"] = args.bins
    if args.clip_sigmas is not None:
        values["clip_sigmas"] = args.clip_sigmas
    if args.min_count is not None:
        values["min_count"] = args.min_count
    if args.standardize is not None:
        values["standardize_first"] = args.standardize
    return AnalysisConfig(**values)


def _price_series(returns, initial_price: float = 100.0) -> PriceSeries:
    """Exponentiate cumulative returns into a tick series starting at 100."""
    log_prices = np.concatenate([[0.0], np.cumsum(returns.values)])
    prices = initial_price * np.exp(log_prices)
    if not np.all(np.isfinite(prices)) or np.any(prices <= 0.0):
        raise ValueError(
            "simulated prices exceed the floating-point range; "
            "reduce n or the variance scale"
        )
    return PriceSeries(timestamps=tuple(range(len(prices))), prices=prices)


def cmd_analyze(args) -> int:
    config = _resolve_config(args)
    prices = _run_stage("load_prices", load_prices, args.input)
    returns = _run_stage("compute_returns", compute_returns, prices)
    result = analyze(returns, config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "result.json").write_text(result.to_json(), encoding="utf-8")
    result.profile.write_csv(out / "profile.csv")
    _write_json(
        out / "manifest.json",
        _manifest("analyze", config.to_json_dict(), [], [args.input]),
    )
    print(
        f"dvc_p={result.dvc_p:.6f} dvc_n={result.dvc_n:.6f} "
        f"points={result.n_points_pos}+{result.n_points_neg} -> {out}"
    )
    return 0


def cmd_simulate(args) -> int:
    params = GarchParams(omega=args.omega, alpha=args.alpha, beta=args.beta)
    returns = simulate(params, args.n, args.seed)
    prices = _price_series(returns)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    prices.write_csv(out)
    config = {"omega": args.omega, "alpha": args.alpha, "beta": args.beta, "n": args.n}
    _write_json(
        Path(f"{out}.manifest.json"),
        _manifest("simulate", config, [args.seed], []),
    )
    print(f"wrote {len(prices)} prices -> {out}")
    return 0


def run_experiment(
    kind: str, params: GarchParams, n: int, seeds: list[int], config: AnalysisConfig
) -> dict:
    """Per-seed comparison of raw vs transformed (shuffled or GARCH-filtered) series."""
    if kind not in ("surrogate", "garch-filter"):
        raise ValueError(f"unknown experiment kind {kind!r}")
    rows, failures = [], []
    for seed in seeds:
        try:
            raw = simulate(params, n, seed)
            raw_result = analyze(raw, config)
            if kind == "surrogate":
                transformed = shuffle(raw, seed + SHUFFLE_SEED_OFFSET)
            else:
                transformed = filter_returns(raw, fit(raw))
            transformed_result = analyze(transformed, config)
            rows.append(
                {
                    "seed": int(seed),
                    "dvc_raw": {"p": raw_result.dvc_p, "n": raw_result.dvc_n},
                    "dvc_transformed": {
                        "p": transformed_result.dvc_p,
                        "n": transformed_result.dvc_n,
                    },
                }
            )
        except ValueError as exc:
            failures.append({"seed": int(seed), "error": str(exc)})

    def _median(group: str, side: str, absolute: bool) -> float:
        values = (row[group][side] for row in rows)
        return statistics.median(abs(v) if absolute else v for v in values)

    medians = {}
    if rows:
        for group in ("dvc_raw", "dvc_transformed"):
            medians[group] = {s: _median(group, s, False) for s in ("p", "n")}
            medians[f"abs_{group}"] = {s: _median(group, s, True) for s in ("p", "n")}
    return {
        "kind": kind,
        "n": int(n),
        "params": {"omega": params.omega, "alpha": params.alpha, "beta": params.beta},
        "config": config.to_json_dict(),
        "rows": rows,
        "failures": failures,
        "medians": medians,
    }


def cmd_experiment(args) -> int:
    params = GarchParams(omega=args.omega, alpha=args.alpha, beta=args.beta)
    config = _resolve_config(args)
    seeds = _parse_seeds(args.seeds)
    payload = run_experiment(args.kind, params, args.n, seeds, config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "experiment.json", payload)
    _write_json(
        out / "manifest.json",
        _manifest("experiment", {**payload["params"], "kind": args.kind,
                                 "n": args.n, **config.to_json_dict()}, seeds, []),
    )
    for failure in payload["failures"]:
        print(f"seed {failure['seed']} failed: {failure['error']}", file=sys.stderr)
    if not payload["rows"]:
        print("error: all seeds failed", file=sys.stderr)
        return 1
    med = payload["medians"]
    print(
        f"{args.kind}: median |dvc| raw p={med['abs_dvc_raw']['p']:.4f} "
        f"n={med['abs_dvc_raw']['n']:.4f} -> transformed "
        f"p={med['abs_dvc_transformed']['p']:.4f} n={med['abs_dvc_transformed']['n']:.4f}"
    )
    return 0


def _parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"seeds must be comma-separated integers, got {text!r}") from None
    if not seeds:
        raise ValueError("at least one seed is required")
    return seeds


def cmd_report(args) -> int:
    rows = []
    for path in args.inputs:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            dvc_n = float(data["dvc_n"])
            rows.append(
                {
                    "input": str(path),
                    "dvc_p": float(data["dvc_p"]),
                    "dvc_n": dvc_n,
                    "abs_dvc_n": abs(dvc_n),
                    "n_points_pos": int(data["n_points_pos"]),
                    "n_points_neg": int(data["n_points_neg"]),
                    "status": "ok",
                }
            )
        except (OSError, ValueError, KeyError, TypeError) as exc:
            rows.append(
                {
                    "input": str(path),
                    "dvc_p": "",
                    "dvc_n": "",
                    "abs_dvc_n": "",
                    "n_points_pos": "",
                    "n_points_neg": "",
                    "status": f"error: {exc}",
                }
            )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_lines = [",".join(REPORT_COLUMNS)]
    for row in rows:
        fields = []
        for col in REPORT_COLUMNS:
            value = row[col]
            text = repr(value) if isinstance(value, float) else str(value)
            if "," in text or '"' in text:
                text = '"' + text.replace('"', '""') + '"'
            fields.append(text)
        csv_lines.append(",".join(fields))
    (out / "report.csv").write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    _write_json(out / "manifest.json", _manifest("report", {}, [], list(args.inputs)))

    widths = {col: max(len(col), *(len(_cell(row[col])) for row in rows)) for col in REPORT_COLUMNS}
    print("  ".join(col.ljust(widths[col]) for col in REPORT_COLUMNS))
    for row in rows:
        print("  ".join(_cell(row[col]).ljust(widths[col]) for col in REPORT_COLUMNS))
    print(_SLOPE_NOTE)

    ok = sum(1 for row in rows if row["status"] == "ok")
    return 0 if ok >= 1 else 1


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _add_analysis_flags(parser) -> None:
    parser.add_argument("--bins", type=int, default=None,
                        help="number of bins, odd and >= 3 (default 41)")
    parser.add_argument("--clip-sigmas", dest="clip_sigmas", type=float, default=None,
                        help="binning half-range in sample stdevs (default 3)")
    parser.add_argument("--min-count", dest="min_count", type=int, default=None,
                        help="minimum transitions per profile point (default 100)")
    parser.add_argument("--standardize", action=argparse.BooleanOptionalAction,
                        default=None, help="standardize returns before binning (default on)")
    parser.add_argument("--config", default=None,
                        help="key = value config file; explicit flags override it")


def _build_parser() -> _Parser:
    parser = _Parser(prog="volclust", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a timestamp,price CSV")
    p.add_argument("input", help="input price CSV")
    p.add_argument("--out", required=True, help="output directory")
    _add_analysis_flags(p)

    p = sub.add_parser("simulate", help="simulate a GARCH(1,1) price CSV")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="number of returns (writes n+1 prices)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("experiment", help="raw vs transformed comparison over seeds")
    p.add_argument("--kind", choices=["surrogate", "garch-filter"], required=True)
    p.add_argument("--n", type=int, required=True, help="returns per simulated series")
    p.add_argument("--seeds", required=True, help="comma-separated integer seeds")
    p.add_argument("--omega", type=float, default=0.05)
    p.add_argument("--alpha", type=float, default=0.10)
    p.add_argument("--beta", type=float, default=0.85)
    p.add_argument("--out", required=True, help="output directory")
    _add_analysis_flags(p)

    p = sub.add_parser("report", help="tabulate result.json files")
    p.add_argument("inputs", nargs="+", help="result.json files")
    p.add_argument("--out", required=True, help="output directory")

    return parser


_HANDLERS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
