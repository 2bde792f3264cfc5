"""Command-line interface.

Two subcommands:

    pcscreen analyze --prices FILE [--dividends FILE] [options] --out DIR
    pcscreen synth   --spec FILE --out DIR

``analyze`` runs the full pipeline (parse, completeness filter, dividend
adjustment, correlation, eigendecomposition, detection) and writes the
detection report plus figures and a run manifest into --out. ``synth``
renders a synthetic-market spec into the same CSV formats analyze consumes,
together with the answer key.

Exit codes: 0 success (including an empty group list), 1 configuration
error, 2 data error. Errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .detector import DetectorConfig, detect, rolling_detect
from .errors import ConfigError, DataError, PCScreenError
from .panel import completeness_report, filter_complete, parse_dividends, parse_prices
from .report import (
    adjacent_trailing_pairs,
    biplot,
    biplot_filename,
    price_tracks,
    write_eigen_tail_csv,
)
from .returns import compute_returns, write_adjusted_prices_csv, write_returns_csv
from .spectra import (
    correlation,
    eigendecompose,
    write_correlation_csv,
    write_eigenvalues_csv,
)
from .synth import answer_key, generate, spec_from_json
from .panel import write_dividends_csv, write_prices_csv

_CONFIG_KEYS = {
    "trailing_count",
    "eigenvalue_ceiling",
    "abs_threshold",
    "rel_threshold",
    "min_group_size",
    "max_eigenvalue",
    "residual_ceiling",
    "pattern_cos_threshold",
    "window",
    "step",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcscreen",
        description="Detect highly correlated asset groups from the "
        "low-variance principal components of a return correlation matrix.",
    )
    parser.add_argument("--version", action="version", version=f"pcscreen {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="run the detection pipeline on price data")
    an.add_argument("--prices", required=True, help="prices CSV (date,ticker,close)")
    an.add_argument("--dividends", help="dividends CSV (date,ticker,amount)")
    an.add_argument("--config", help="JSON config file; flags take precedence")
    an.add_argument("--trailing", type=int, default=None,
                    help="number of smallest-eigenvalue components to scan (default 6)")
    an.add_argument("--abs-threshold", type=float, default=None,
                    help="absolute loading significance floor (default 0.2)")
    an.add_argument("--rel-threshold", type=float, default=None,
                    help="significance floor as fraction of the component max (default 0.5)")
    an.add_argument("--eigenvalue-ceiling", type=float, default=None,
                    help="scan all components below this eigenvalue instead of a fixed count")
    an.add_argument("--max-eigenvalue", type=float, default=None,
                    help="largest eigenvalue that still counts as near-constant (default 0.3)")
    an.add_argument("--residual-ceiling", type=float, default=None,
                    help="max squared-loading mass on near-zero entries (default 0.25)")
    an.add_argument("--cos-threshold", type=float, default=None,
                    help="|cosine| above which loading profiles match when splitting (default 0.85)")
    an.add_argument("--min-group-size", type=int, default=None,
                    help="smallest reported group (default 2)")
    an.add_argument("--window", type=int, default=None,
                    help="rolling window length in return observations")
    an.add_argument("--step", type=int, default=None,
                    help="rolling window step (default 1 when --window is given)")
    an.add_argument("--rescale-tracks", action="store_true",
                    help="per-member vertical scale in price-track charts")
    an.add_argument("--dump-correlation", action="store_true",
                    help="also write correlation.csv and eigenvalues.csv")
    an.add_argument("--dump-returns", action="store_true",
                    help="also write returns.csv and adjusted_prices.csv")
    an.add_argument("--out", default=".", help="output directory (created if missing)")

    sy = sub.add_parser("synth", help="generate a synthetic market from a spec")
    sy.add_argument("--spec", required=True, help="synthetic-market spec JSON")
    sy.add_argument("--out", default=".", help="output directory (created if missing)")
    return parser


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _build_config(args) -> tuple[DetectorConfig, int | None, int | None]:
    """Merge defaults < config file < flags into a DetectorConfig + window/step."""
    settings: dict = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)
    flag_map = {
        "trailing_count": args.trailing,
        "eigenvalue_ceiling": args.eigenvalue_ceiling,
        "abs_threshold": args.abs_threshold,
        "rel_threshold": args.rel_threshold,
        "min_group_size": args.min_group_size,
        "max_eigenvalue": args.max_eigenvalue,
        "residual_ceiling": args.residual_ceiling,
        "pattern_cos_threshold": args.cos_threshold,
        "window": args.window,
        "step": args.step,
    }
    for key, value in flag_map.items():
        if value is not None:
            settings[key] = value
    window = settings.pop("window", None)
    step = settings.pop("step", None)
    try:
        cfg = DetectorConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    if step is not None and window is None:
        raise ConfigError("--step requires --window")
    if window is not None and step is None:
        step = 1
    return cfg, window, step


def _group_payload(groups) -> list[dict]:
    return [dict(g.to_dict(), group_id=i + 1) for i, g in enumerate(groups)]


def _flat_csv(groups) -> str:
    lines = ["group_id,ticker,pc_rank,loading,eigenvalue"]
    for gid, g in enumerate(groups, start=1):
        for member in g.members:
            for rank, lam, loading in zip(g.detecting_pcs, g.eigenvalues, g.loadings[member]):
                lines.append(f"{gid},{member},{rank},{loading!r},{lam!r}")
    return "\n".join(lines) + "\n"


def run_analyze(args) -> int:
    cfg, window, step = _build_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    prices_path = Path(args.prices)
    with open(prices_path, encoding="utf-8") as fh:
        panel = parse_prices(fh)
    inputs = {str(prices_path): _sha256(prices_path)}
    if args.dividends:
        div_path = Path(args.dividends)
        with open(div_path, encoding="utf-8") as fh:
            panel = parse_dividends(fh, panel)
        inputs[str(div_path)] = _sha256(div_path)

    dropped = completeness_report(panel)
    panel = filter_complete(panel)
    rp = compute_returns(panel)
    cm = correlation(rp)
    ed = eigendecompose(cm)

    outputs: dict[str, str] = {}
    groups = detect(ed, cfg)
    if window is not None:
        windows = rolling_detect(rp, window, step, cfg)
        payload = {
            "mode": "rolling",
            "window": window,
            "step": step,
            "windows": [
                {
                    "start_date": w.start_date.isoformat(),
                    "end_date": w.end_date.isoformat(),
                    "groups": _group_payload(w.groups),
                    "dropped_tickers": list(w.dropped_tickers),
                    "rank_deficient": w.rank_deficient,
                    "skipped_reason": w.skipped_reason,
                }
                for w in windows
            ],
        }
    else:
        payload = {"mode": "full", "groups": _group_payload(groups)}
    payload["config"] = cfg.to_dict()
    payload["universe"] = {
        "tickers": list(panel.tickers),
        "n_days": panel.n_days,
        "n_return_obs": rp.n_obs,
        "dropped_incomplete": dropped,
    }
    outputs["detection.json"] = json.dumps(payload, indent=2) + "\n"
    outputs["detection.csv"] = _flat_csv(groups)

    last_k = min(cfg.trailing_count, ed.p - 1) if cfg.eigenvalue_ceiling is None else ed.p
    outputs["eigen_tail.csv"] = write_eigen_tail_csv(ed, max(1, last_k))
    trailing = min(cfg.trailing_count, ed.p - 1)
    for pc_a, pc_b in adjacent_trailing_pairs(ed.p, max(2, trailing)):
        _, svg = biplot(ed, pc_a, pc_b, groups)
        outputs[biplot_filename(pc_a, pc_b)] = svg
    for gid, group in enumerate(groups, start=1):
        csv_text, svg_text = price_tracks(rp, group, rescale=args.rescale_tracks)
        outputs[f"tracks_group{gid}.csv"] = csv_text
        outputs[f"tracks_group{gid}.svg"] = svg_text
    if args.dump_correlation:
        outputs["correlation.csv"] = write_correlation_csv(cm)
        outputs["eigenvalues.csv"] = write_eigenvalues_csv(ed)
    if args.dump_returns:
        outputs["returns.csv"] = write_returns_csv(rp)
        outputs["adjusted_prices.csv"] = write_adjusted_prices_csv(rp)

    for name, text in outputs.items():
        (out_dir / name).write_text(text, encoding="utf-8")
    manifest = {
        "tool": "pcscreen",
        "version": __version__,
        "created_utc": dt.datetime.now(dt.timezone.utc).isoformat(),
        "inputs": inputs,
        "config": cfg.to_dict(),
        "window": {"window": window, "step": step} if window is not None else None,
        "outputs": sorted([*outputs, "run_manifest.json"]),
    }
    (out_dir / "run_manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    n_groups = len(groups)
    print(f"pcscreen: {n_groups} group(s) detected; outputs in {out_dir}")
    return 0


def run_synth(args) -> int:
    spec_path = Path(args.spec)
    try:
        text = spec_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read spec {args.spec}: {exc}") from exc
    spec = spec_from_json(text)
    panel = generate(spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "prices.csv").write_text(write_prices_csv(panel), encoding="utf-8")
    (out_dir / "dividends.csv").write_text(write_dividends_csv(panel), encoding="utf-8")
    (out_dir / "answer_key.json").write_text(
        json.dumps(answer_key(spec), indent=2) + "\n", encoding="utf-8"
    )
    print(f"pcscreen: synthetic market with {spec.n_stocks} stocks x {spec.n_days} days in {out_dir}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        if args.command == "analyze":
            return run_analyze(args)
        return run_synth(args)
    except ConfigError as exc:
        _emit_error(exc)
        return 1
    except (DataError, OSError) as exc:
        _emit_error(exc)
        return 2
    except PCScreenError as exc:  # anything else from the library
        _emit_error(exc)
        return 2


def _emit_error(exc: Exception) -> None:
    print(
        json.dumps({"error": type(exc).__name__, "message": str(exc)}),
        file=sys.stderr,
    )


if __name__ == "__main__":
    sys.exit(main())
