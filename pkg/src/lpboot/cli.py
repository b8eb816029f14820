"""``lpboot`` command line: coverage studies and single-series inference.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import CliConfig, InferConfig, OutputSpec, ingest_csv, parse_config, with_overrides
from .errors import ConfigError, LpBootError
from .harness import default_threads, run_study
from .infer import infer
from .intervals import parse_method
from .report import emit_report

EXIT_CONFIG = 2
EXIT_DATA = 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _methods(text: str) -> list[str]:
    out = []
    for m in text.split(","):
        try:
            out.append(parse_method(m).value)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpboot", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("study", help="run a Monte Carlo coverage study from a JSON config")
    s.add_argument("--config", required=True, type=Path)
    s.add_argument("--threads", type=int, help="worker processes (default: config, then $LPBOOT_THREADS, then 1)")
    s.add_argument("--seed", type=int, help="override the config's base seed")
    s.add_argument("--paper-scale", action="store_true", help="R=5000 replications and B=1000 (long)")
    s.add_argument("--csv", type=Path)
    s.add_argument("--json", type=Path)
    s.add_argument("--no-table", action="store_true")

    i = sub.add_parser("infer", help="impulse-response intervals for a series in a CSV file")
    i.add_argument("--config", type=Path, help="JSON config in infer mode (flags override it)")
    i.add_argument("--input", type=Path)
    i.add_argument("--column")
    i.add_argument("--horizons", type=_int_list)
    i.add_argument("--alpha", type=float)
    i.add_argument("--method", type=_methods, help="comma-separated, e.g. RB,AA")
    i.add_argument("--b", type=int, dest="B")
    i.add_argument("--seed", type=int)
    i.add_argument("--threads", type=int)
    i.add_argument("--demean", action="store_true",
                   help="subtract the sample mean first (the AR(1) model has no intercept)")
    i.add_argument("--csv", type=Path)
    i.add_argument("--json", type=Path)
    i.add_argument("--no-table", action="store_true")
    return p


def _output(base: OutputSpec, args) -> OutputSpec:
    out = base
    if args.csv is not None:
        out = replace(out, csv=args.csv)
    if args.json is not None:
        out = replace(out, json=args.json)
    if args.no_table:
        out = replace(out, table=False)
    return out


def _study_config(args) -> CliConfig:
    cfg = parse_config(args.config)
    if cfg.mode != "study":
        raise ConfigError("config is not in study mode", field="mode")
    threads = args.threads
    if threads is None and "threads" not in _explicit_study_keys(args.config):
        threads = default_threads()
    if threads is not None and threads < 1:
        raise ConfigError("threads must be >= 1", field="threads")
    cfg = with_overrides(cfg, threads=threads, seed=args.seed, paper_scale=args.paper_scale)
    return replace(cfg, output=_output(cfg.output, args))


def _explicit_study_keys(path: Path) -> set:
    import json
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    block = raw.get("study", raw) if isinstance(raw, dict) else {}
    return set(block) if isinstance(block, dict) else set()


def _infer_config(args) -> CliConfig:
    if args.config is not None:
        cfg = parse_config(args.config)
        if cfg.mode != "infer":
            raise ConfigError("config is not in infer mode", field="mode")
        inf, output = cfg.infer, cfg.output
    else:
        if args.input is None or args.column is None:
            raise ConfigError("--input and --column are required without --config", field="input")
        inf, output = InferConfig(args.input, args.column), OutputSpec()
    changes = {k: v for k, v in dict(input_csv=args.input, column=args.column, horizons=args.horizons,
                                    alpha=args.alpha, methods=args.method, B=args.B, seed=args.seed,
                                    threads=args.threads).items() if v is not None}
    if args.demean:
        changes["demean"] = True
    inf = replace(inf, **changes)
    if not 0 < inf.alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {inf.alpha}", field="alpha")
    if inf.B < 2:
        raise ConfigError("B must be >= 2", field="B")
    if inf.threads is None:
        inf = replace(inf, threads=default_threads())
    return CliConfig("infer", infer=inf, output=_output(output, args))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "study":
            cfg = _study_config(args)
            result = run_study(cfg.study)
        else:
            cfg = _infer_config(args)
            inf = cfg.infer
            series = ingest_csv(inf.input_csv, inf.column, demean=inf.demean)
            if inf.demean:
                print("warning: series demeaned; the AR(1) model has no intercept", file=sys.stderr)
            result = infer(series, inf.horizons, inf.alpha, inf.methods, inf.B, inf.seed, inf.threads)
        emit_report(result, cfg.output)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LpBootError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
