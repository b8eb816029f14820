"""JSON run configuration and CSV ingestion for the command line.

A config file holds one mode. Study mode::

    {
      "mode": "study",
      "study": {"designs": [1], "rhos": [0.95, 1.0], "n": 95, "horizons": [1, 6, 12, 18],
                "alpha": 0.1, "replications": 1000, "bootstrap_B": 500, "seed": 7},
      "output": {"csv": "out.csv", "json": "out.json", "table": true}
    }

The study keys may also sit at the top level, and the short aliases
``design``, ``rho``, ``R``, ``B`` and ``seed`` are accepted. Infer mode uses an
``"infer"`` block with ``input_csv``, ``column``, ``horizons``, ``alpha``,
``methods``, ``B``, ``seed`` and ``demean``.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dgp import Series
from .errors import ConfigError, DataError, MissingColumn, NonNumeric, ParseError
from .harness import StudyConfig
from .intervals import parse_method

MIN_ROWS = 5

_STUDY_KEYS = {
    "designs": "designs", "design": "designs",
    "rhos": "rhos", "rho": "rhos",
    "n": "n",
    "horizons": "horizons", "h": "horizons",
    "alpha": "alpha",
    "replications": "replications", "R": "replications",
    "bootstrap_B": "bootstrap_B", "B": "bootstrap_B",
    "methods": "methods", "method": "methods",
    "base_seed": "base_seed", "seed": "base_seed",
    "threads": "threads",
    "burn_in": "burn_in",
    "variance_convention": "variance_convention",
}
_INFER_KEYS = {"input_csv", "input", "column", "horizons", "alpha", "methods", "method",
               "B", "seed", "demean", "threads"}
_OUTPUT_KEYS = {"csv", "json", "table", "timing"}


@dataclass(frozen=True)
class OutputSpec:
    csv: Path | None = None
    json: Path | None = None
    table: bool = True
    # False writes seconds = 0 so repeated runs give identical bytes
    timing: bool = True


@dataclass(frozen=True)
class InferConfig:
    input_csv: Path
    column: str
    horizons: tuple = (1,)
    alpha: float = 0.10
    methods: tuple = ("RB",)
    B: int = 1000
    seed: int = 0
    demean: bool = False
    threads: int | None = None


@dataclass(frozen=True)
class CliConfig:
    mode: str
    study: StudyConfig | None = None
    infer: InferConfig | None = None
    output: OutputSpec = field(default_factory=OutputSpec)
    paper_scale: bool = False


def _key_line(text: str | None, key: str) -> int | None:
    if not text:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _err(msg, path, key, text):
    return ConfigError(msg, field=path, line=_key_line(text, key))


def _check_output(raw: dict, text: str | None) -> OutputSpec:
    if not isinstance(raw, dict):
        raise _err("output must be an object", "output", "output", text)
    for k in raw:
        if k not in _OUTPUT_KEYS:
            raise _err(f"unknown key {k!r}", f"output.{k}", k, text)
    paths = {}
    for k in ("csv", "json"):
        if raw.get(k) is None:
            paths[k] = None
            continue
        p = Path(raw[k])
        parent = p.parent if str(p.parent) else Path(".")
        if not parent.is_dir():
            raise _err(f"directory {str(parent)!r} does not exist", f"output.{k}", k, text)
        paths[k] = p
    return OutputSpec(csv=paths["csv"], json=paths["json"],
                      table=bool(raw.get("table", True)), timing=bool(raw.get("timing", True)))


def _as_int_list(value, path, key, text):
    items = value if isinstance(value, list) else [value]
    out = []
    for v in items:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
            raise _err(f"expected integers, got {v!r}", path, key, text)
        out.append(int(v))
    return out


def _study_from(raw: dict, text: str | None, prefix: str) -> tuple[StudyConfig, bool]:
    kwargs = {}
    paper_scale = False
    for k, v in raw.items():
        if k == "paper_scale":
            paper_scale = bool(v)
            continue
        if k not in _STUDY_KEYS:
            raise _err(f"unknown key {k!r}", prefix + k, k, text)
        name = _STUDY_KEYS[k]
        if name in kwargs:
            raise _err(f"{name} given twice", prefix + k, k, text)
        if name in ("designs", "horizons"):
            v = _as_int_list(v, prefix + k, k, text)
        elif name in ("n", "replications", "bootstrap_B", "base_seed", "threads", "burn_in"):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
                raise _err(f"{name} must be an integer, got {v!r}", prefix + k, k, text)
            v = int(v)
        elif name == "alpha":
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise _err(f"alpha must be a number, got {v!r}", prefix + k, k, text)
        elif name == "rhos":
            vals = v if isinstance(v, list) else [v]
            if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in vals):
                raise _err("rhos must be numbers", prefix + k, k, text)
            v = vals
        kwargs[name] = v
    try:
        return StudyConfig(**kwargs), paper_scale
    except ConfigError as exc:
        key = next((k for k, n in _STUDY_KEYS.items() if n == exc.field and k in raw), exc.field or "")
        msg = str(exc).split("] ", 1)[-1]
        raise _err(msg, prefix + key, key, text) from None


def _infer_from(raw: dict, text: str | None, prefix: str) -> InferConfig:
    for k in raw:
        if k not in _INFER_KEYS:
            raise _err(f"unknown key {k!r}", prefix + k, k, text)
    src = raw.get("input_csv", raw.get("input"))
    if not src:
        raise _err("input_csv is required", prefix + "input_csv", "input_csv", text)
    if not raw.get("column"):
        raise _err("column is required", prefix + "column", "column", text)
    horizons = tuple(_as_int_list(raw.get("horizons", [1]), prefix + "horizons", "horizons", text))
    if any(h < 1 for h in horizons):
        raise _err("horizons must be >= 1", prefix + "horizons", "horizons", text)
    alpha = raw.get("alpha", 0.10)
    if isinstance(alpha, bool) or not isinstance(alpha, (int, float)) or not 0 < alpha < 1:
        raise _err(f"alpha must lie in (0, 1), got {alpha!r}", prefix + "alpha", "alpha", text)
    methods = raw.get("methods", raw.get("method", ["RB"]))
    methods = methods if isinstance(methods, list) else [methods]
    try:
        methods = tuple(parse_method(m) for m in methods)
    except ValueError as exc:
        raise _err(str(exc), prefix + "methods", "methods", text) from None
    B = raw.get("B", 1000)
    if isinstance(B, bool) or not isinstance(B, int) or B < 2:
        raise _err("B must be an integer >= 2", prefix + "B", "B", text)
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise _err("seed must be an integer", prefix + "seed", "seed", text)
    threads = raw.get("threads")
    if threads is not None and (not isinstance(threads, int) or threads < 1):
        raise _err("threads must be an integer >= 1", prefix + "threads", "threads", text)
    return InferConfig(Path(src), str(raw["column"]), horizons, float(alpha), methods, B, seed,
                       bool(raw.get("demean", False)), threads)


def parse_config(source, text: str | None = None) -> CliConfig:
    """Validate a config given as a path to a JSON file or an already-parsed dict."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", field="config") from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", field="config", line=exc.lineno) from None
    else:
        raw = source
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object", field="config")

    raw = dict(raw)
    output = _check_output(raw.pop("output", {}), text)
    mode = raw.pop("mode", None)
    if mode is None:
        mode = "infer" if "infer" in raw else "study"
    if mode not in ("study", "infer"):
        raise _err(f"mode must be 'study' or 'infer', got {mode!r}", "mode", "mode", text)

    if mode == "study":
        if "infer" in raw:
            raise _err("study mode config must not contain an infer block", "infer", "infer", text)
        if "study" in raw:
            block = raw.pop("study")
            if raw:
                k = next(iter(raw))
                raise _err(f"unexpected top-level key {k!r}", k, k, text)
            if not isinstance(block, dict):
                raise _err("study must be an object", "study", "study", text)
            study, paper = _study_from(block, text, "study.")
        else:
            study, paper = _study_from(raw, text, "")
        if paper:
            study = study.paper_scale()
        return CliConfig("study", study=study, output=output, paper_scale=paper)

    block = raw.pop("infer", None)
    if "study" in raw:
        raise _err("infer mode config must not contain a study block", "study", "study", text)
    if raw:
        k = next(iter(raw))
        raise _err(f"unexpected top-level key {k!r}", k, k, text)
    if not isinstance(block, dict):
        raise _err("infer must be an object", "infer", "infer", text)
    return CliConfig("infer", infer=_infer_from(block, text, "infer."), output=output)


def with_overrides(cfg: CliConfig, threads: int | None = None, seed: int | None = None,
                   paper_scale: bool = False) -> CliConfig:
    if cfg.study is None:
        return cfg
    study = cfg.study
    if threads is not None:
        study = replace(study, threads=threads)
    if seed is not None:
        study = replace(study, base_seed=seed)
    if paper_scale:
        study = study.paper_scale()
    return replace(cfg, study=study, paper_scale=cfg.paper_scale or paper_scale)


def ingest_csv(path, column: str, demean: bool = False) -> Series:
    """Read one numeric column of a headed, comma-separated UTF-8 file.

    The values are used as given: the first observation plays the role of
    y_0. ``demean`` subtracts the sample mean (the model has no intercept, so
    this changes what is being estimated).
    """
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise ParseError(f"cannot open {str(path)!r}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty", line=1) from None
        except csv.Error as exc:
            raise ParseError(str(exc), line=reader.line_num) from None
        header = [h.strip() for h in header]
        if column not in header:
            raise MissingColumn(column)
        col = header.index(column)
        values = []
        try:
            for row_no, row in enumerate(reader, start=1):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise ParseError(f"expected {len(header)} fields, found {len(row)}", line=reader.line_num)
                cell = row[col].strip()
                try:
                    x = float(cell)
                except ValueError:
                    raise NonNumeric(row_no, cell) from None
                if not math.isfinite(x):
                    raise NonNumeric(row_no, cell)
                values.append(x)
        except csv.Error as exc:
            raise ParseError(str(exc), line=reader.line_num) from None
    if len(values) < MIN_ROWS:
        raise DataError(f"need at least {MIN_ROWS} numeric rows, found {len(values)}")
    y = np.array(values)
    if demean:
        y = y - y.mean()
    return Series(y)
