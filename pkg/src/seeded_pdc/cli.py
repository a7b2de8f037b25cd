"""Command-line front end.

    seeded-pdc gamma --mu1 2 --mu2 0 --muk 1
    seeded-pdc scan --mu1 0:3:0.1 --mu2 0:3:0.1 --muk 0.3,1 --out fig2.csv
    seeded-pdc simulate --mu1 2 --mu2 0 --muk 1 --tau 0.5 --trials 100000 --seed 7

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import reports
from .core import PdcParams
from .errors import NumericalFailure, UndefinedPointError

log = logging.getLogger("seeded_pdc")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3
SIG_DIGITS = 12
DEFAULT_MAX_POINTS = 10 ** 7
CSV_HEADER = ("mu1", "mu2", "muk", "gamma_c", "gamma_n", "gamma_e", "region")

DEFAULTS = {
    "mu1": 0.0,
    "mu2": 0.0,
    "muk": 0.0,
    "phi": 0.0,
    "tau": 1.0,
    "modes": 1,
    "trials": 100000,
    "seed": None,
    "cutoff": None,
    "out": None,
    "events": None,
    "format": None,
    "bootstrap": 200,
    "workers": 1,
    "max_points": DEFAULT_MAX_POINTS,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt_number(x):
    """12 significant digits, locale independent; ``None`` for missing values."""
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(format(x, f".{SIG_DIGITS}g"))


def fmt_text(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, float)):
        v = fmt_number(x)
        return "" if v is None else repr(v) if isinstance(v, float) else str(v)
    return str(x)


def _normalize(obj):
    if isinstance(obj, dict):
        return {k: _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, (bool, int, float)) or obj is None:
        return fmt_number(obj)
    if hasattr(obj, "item"):
        return fmt_number(obj.item())
    return str(obj)


def dumps(summary: dict) -> str:
    return json.dumps(_normalize(summary), indent=2, sort_keys=False) + "\n"


def _flatten(d, prefix=""):
    for k, v in d.items():
        if isinstance(v, dict):
            yield from _flatten(v, f"{prefix}{k}.")
        else:
            yield f"{prefix}{k}", v


def render(summary: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(summary)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("key", "value"))
    for k, v in _flatten(summary):
        w.writerow((k, fmt_text(v)))
    return buf.getvalue()


def parse_range(text) -> list:
    """``start:stop:step`` (inclusive of stop), a comma list, or a single value."""
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)) and len(text) == 3:
        start, stop, step = (float(v) for v in text)
    else:
        text = str(text).strip()
        if ":" not in text:
            try:
                return [float(v) for v in text.split(",") if v.strip()]
            except ValueError:
                raise UsageError(f"cannot parse value list {text!r}") from None
        try:
            start, stop, step = (float(v) for v in text.split(":"))
        except ValueError:
            raise UsageError(f"range must be start:stop:step, got {text!r}") from None
    if not (step > 0 and start <= stop):
        raise UsageError(f"range needs start <= stop and step > 0, got {start}:{stop}:{step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # grid points are snapped to the printed precision so CSV rows round-trip
    return [fmt_number(start + i * step) for i in range(count)]


def load_config(path) -> dict:
    """``key=value`` lines or a JSON object; keys use flag names without dashes."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad JSON config {path}: {exc}") from None
    else:
        data = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            data[key] = value
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args) -> dict:
    """Merge flags over config file over defaults."""
    cfg = load_config(args.config) if args.config else {}
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    opts = dict(DEFAULTS)
    opts.update(cfg)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    return opts


def _as_float(opts, key):
    try:
        return float(opts[key])
    except (TypeError, ValueError):
        raise UsageError(f"--{key} must be a number, got {opts[key]!r}") from None


def _as_int(opts, key, minimum=None):
    try:
        value = int(opts[key])
    except (TypeError, ValueError):
        raise UsageError(f"--{key} must be an integer, got {opts[key]!r}") from None
    if minimum is not None and value < minimum:
        raise UsageError(f"--{key} must be >= {minimum}")
    return value


def _params(opts) -> PdcParams:
    try:
        return PdcParams(_as_float(opts, "mu1"), _as_float(opts, "mu2"),
                         _as_float(opts, "muk"), _as_float(opts, "phi"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _tau(opts) -> float:
    tau = _as_float(opts, "tau")
    if not 0.0 <= tau <= 1.0:
        raise UsageError("--tau must lie in [0, 1]")
    return tau


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    Path(out).write_text(text)


def cmd_gamma(opts) -> int:
    _emit(render(reports.gamma_summary(_params(opts), _tau(opts)), opts["format"] or "json"),
          opts["out"])
    return EXIT_OK


def cmd_thresholds(opts) -> int:
    p = _params(opts)
    _emit(render(reports.thresholds_summary(p.mu1, p.mu2), opts["format"] or "json"), opts["out"])
    return EXIT_OK


def cmd_scan(opts) -> int:
    mu1s, mu2s, muks = (parse_range(opts[k]) for k in ("mu1", "mu2", "muk"))
    for vals, name in ((mu1s, "mu1"), (mu2s, "mu2"), (muks, "muk")):
        if not vals or min(vals) < 0.0:
            raise UsageError(f"--{name} values must be non-negative")
    size = len(mu1s) * len(mu2s) * len(muks)
    cap = _as_int(opts, "max_points", 1)
    if size > cap:
        raise UsageError(f"grid has {size} points, above the cap of {cap}; raise --max-points")
    tau = _tau(opts)
    n_modes = _as_int(opts, "modes", 1)
    fmt = opts["format"] or "csv"
    rows = reports.scan_rows(mu1s, mu2s, muks, tau=tau, n_modes=n_modes)
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in rows:
            w.writerow([fmt_text(v) for v in row])
        text = buf.getvalue()
    else:
        text = dumps({"columns": list(CSV_HEADER),
                      "rows": [dict(zip(CSV_HEADER, row)) for row in rows]})
    _emit(text, opts["out"])
    return EXIT_OK


def cmd_simulate(opts) -> int:
    if opts["seed"] is None:
        raise UsageError("simulate requires --seed")
    seed = _as_int(opts, "seed", 0)
    trials = _as_int(opts, "trials", 2)
    n_modes = _as_int(opts, "modes", 1)
    p = _params(opts)
    t0 = time.perf_counter()
    summary, k, l = reports.simulate(p, _tau(opts), trials, seed, n_modes=n_modes,
                                     n_boot=_as_int(opts, "bootstrap", 2),
                                     workers=_as_int(opts, "workers", 1))
    log.info("simulate: %d trials in %.3f s", trials, time.perf_counter() - t0)
    if opts["events"]:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("k", "l"))
        w.writerows(reports.events_table(k, l))
        Path(opts["events"]).write_text(buf.getvalue())
    _emit(render(summary, opts["format"] or "json"), opts["out"])
    return EXIT_OK


def cmd_oracle(opts) -> int:
    cutoff = None if opts["cutoff"] is None else _as_int(opts, "cutoff", 1)
    t0 = time.perf_counter()
    summary = reports.oracle_summary(_params(opts), cutoff)
    log.info("oracle: %.3f s", time.perf_counter() - t0)
    _emit(render(summary, opts["format"] or "json"), opts["out"])
    return EXIT_OK if summary["passed"] else EXIT_NUMERIC


def cmd_multimode(opts) -> int:
    summary = reports.multimode_summary(_as_int(opts, "modes", 1), _params(opts), _tau(opts))
    _emit(render(summary, opts["format"] or "json"), opts["out"])
    return EXIT_OK


COMMANDS = {
    "gamma": cmd_gamma,
    "thresholds": cmd_thresholds,
    "scan": cmd_scan,
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
    "multimode": cmd_multimode,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mu1", help="mean photons of seed 1 (scan: start:stop:step or list)")
    common.add_argument("--mu2", help="mean photons of seed 2")
    common.add_argument("--muk", help="spontaneous PDC mean photons sinh(r)^2")
    common.add_argument("--phi", help="pump phase in radians")
    common.add_argument("--tau", help="transmission of each arm, in [0, 1]")
    common.add_argument("--modes", help="number of identical mode pairs")
    common.add_argument("--trials", help="number of Monte Carlo events")
    common.add_argument("--seed", help="random seed (required by simulate)")
    common.add_argument("--cutoff", help="per-mode Fock cutoff for the oracle")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--events", help="simulate: also write raw k,l events as CSV")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--bootstrap", help="bootstrap resamples for standard errors")
    common.add_argument("--workers", help="threads used for sampling")
    common.add_argument("--max-points", dest="max_points", help="scan grid size cap")
    common.add_argument("--config", help="key=value or JSON file; flags take precedence")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="seeded-pdc", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.replace("cmd_", ""))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        opts = resolve(args)
        if opts["format"] not in (None, "csv", "json"):
            raise UsageError("--format must be csv or json")
        return COMMANDS[args.command](opts)
    except UsageError as exc:
        print(f"seeded-pdc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UndefinedPointError as exc:
        print(f"seeded-pdc {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except NumericalFailure as exc:
        print(f"seeded-pdc {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"seeded-pdc {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
