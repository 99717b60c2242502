"""Command-line entry point: subcommands, CSV/JSON persistence and run manifests."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .bounds import global_bound, product_bound_delta_t, qubit_closed_form, union_bound_delta_t
from .errors import ConfigError, ResourceError
from .gt_irreps import DEFAULT_MAX_DIM, build_algebra_rep, irrep_residuals
from .moments import ExperimentConfig, SampleTable, run_empirical_experiment, run_model_experiment
from .sampling import RngStream, Setting, check_dims, haar_unitary
from .spectra import DensityKind, SpectralDensity, density_at
from .stats import conjecture_report
from .weights import Weight, enumerate_weights, essential_weights

log = logging.getLogger("rmtdesign")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

MANIFEST_SCHEMA = "rmtdesign.manifest/1"
MANIFEST_FIELDS = {
    "schema": str,
    "subcommand": str,
    "config": dict,
    "seed": (int, type(None)),
    "version": str,
    "started_at": str,
    "finished_at": str,
    "outputs": dict,
    "metadata": dict,
}


# --- tables ------------------------------------------------------------------------------------


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _csv_line(values: Sequence) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow([format_value(v) for v in values])
    return buf.getvalue()


class TableWriter:
    """Row-wise CSV writer that flushes every row.

    An OSError while writing removes the partial file; any other error leaves the rows
    written so far on disk.
    """

    def __init__(self, path: str, header: Sequence[str]):
        self.path = path
        self.width = len(header)
        self._fh = open(path, "w", encoding="utf-8", newline="")
        self._write(header)

    def _write(self, values):
        self._fh.write(_csv_line(values))
        self._fh.flush()

    def write_row(self, values: Sequence) -> None:
        if len(values) != self.width:
            raise ValueError(f"row has {len(values)} values, header has {self.width}")
        self._write(values)

    def close(self) -> str:
        self._fh.close()
        return file_digest(self.path)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if not self._fh.closed:
            self._fh.close()
        if exc_type is not None and issubclass(exc_type, OSError):
            try:
                os.remove(self.path)
            except OSError:
                pass
        return False


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_table(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Write a CSV (17 significant digits, LF newlines) and return its sha256 digest."""
    with TableWriter(path, header) as tw:
        for r in rows:
            tw.write_row(r)
        return tw.close()


def read_table(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    return rows[0], rows[1:]


def manifest_path(out: str) -> str:
    return out + ".manifest.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_manifest(out: str, subcommand: str, config: dict, seed, started: str, metadata: dict | None = None) -> dict:
    man = {
        "schema": MANIFEST_SCHEMA,
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "version": __version__,
        "started_at": started,
        "finished_at": _now(),
        "outputs": {os.path.basename(out): file_digest(out)},
        "metadata": metadata or {},
    }
    validate_manifest(man)
    with open(manifest_path(out), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(man, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return man


def validate_manifest(man: dict) -> None:
    if not isinstance(man, dict):
        raise ValueError("manifest must be an object")
    missing = [k for k in MANIFEST_FIELDS if k not in man]
    extra = [k for k in man if k not in MANIFEST_FIELDS]
    if missing or extra:
        raise ValueError(f"manifest fields: missing {missing}, unexpected {extra}")
    for k, typ in MANIFEST_FIELDS.items():
        if isinstance(man[k], bool) or not isinstance(man[k], typ):
            if not (k == "seed" and man[k] is None):
                raise ValueError(f"manifest field {k!r} has type {type(man[k]).__name__}")
    if man["schema"] != MANIFEST_SCHEMA:
        raise ValueError(f"unknown manifest schema {man['schema']!r}")
    for name, digest in man["outputs"].items():
        if not (isinstance(digest, str) and len(digest) == 64):
            raise ValueError(f"bad digest for {name}")


def read_manifest(out: str) -> dict | None:
    p = manifest_path(out)
    if not os.path.exists(p):
        return None
    with open(p, encoding="utf-8") as fh:
        man = json.load(fh)
    validate_manifest(man)
    return man


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    return ExperimentConfig.from_dict(data)


def sample_table_header(weights: Sequence[Weight]) -> list[str]:
    return ["sample_index"] + [w.label() for w in weights]


def read_sample_table(path: str) -> SampleTable:
    header, rows = read_table(path)
    if not header or header[0] != "sample_index":
        raise ValueError(f"{path}: not a sample table")
    weights = [Weight.parse(h) for h in header[1:]]
    data = np.array([[float(v) for v in r[1:]] for r in rows], dtype=float).reshape(len(rows), len(weights))
    man = read_manifest(path)
    meta = dict(man["metadata"]) if man else {}
    return SampleTable(weights=weights, rows=data, metadata=meta)


# --- argument helpers --------------------------------------------------------------------------


def parse_eps_grid(text: str) -> list[float]:
    """``a:b:step`` inclusive of b (up to rounding)."""
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:step, got {text!r}")
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError("need step > 0 and b >= a")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + i * step for i in range(n)]


def parse_point_grid(text: str) -> np.ndarray:
    """``a:b:n`` as n evenly spaced points."""
    try:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}")


def parse_weights(text: str) -> list[Weight]:
    """Semicolon-separated weights, e.g. ``(1,0,0,-1);(2,0,-1,-1)``."""
    try:
        return [Weight.parse(part) for part in text.split(";") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return v


def _pos_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _dim(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("d must be >= 2")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rmtdesign", description="Random-matrix model of random approximate t-designs.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    w = sub.add_parser("weights", help="enumerate highest weights")
    w.add_argument("--d", type=_dim, required=True)
    w.add_argument("--t", type=_pos_int, required=True)
    w.add_argument("--essential", action="store_true", help="one representative per conjugate pair")
    w.add_argument("--format", choices=("csv", "json"), default="csv")
    w.add_argument("--out")

    ic = sub.add_parser("irrep-check", help="residuals of the GT irreps")
    ic.add_argument("--d", type=_dim, required=True)
    ic.add_argument("--t", type=_pos_int, required=True)
    ic.add_argument("--trials", type=_pos_int, default=50)
    ic.add_argument("--tol", type=float, default=1e-8)
    ic.add_argument("--seed", type=_seed, default=0)
    ic.add_argument("--max-dim", type=_pos_int, default=DEFAULT_MAX_DIM)
    ic.add_argument("--out")

    se = sub.add_parser("sample-empirical", help="norms of moment blocks of random gate-sets")
    se.add_argument("--config", required=True)
    se.add_argument("--out", required=True)
    se.add_argument("--weights", type=parse_weights, help="override the essential weights, e.g. '(50,-50)'")
    se.add_argument("--workers", type=_pos_int)
    se.add_argument("--max-dim", type=_pos_int, default=DEFAULT_MAX_DIM)

    sm = sub.add_parser("sample-model", help="norms of the Gaussian/Ginibre block model")
    sm.add_argument("--d", type=_dim, required=True)
    sm.add_argument("--t", type=_pos_int, required=True)
    sm.add_argument("--setting", choices=("plain", "symmetric"), required=True)
    sm.add_argument("--samples", type=_pos_int, required=True)
    sm.add_argument("--seed", type=_seed, required=True)
    sm.add_argument("--out", required=True)
    sm.add_argument("--weights", type=parse_weights)
    sm.add_argument("--workers", type=_pos_int)
    sm.add_argument("--max-dim", type=_pos_int, default=DEFAULT_MAX_DIM)

    b = sub.add_parser("bounds", help="analytic tail bounds on an eps grid")
    b.add_argument("--d", type=_dim, required=True)
    b.add_argument("--t", type=_pos_int, required=True)
    b.add_argument("--setting", choices=("plain", "symmetric"), required=True)
    b.add_argument("--eps-grid", type=parse_eps_grid, required=True)
    b.add_argument("--out", required=True)

    s = sub.add_parser("spectra", help="Kesten-McKay and quarter-circle density tables")
    s.add_argument("--card", type=int, required=True)
    s.add_argument("--grid", type=parse_point_grid, required=True)
    s.add_argument("--out")

    c = sub.add_parser("compare", help="A <= B <= C ordering report")
    c.add_argument("--empirical", required=True)
    c.add_argument("--model", required=True)
    c.add_argument("--eps-grid", type=parse_eps_grid, required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--d", type=_dim, help="defaults to the value recorded in the model manifest")
    c.add_argument("--t", type=_pos_int)
    c.add_argument("--setting", choices=("plain", "symmetric"))
    return p


# --- subcommands -------------------------------------------------------------------------------


@dataclass
class _Output:
    """Destination for small tables: a file (with manifest) or stdout."""

    path: str | None

    def emit(self, header, rows) -> None:
        if self.path:
            write_table(self.path, header, rows)
        else:
            sys.stdout.write(_csv_line(header))
            for r in rows:
                sys.stdout.write(_csv_line(r))


def _config_echo(args: argparse.Namespace) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("verbose",):
            continue
        if isinstance(v, list) and v and isinstance(v[0], Weight):
            v = [w.label() for w in v]
        elif isinstance(v, np.ndarray):
            v = [float(x) for x in v]
        out[k] = v
    return out


def cmd_weights(args, started) -> int:
    ws = essential_weights(args.d, args.t) if args.essential else enumerate_weights(args.d, args.t)
    recs = [(w.label(), w.weight_class.value, w.dimension, w.l1) for w in ws]
    if args.format == "json":
        text = json.dumps(
            [{"entries": list(w.entries), "class": c, "dimension": dim, "l1": l1} for w, (_, c, dim, l1) in zip(ws, recs)],
            indent=2,
        ) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _Output(args.out).emit(["entries", "class", "dimension", "l1"], recs)
    if args.out:
        write_manifest(args.out, "weights", _config_echo(args), None, started)
    return EXIT_OK


def cmd_irrep_check(args, started) -> int:
    ws = essential_weights(args.d, args.t)
    check_dims(ws, args.max_dim)
    root = RngStream(args.seed)
    rows = []
    failed = False
    for j, w in enumerate(ws):
        gen = root.generator(j)
        pairs = [(haar_unitary(args.d, gen), haar_unitary(args.d, gen)) for _ in range(args.trials)]
        r = irrep_residuals(build_algebra_rep(w, max_dim=args.max_dim), pairs)
        ok = r.worst <= args.tol
        failed |= not ok
        rows.append((w.label(), r.dim, r.homomorphism, r.unitarity, r.phase, r.inverse, r.character, ok))
        log.info("%s dim=%d worst=%.3g", w.label(), r.dim, r.worst)
    header = ["entries", "dimension", "homomorphism", "unitarity", "phase", "inverse", "character", "ok"]
    _Output(args.out).emit(header, rows)
    if args.out:
        write_manifest(args.out, "irrep-check", _config_echo(args), args.seed, started)
    if failed:
        print(f"irrep-check: residuals above tol={args.tol}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _run_sampling(args, started, subcommand, weights, runner, seed, config) -> int:
    check_dims(weights, args.max_dim)
    header = sample_table_header(weights)
    with TableWriter(args.out, header) as tw:
        table = runner(on_row=lambda i, row: tw.write_row([i] + list(row)))
        tw.close()
    write_manifest(args.out, subcommand, config, seed, started, metadata=table.metadata)
    return EXIT_OK


def cmd_sample_empirical(args, started) -> int:
    cfg = load_config(args.config)
    ws = args.weights or essential_weights(cfg.d, cfg.t)
    if any(w.d != cfg.d for w in ws):
        raise ConfigError("override weights do not match d", keys=["d"])
    echo = {"experiment": cfg.to_dict(), "weights": [w.label() for w in ws], "max_dim": args.max_dim}

    def runner(on_row):
        return run_empirical_experiment(cfg, weights=ws, workers=args.workers, max_dim=args.max_dim, on_row=on_row)

    return _run_sampling(args, started, "sample-empirical", ws, runner, cfg.seed, echo)


def cmd_sample_model(args, started) -> int:
    ws = args.weights or essential_weights(args.d, args.t)
    if any(w.d != args.d for w in ws):
        raise ConfigError("override weights do not match d", keys=["d"])
    echo = _config_echo(args)
    echo.pop("workers", None)
    echo["weights"] = [w.label() for w in ws]

    def runner(on_row):
        return run_model_experiment(
            args.d, args.t, args.setting, args.samples, args.seed,
            weights=ws, workers=args.workers, max_dim=args.max_dim, on_row=on_row,
        )

    return _run_sampling(args, started, "sample-model", ws, runner, args.seed, echo)


def cmd_bounds(args, started) -> int:
    qubit = args.d == 2
    header = ["eps", "union", "product"] + (["qubit_closed"] if qubit else []) + ["global", "global_valid"]
    rows = []
    for eps in args.eps_grid:
        g = global_bound(args.d, eps, args.setting)
        row = [eps, union_bound_delta_t(args.d, args.t, eps, args.setting), product_bound_delta_t(args.d, args.t, eps, args.setting)]
        if qubit:
            row.append(qubit_closed_form(args.t, eps, args.setting) if eps > 0 else 1.0)
        rows.append(row + [g.value, g.valid])
    write_table(args.out, header, rows)
    write_manifest(args.out, "bounds", _config_echo(args), None, started)
    return EXIT_OK


def cmd_spectra(args, started) -> int:
    kinds = list(DensityKind)
    dens = [SpectralDensity(k, args.card) for k in kinds]
    rows = [[float(x)] + [density_at(sd, float(x)) for sd in dens] for x in args.grid]
    _Output(args.out).emit(["x"] + [k.value for k in kinds], rows)
    if args.out:
        write_manifest(args.out, "spectra", _config_echo(args), None, started)
    return EXIT_OK


def _setting_of(meta: dict) -> str | None:
    if "setting" in meta:
        return meta["setting"]
    if "is_symmetric" in meta:
        return "symmetric" if meta["is_symmetric"] else "plain"
    return None


def cmd_compare(args, started) -> int:
    emp = read_sample_table(args.empirical)
    mod = read_sample_table(args.model)
    meta = {**emp.metadata, **mod.metadata}
    d = args.d or meta.get("d")
    t = args.t or meta.get("t")
    setting = args.setting or _setting_of(mod.metadata) or _setting_of(emp.metadata)
    if d is None or t is None or setting is None:
        raise ConfigError("d, t and setting are needed (pass them or keep the manifests)", keys=["d", "t", "setting"])
    report = conjecture_report(emp, mod, int(d), int(t), Setting.coerce(setting), args.eps_grid)
    rows = [(r.label, r.eps, r.A, r.A_se, r.B, r.B_se, r.C, r.ok) for r in report]
    write_table(args.out, ["lambda", "eps", "A", "A_se", "B", "B_se", "C", "ok_flag"], rows)
    bad = sum(not r.ok for r in report)
    config = _config_echo(args)
    config.update(d=int(d), t=int(t), setting=str(setting))
    write_manifest(args.out, "compare", config, None, started, metadata={"violations": bad, "scaling": emp.metadata.get("scaling")})
    log.info("%d violations in %d cells", bad, len(report))
    return EXIT_OK


COMMANDS = {
    "weights": cmd_weights,
    "irrep-check": cmd_irrep_check,
    "sample-empirical": cmd_sample_empirical,
    "sample-model": cmd_sample_model,
    "bounds": cmd_bounds,
    "spectra": cmd_spectra,
    "compare": cmd_compare,
}


def dispatch(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    started = _now()
    try:
        return COMMANDS[args.command](args, started)
    except (ConfigError, ValueError) as e:
        print(f"rmtdesign {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as e:
        print(f"rmtdesign {args.command}: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as e:
        print(f"rmtdesign {args.command}: I/O error: {e}", file=sys.stderr)
        return EXIT_RESOURCE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
