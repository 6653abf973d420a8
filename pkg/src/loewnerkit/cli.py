"""Command-line interface: ``loewnerkit {fit,sweep,noise,eval,poles,synth}``.

Every command reads and writes files. stdout gets a one-line summary (with a
count of any numerical warnings); on failure stderr gets a JSON object
``{"error", "message", "exit_code"}``.
Exit codes: 0 success, 1 numerical failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .barycentric import freqresp
from .dataset import (FrequencyDataset, NoiseSpec, add_noise, generate_synthetic, load_dataset,
                      save_dataset)
from .errors import LoewnerKitError, NumericalError
from .loewner import DEFAULT_TAU
from .metrics import fit_report, pole_report
from .models import load_model, save_model
from .pipeline import METHODS, fit, sweep

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- parsing helpers

def parse_grid(text):
    """Frequencies from ``start:step:stop`` (stop included) or a comma list."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            try:
                start, step, stop = (float(x) for x in part.split(":"))
            except ValueError:
                raise UsageError(f"bad range {part!r}; expected start:step:stop") from None
            if step == 0 or (stop - start) / step < 0:
                raise UsageError(f"range {part!r} is empty or has zero step")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            out.extend(start + step * np.arange(n))
        else:
            try:
                out.append(float(part))
            except ValueError:
                raise UsageError(f"bad frequency {part!r}") from None
    if not out:
        raise UsageError("empty frequency list")
    return np.array(out, dtype=float)


def parse_complex_list(text):
    """Comma-separated complex literals such as ``-1+0.77j,-2``."""
    out = []
    for part in text.split(","):
        part = part.strip().replace(" ", "")
        if not part:
            continue
        try:
            out.append(complex(part))
        except ValueError:
            raise UsageError(f"bad complex literal {part!r}; use a+bj") from None
    if not out:
        raise UsageError("empty complex list")
    return np.array(out, dtype=complex)


def _scale(hz):
    return 2 * math.pi if hz else 1.0


def _load(args):
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"dataset not found: {path}")
    return load_dataset(path, format=args.format, hz=args.hz)


def _fit_kwargs(args):
    kw = {"select": args.select, "mode": args.mode, "stable_only": not args.allow_unstable,
          "real": not args.complex, "node_values": args.node_values}
    s = _scale(args.hz)
    if args.poles:
        kw["poles"] = parse_complex_list(args.poles) * s
    if args.nodes:
        kw["nodes"] = parse_complex_list(args.nodes) * s
    if args.peaks:
        kw["peaks"] = list(parse_grid(args.peaks) * s)
    return kw


# ---------------------------------------------------------------- commands

def cmd_fit(args):
    if args.order is not None and args.tau is not None:
        raise UsageError("give either --order or --tau, not both")
    if args.method == "lfpp" and not (args.poles and args.nodes):
        raise UsageError("lfpp needs --poles and --nodes")
    d = _load(args)
    kw = _fit_kwargs(args)
    tau = args.tau
    if tau is None and args.order is None and args.method in ("loewner-svd", "ls-loewner"):
        tau = DEFAULT_TAU
    model = fit(d, args.method, order=args.order, tau=tau, aaa_tol=args.aaa_tol, **kw)
    save_model(model, args.output)
    report = fit_report(d, model, args.method, with_dominance=args.dominance)
    report_path = args.report or str(Path(args.output).with_suffix("")) + ".report.json"
    report.save(report_path)
    if args.errors:
        Path(args.errors).write_text(report.to_csv())
    return (f"{args.method}: order {model.order}, eps {report.epsilon:.6e}, "
            f"stable {report.stable if report.poles else 'n/a'}")


def cmd_sweep(args):
    d = _load(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise UsageError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
    orders = parse_grid(args.orders)
    if np.any(orders != np.round(orders)) or np.any(orders < 1):
        raise UsageError("orders must be positive integers")
    kw = _fit_kwargs(args)
    rows = sweep(d, methods, [int(r) for r in orders], **kw)
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "r", "eps"])
        for method, r, eps in rows:
            w.writerow([method, r, f"{eps:.17g}"])
    n_fail = sum(math.isnan(e) for _, _, e in rows)
    return f"sweep: {len(rows)} rows, {n_fail} failed"


def cmd_noise(args):
    d = _load(args)
    noisy = add_noise(d, NoiseSpec(args.sigma2, seed=args.seed))
    save_dataset(noisy, args.output)
    return f"noise: {len(noisy)} samples, sigma2 {args.sigma2}, seed {args.seed}"


def cmd_eval(args):
    if not Path(args.model).is_file():
        raise UsageError(f"model not found: {args.model}")
    model = load_model(args.model)
    if (args.grid is None) == (args.input is None):
        raise UsageError("give exactly one of --grid and --input")
    if args.grid is not None:
        points = 1j * parse_grid(args.grid) * _scale(args.hz)
    else:
        points = _load(args).points
    out = FrequencyDataset(points, freqresp(model, points))
    save_dataset(out, args.output)
    return f"eval: {len(points)} points"


def cmd_poles(args):
    if not Path(args.model).is_file():
        raise UsageError(f"model not found: {args.model}")
    model = load_model(args.model)
    poles, n_inf = pole_report(model, with_dominance=args.dominance)
    doc = {"poles": [p.to_dict() for p in poles], "infinite_poles": n_inf,
           "stable": all(p.stable for p in poles)}
    out = args.output or str(Path(args.model).with_suffix("")) + ".poles.json"
    Path(out).write_text(json.dumps(doc))
    n_unstable = sum(not p.stable for p in poles)
    return f"poles: {len(poles)} finite, {n_unstable} unstable, {n_inf} infinite"


def cmd_synth(args):
    grid = parse_grid(args.grid) * _scale(args.hz)
    d, model = generate_synthetic(args.order, args.m, args.p, grid, args.seed)
    if args.sigma2:
        d = add_noise(d, NoiseSpec(args.sigma2, seed=args.seed))
    save_dataset(d, args.output)
    if args.model_out:
        save_model(model, args.model_out)
    return f"synth: order {args.order}, {args.p}x{args.m}, {len(d)} samples"


# ---------------------------------------------------------------- parser

def _data_args(p, required=True):
    p.add_argument("--input", "-i", required=required, help="dataset file (.csv or .json)")
    p.add_argument("--format", choices=["csv", "json"], help="override format detection")
    p.add_argument("--hz", action="store_true",
                   help="frequencies (grid, peaks, poles, nodes, data) are in Hz")


def _method_args(p):
    p.add_argument("--select", default="merged_alternate",
                   choices=["left_only", "right_only", "merged_alternate"])
    p.add_argument("--poles", help="comma-separated complex poles, e.g. -0.1+2j,-1")
    p.add_argument("--nodes", help="comma-separated complex interpolation nodes")
    p.add_argument("--peaks", help="peak frequencies for lfapp --mode modified")
    p.add_argument("--mode", default="auto", choices=["auto", "modified"])
    p.add_argument("--node-values", default="model", choices=["model", "data"])
    p.add_argument("--allow-unstable", action="store_true",
                   help="let lfapp pick unstable eigenvalues")
    p.add_argument("--complex", action="store_true", help="skip conjugate closure and realification")


def build_parser():
    ap = _Parser(prog="loewnerkit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a surrogate and write model + report")
    _data_args(p)
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--order", "-r", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--aaa-tol", type=float, default=1e-13)
    p.add_argument("--output", "-o", required=True, help="model JSON")
    p.add_argument("--report", help="report JSON (default: <output>.report.json)")
    p.add_argument("--errors", help="optional CSV omega,abs_err,rel_err")
    p.add_argument("--dominance", action="store_true")
    _method_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep", help="eps(r) per method and order as CSV")
    _data_args(p)
    p.add_argument("--methods", default="loewner-svd")
    p.add_argument("--orders", required=True, help="e.g. 6:2:60")
    p.add_argument("--output", "-o", required=True)
    _method_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("noise", help="add multiplicative complex Gaussian noise")
    _data_args(p)
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("eval", help="evaluate a model on a grid")
    p.add_argument("model")
    _data_args(p, required=False)
    p.add_argument("--grid", help="frequencies, e.g. 1:0.1:100")
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("poles", help="list model poles as JSON")
    p.add_argument("model")
    p.add_argument("--dominance", action="store_true")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_poles)

    p = sub.add_parser("synth", help="generate a random stable test system")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--grid", required=True)
    p.add_argument("--hz", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma2", type=float, default=0.0)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--model-out")
    p.set_defaults(func=cmd_synth)
    return ap


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            summary = args.func(args)
    except UsageError as exc:
        return _fail("UsageError", str(exc), EXIT_USAGE)
    except (NumericalError, np.linalg.LinAlgError, ArithmeticError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_NUMERICAL)
    except (LoewnerKitError, ValueError, OSError, KeyError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_USAGE)
    if caught:
        summary += f" ({len(caught)} warning{'s' if len(caught) > 1 else ''})"
    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
