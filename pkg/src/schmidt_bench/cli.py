"""Command-line front end: ``schmidt-bench <subcommand> [flags]``.

Results are printed as JSON (or written to ``--out``); figure data is CSV
with 12 significant digits. Exit codes: 0 success, 2 invalid input, 3
enumeration or tensor budget exceeded, 1 any other package error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import bounds, embezzle, iid, losr, lu
from .errors import SchmidtBenchError, SizeError, ValidationError
from .grid import grid_units
from .simplex import parse_vector

DEFAULT_STEP = 0.005
DEFAULT_TOL = 1e-9
DEFAULT_RESTARTS = 16
DEFAULT_EPS = 0.01
NORM_TOL = 1e-9


class UsageError(Exception):
    """Invalid command line; carries the one-line diagnostic."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_dist(flag: str, text: str, notices: list[str], sort: bool = True) -> np.ndarray:
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    try:
        w = parse_vector(text)
    except ValidationError as exc:
        raise UsageError(f"{flag}: {exc}") from None
    total = float(w.sum())
    if abs(total - 1.0) > NORM_TOL:
        raise UsageError(f"{flag}: weights sum to {total:.12g}, not 1")
    w = w / total
    if sort and np.any(np.diff(w) > 0):
        notices.append(f"{flag} was not in nonincreasing order; sorted")
        w = np.sort(w)[::-1]
    return w


def _require(args, *flags):
    for f in flags:
        if getattr(args, f.lstrip("-").replace("-", "_")) is None:
            raise UsageError(f"{f} is required for {args.command}")


def _check_step(step: float) -> None:
    if not (0 < step <= 0.25):
        raise UsageError(f"--step must lie in (0, 0.25], got {step}")
    try:
        grid_units(step)
    except ValidationError:
        raise UsageError(f"--step {step} does not divide 1") from None


def _check_int(flag: str, value, minimum: int) -> None:
    if value is None or value < minimum:
        raise UsageError(f"{flag} must be an integer >= {minimum}, got {value}")


def _check_common(args) -> None:
    if getattr(args, "tol", None) is not None and not args.tol >= 0:
        raise UsageError(f"--tol must be nonnegative, got {args.tol}")
    if getattr(args, "restarts", None) is not None and args.restarts < 0:
        raise UsageError(f"--restarts must be nonnegative, got {args.restarts}")
    if getattr(args, "threads", None) is not None and args.threads < 1:
        raise UsageError(f"--threads must be >= 1, got {args.threads}")
    if getattr(args, "eps", None) is not None and not (0 < args.eps < 1):
        raise UsageError(f"--eps must lie in (0, 1), got {args.eps}")


def _bernoulli_flag(flag: str, value: float, lo: float = 0.0) -> float:
    if value is None or not (lo <= value <= 1.0):
        raise UsageError(f"{flag} must lie in [{lo}, 1], got {value}")
    return value


def _two_level(args, notices):
    """(target, seed) from --p/--q or --target/--seed."""
    if args.p is not None or args.q is not None:
        p = _bernoulli_flag("--p", args.p)
        q = _bernoulli_flag("--q", args.q)
        return np.array([p, 1 - p]), np.array([q, 1 - q])
    _require(args, "--target", "--seed")
    return (_read_dist("--target", args.target, notices),
            _read_dist("--seed", args.seed, notices))


def _floats(x):
    return [float(v) for v in np.asarray(x, dtype=float)]


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _parse_pairs(text: str):
    pairs = []
    for i, item in enumerate(text.split(",")):
        try:
            p, q = (float(v) for v in item.split(":"))
        except ValueError:
            raise UsageError(f"--pairs: entry {i} is not of the form p:q: {item!r}") from None
        for v in (p, q):
            if not (0 <= v <= 1):
                raise UsageError(f"--pairs: entry {i} has a value outside [0, 1]: {item!r}")
        pairs.append((p, q))
    return pairs


def _parse_dims(text: str):
    try:
        if "-" in text:
            lo, hi = (int(v) for v in text.split("-"))
            dims = list(range(lo, hi + 1))
        else:
            dims = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--dims must be a range a-b or a comma list, got {text!r}") from None
    if not dims or min(dims) < 1:
        raise UsageError(f"--dims must list positive integers, got {text!r}")
    return dims


def cmd_fidelity_lu(args, notices):
    _require(args, "--target", "--seed")
    t = _read_dist("--target", args.target, notices)
    s = _read_dist("--seed", args.seed, notices)
    res = lu.f_lu(t, s)
    return {"inputs": {"target": _floats(t), "seed": _floats(s)}, "method": "lu",
            "result": {"fidelity": res.fidelity,
                       "permutation_witness": {str(k): v for k, v in
                                               res.permutation_witness.items()}}}


def cmd_fidelity_losr(args, notices):
    _require(args, "--target", "--seed")
    _check_step(args.step)
    t = _read_dist("--target", args.target, notices)
    s = _read_dist("--seed", args.seed, notices)
    res = losr.f_losr(t, s, step=args.step, restarts=args.restarts, tol=args.tol,
                      threads=args.threads)
    return {"inputs": {"target": _floats(t), "seed": _floats(s)}, "method": res.method,
            "result": {"fidelity": res.fidelity_lower_bound, "ancilla": res.ancilla.tolist(),
                       "method": res.method}}


def cmd_bounds(args, notices):
    _require(args, "--target", "--seed")
    _check_step(args.step)
    t = _read_dist("--target", args.target, notices)
    s = _read_dist("--seed", args.seed, notices)
    b = bounds.compute_bounds(t, s, eps=args.eps, step=args.step, restarts=args.restarts,
                              tol=args.tol, threads=args.threads)
    return {"inputs": {"target": _floats(t), "seed": _floats(s), "eps": args.eps},
            "method": "bounds", "result": b.to_dict()}


def cmd_iid_dilute(args, notices):
    _require(args, "--target")
    _check_int("--d", args.d, 2)
    _check_int("--n", args.n, 1)
    t = _read_dist("--target", args.target, notices)
    lo_val, anc = iid.dilution_lo(t, args.d, args.n, restarts=args.restarts)
    return {"inputs": {"target": _floats(t), "d": args.d, "n": args.n}, "method": "dilution",
            "result": {"f_lu": iid.dilution_lu(t, args.d, args.n), "f_lo": lo_val,
                       "ancilla": anc.tolist()}}


def cmd_iid_distill(args, notices):
    _require(args, "--seed")
    _check_int("--d", args.d, 2)
    _check_int("--m", args.m, 1)
    _check_int("--n", args.n, 1)
    s = _read_dist("--seed", args.seed, notices)
    lo_val, anc = iid.distillation_lo(s, args.d, args.m, args.n)
    return {"inputs": {"seed": _floats(s), "d": args.d, "m": args.m, "n": args.n},
            "method": "distillation",
            "result": {"f_lu": iid.distillation_lu(s, args.d, args.m, args.n), "f_lo": lo_val,
                       "ancilla": anc.tolist()}}


def cmd_embezzle_harmonic(args, notices):
    _check_int("--n", args.n, 1)
    h = embezzle.harmonic_dist(args.n)
    return {"inputs": {"n": args.n}, "method": "harmonic",
            "result": {"harmonic_number": h.harmonic_number, "weights": _floats(h.weights)}}


def cmd_embezzle_classical(args, notices):
    _require(args, "--target")
    _check_int("--n", args.n, 1)
    t = _read_dist("--target", args.target, notices)
    f = embezzle.randomness_embezzle_fidelity(t, args.n)
    m = int(np.count_nonzero(t))
    log_bound = 1 - math.log(m) / math.log(args.n) if args.n > 1 else None
    return {"inputs": {"target": _floats(t), "n": args.n}, "method": "harmonic",
            "result": {"fidelity": f, "log_bound": log_bound}}


def cmd_embezzle_search(args, notices):
    t, s = _two_level(args, notices)
    inputs = {"target": _floats(t), "seed": _floats(s)}
    if args.catalyst is not None:
        r = _read_dist("--catalyst", args.catalyst, notices)
        inputs["catalyst"] = _floats(r)
        return {"inputs": inputs, "method": "objective",
                "result": {"fidelity": embezzle.embezzler_objective(t, s, r)}}
    _check_int("--dim", args.dim, 1)
    _check_step(args.step)
    inputs["dim"] = args.dim
    if args.losr:
        res = embezzle.embezzler_search_losr(t, s, args.dim, args.step, tol=args.tol,
                                             threads=args.threads)
    else:
        res = embezzle.embezzler_search_lu(t, s, args.dim, args.step, threads=args.threads)
    out = {"fidelity": res.fidelity, "catalyst": res.catalyst.tolist(),
           "heuristic_capped": res.heuristic_capped,
           "vdh_order": embezzle.vdh_order_for_fidelity(res.fidelity)
           if res.fidelity < 1 else None}
    if res.ancilla is not None:
        out["ancilla"] = res.ancilla.tolist()
    return {"inputs": inputs, "method": "losr" if args.losr else "lu", "result": out}


def cmd_fig4(args, notices):
    p = _bernoulli_flag("--p", args.p)
    q = _bernoulli_flag("--q", args.q)
    _check_int("--n", args.n, 1)
    rows = lu.lu_decay_curve(p, q, args.n)
    lines = ["n,f_plain,f_lu"] + [f"{n},{_fmt(a)},{_fmt(b)}" for n, a, b in rows]
    return {"inputs": {"p": p, "q": q, "n": args.n}, "method": "lu_decay"}, lines


def cmd_fig5(args, notices):
    _check_step(args.step)
    pairs = _parse_pairs(args.pairs)
    dims = _parse_dims(args.dims)
    rows = embezzle.fig5_sweep(pairs, dims, args.step, args.threads)
    lines = ["pair,dim,fidelity,vdh_order"]
    for r in rows:
        lines.append(f"{r['pair']},{r['dim']},{_fmt(r['fidelity'])},{_fmt(r['vdh_order'])}")
    return {"inputs": {"pairs": args.pairs, "dims": dims}, "method": "grid"}, lines


def cmd_exact_check(args, notices):
    _require(args, "--target", "--seed")
    t = _read_dist("--target", args.target, notices)
    s = _read_dist("--seed", args.seed, notices)
    zeta = losr.exact_convertible(t, s, tol=args.tol)
    return {"inputs": {"target": _floats(t), "seed": _floats(s)}, "method": "factorization",
            "result": {"convertible": zeta is not None,
                       "zeta": None if zeta is None else zeta.tolist()}}


COMMANDS = {
    "fidelity-lu": cmd_fidelity_lu,
    "fidelity-losr": cmd_fidelity_losr,
    "bounds": cmd_bounds,
    "iid-dilute": cmd_iid_dilute,
    "iid-distill": cmd_iid_distill,
    "embezzle-harmonic": cmd_embezzle_harmonic,
    "embezzle-search": cmd_embezzle_search,
    "embezzle-classical": cmd_embezzle_classical,
    "fig4": cmd_fig4,
    "fig5": cmd_fig5,
    "exact-check": cmd_exact_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schmidt-bench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--target")
        sp.add_argument("--seed")
        sp.add_argument("--catalyst")
        sp.add_argument("--p", type=float)
        sp.add_argument("--q", type=float)
        sp.add_argument("--step", type=float, default=DEFAULT_STEP)
        sp.add_argument("--dim", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--d", type=int)
        sp.add_argument("--eps", type=float, default=DEFAULT_EPS)
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
        sp.add_argument("--threads", type=int)
        sp.add_argument("--out")
        sp.add_argument("--losr", action="store_true", help="embezzle-search: LO catalyst search")
        sp.add_argument("--pairs", default="0.5:0.55,0.5:0.6,0.5:0.7,0.6:0.65,0.6:0.7,0.6:0.8")
        sp.add_argument("--dims", default="1-8")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    """Execute one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    notices: list[str] = []
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        _check_common(args)
        start = time.perf_counter()
        out = COMMANDS[args.command](args, notices)
        elapsed = time.perf_counter() - start
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except SizeError as exc:
        print(f"error: budget exceeded: {exc}", file=stderr)
        return 3
    except SchmidtBenchError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    for note in notices:
        print(f"notice: {note}", file=stderr)
    csv_lines = None
    if isinstance(out, tuple):
        out, csv_lines = out
    meta = {"command": args.command, **out, "step": args.step, "tol": args.tol,
            "restarts": args.restarts, "threads": args.threads, "wall_time_s": elapsed}
    if notices:
        meta["notices"] = notices
    if csv_lines is not None:
        text = "\n".join(csv_lines) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
            meta["out"] = args.out
            print(json.dumps(meta, indent=2), file=stdout)
        else:
            stdout.write(text)
        return 0
    payload = json.dumps(meta, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    print(payload, file=stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
