"""Command-line interface emitting CSV/JSON data files.

Subcommands
-----------
state         single-configuration report (coefficients, variances, probabilities)
scan          min quadrature variance over an (|alpha|^2, R) grid
optimize      best squeezing over a box for one (n, m)
table1        squeezing optima for n = 1..4, m = 0..4
table2        optimal Fock-superposition squeezing vs the m = 1 heralded states
table3        success probability and Wigner negativity of the benchmark states
wigner        Wigner function samples on a phase-space grid
hsd-scan      Hilbert-Schmidt non-Gaussianity over an (|alpha|^2, R) grid
fidelity-map  ideal/realized fidelity over an (eta_d, eta_s) grid

Coherent amplitudes are entered as |alpha|^2 (real, phase 0).  CSV output
is UTF-8 with a header row and LF line endings; JSON output is one object
with a ``meta`` header and row-major ``data``.  Floats carry 12
significant digits and files are byte-identical across re-runs (timing
goes to stderr, never into the data).  Exit codes: 0 success, 2 usage
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__, dq, fock, imperfections, nongauss, squeezing
from .errors import DQSimError

TOLERANCES = {
    "coefficient_cross_check_rel": 1e-10,
    "oracle_overlap": 1e-8,
    "success_probability": 1e-8,
    "moments_vs_matrix": 1e-9,
    "optimizer_variance": 1e-6,
    "wigner_pointwise": 1e-7,
    "wigner_normalization": 1e-3,
    "wigner_negativity_quadrature": 1e-3,
}

_TABLE3_CONFIGS = [
    (1, 3.05, 0.6000),
    (2, 5.45, 0.8175),
    (3, 6.00, 0.7650),
    (4, 6.65, 0.7275),
]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def _round12(obj):
    if isinstance(obj, float):
        return float(format(obj, ".12g"))
    if isinstance(obj, (np.floating,)):
        return float(format(float(obj), ".12g"))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_round12(v) for v in obj.tolist()]
    return obj


def _emit(args, header: list[str], rows: list[tuple], meta: dict) -> None:
    if args.format == "csv":
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        obj = {
            "meta": {
                "tool": "dqsim",
                "version": __version__,
                "tolerances": TOLERANCES,
                **meta,
            },
            "columns": header,
            "data": [_round12(list(row)) for row in rows],
        }
        text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_range(spec: str, name: str):
    try:
        lo, hi, num = spec.split(":")
        lo, hi, num = float(lo), float(hi), int(num)
        if num < 2 or hi <= lo:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad {name} range '{spec}', expected LO:HI:POINTS")
    return np.linspace(lo, hi, num)


def _parse_grid2(spec: str):
    parts = spec.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("grid must be 'A0:A1:NA,R0:R1:NR'")
    return _parse_range(parts[0], "first"), _parse_range(parts[1], "second")


def _config(args) -> dq.CMConfig:
    return dq.CMConfig(args.n, args.m, complex(math.sqrt(args.alpha_sq)), args.R)


def _truncation(args, cfg: dq.CMConfig) -> fock.Truncation:
    auto = fock.Truncation.auto(cfg.alpha, cfg.n, cfg.m)
    if args.dim is None:
        return auto
    if args.dim < auto.dim:
        print(
            f"warning: --dim {args.dim} below heuristic {auto.dim}; results may lose tail mass",
            file=sys.stderr,
        )
    return fock.Truncation(args.dim)


# ---------------------------------------------------------------------------
# command implementations


def _cmd_state(args):
    cfg = _config(args)
    state, prob = dq.build_dq(cfg)
    rep = squeezing.quadratures(state)
    kind = dq.classify(cfg.n, cfg.m)
    rows = [
        ("n", cfg.n),
        ("m", cfg.m),
        ("alpha_sq", args.alpha_sq),
        ("R", cfg.R),
        ("chi", dq.chi(cfg)),
        ("class", kind.label),
        ("displacement_re", state.displacement.real),
        ("displacement_im", state.displacement.imag),
        ("var_x", rep.var_x),
        ("var_p", rep.var_p),
        ("min_var", rep.min_var),
        ("mean_x", rep.mean_x),
        ("mean_p", rep.mean_p),
        ("success_prob", prob),
    ]
    for q, c in enumerate(state.coeffs):
        rows.append((f"coeff_{q}_re", c.real))
        rows.append((f"coeff_{q}_im", c.imag))
    if args.eta_d is not None or args.eta_s is not None:
        imp = imperfections.ImperfectionParams(
            args.eta_d if args.eta_d is not None else 1.0,
            args.eta_s if args.eta_s is not None else 1.0,
        )
        t = _truncation(args, cfg)
        _, prob_imp = imperfections.realized_state(cfg, imp, t)
        rows.append(("success_prob_realized", prob_imp))
        rows.append(("fidelity_realized", imperfections.realized_fidelity(cfg, imp, t)))
    return ["field", "value"], rows, {"command": "state"}


def _cmd_scan(args):
    a_vals, r_vals = _parse_grid2(args.grid)
    V = squeezing.variance_x_map(args.n, args.m, a_vals[:, None], r_vals[None, :])
    rows = []
    for i, a2 in enumerate(a_vals):
        for j, r in enumerate(r_vals):
            rows.append((float(a2), float(r), float(V[i, j])))
    return ["alpha_sq", "R", "value"], rows, {"command": "scan", "n": args.n, "m": args.m}


def _cmd_optimize(args):
    rec = squeezing.optimize_cm_squeezing(args.n, args.m)
    rows = [(rec.n, rec.m, rec.min_var, rec.alpha_sq, rec.R, rec.boundary_hit)]
    return (
        ["n", "m", "min_var", "alpha_sq", "R", "boundary_hit"],
        rows,
        {"command": "optimize"},
    )


def _cmd_table1(args):
    records = squeezing.table1()
    rows = [
        (r.n, r.m, r.min_var, r.alpha_sq, r.R, r.boundary_hit) for r in records
    ]
    return (
        ["n", "m", "min_var", "alpha_sq", "R", "boundary_hit"],
        rows,
        {"command": "table1"},
    )


def _cmd_table2(args):
    rows = [
        (r.n, r.dq_min_var, r.fock_min_var, r.difference) for r in squeezing.table2()
    ]
    return (
        ["n", "dq_min_var", "fock_min_var", "difference"],
        rows,
        {"command": "table2"},
    )


def _cmd_table3(args):
    eta_d = args.eta_d if args.eta_d is not None else 0.9
    eta_s = args.eta_s if args.eta_s is not None else 0.9
    imp = imperfections.ImperfectionParams(eta_d, eta_s)
    rows = []
    for n, a2, R in _TABLE3_CONFIGS:
        cfg = dq.CMConfig(n, 1, complex(math.sqrt(a2)), R)
        state, prob_ideal = dq.build_dq(cfg)
        _, prob = imperfections.realized_state(cfg, imp, _truncation(args, cfg))
        wn = nongauss.wigner_negativity(state, nongauss.default_grid(state, args.points))
        rows.append((n, a2, R, prob, wn, prob_ideal))
    return (
        ["n", "alpha_sq", "R", "success_prob", "wigner_negativity", "success_prob_ideal"],
        rows,
        {"command": "table3", "eta_d": eta_d, "eta_s": eta_s},
    )


def _cmd_wigner(args):
    cfg = _config(args)
    state, _ = dq.build_dq(cfg)
    if args.grid:
        try:
            half_s, pts_s = args.grid.split(":")
            half, pts = float(half_s), int(pts_s)
        except ValueError:
            raise argparse.ArgumentTypeError("wigner grid must be 'HALFWIDTH:POINTS'")
        grid = nongauss.PhaseGrid.centered(state.displacement, half, pts)
    else:
        grid = nongauss.default_grid(state, args.points)
    W = nongauss.wigner_closed(state, grid.mesh())
    rows = []
    for i, x in enumerate(grid.xs):
        for j, p in enumerate(grid.ps):
            rows.append((float(x), float(p), float(W[i, j])))
    return ["re_beta", "im_beta", "value"], rows, {"command": "wigner"}


def _cmd_hsd_scan(args):
    a_vals, r_vals = _parse_grid2(args.grid)
    grid = nongauss.hsd_scan(args.n, args.m, a_vals, r_vals)
    rows = []
    for i, a2 in enumerate(a_vals):
        for j, r in enumerate(r_vals):
            rows.append((float(a2), float(r), float(grid[i, j])))
    return ["alpha_sq", "R", "value"], rows, {"command": "hsd-scan", "n": args.n, "m": args.m}


def _cmd_fidelity_map(args):
    cfg = _config(args)
    d_vals, s_vals = _parse_grid2(args.grid)
    t = _truncation(args, cfg)
    rows = imperfections.fidelity_heatmap(cfg, d_vals, s_vals, t)
    return (
        ["eta_d", "eta_s", "fidelity"],
        rows,
        {"command": "fidelity-map", "dim": t.dim},
    )


# ---------------------------------------------------------------------------
# argument plumbing

_COMMANDS = {
    "state": _cmd_state,
    "scan": _cmd_scan,
    "optimize": _cmd_optimize,
    "table1": _cmd_table1,
    "table2": _cmd_table2,
    "table3": _cmd_table3,
    "wigner": _cmd_wigner,
    "hsd-scan": _cmd_hsd_scan,
    "fidelity-map": _cmd_fidelity_map,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqsim",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=False, grid=None, etas=False, points=0):
        p.add_argument("--out", help="output file path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--dim", type=int, help="override the truncation heuristic")
        p.add_argument(
            "--tolerance-report",
            action="store_true",
            help="print the numeric tolerance table to stderr",
        )
        if config:
            p.add_argument("--n", type=int, required=True, help="input photon number")
            p.add_argument("--m", type=int, required=True, help="detected photon number")
        if config == "full":
            p.add_argument(
                "--alpha-sq", type=float, required=True, help="coherent strength |alpha|^2"
            )
            p.add_argument("--R", type=float, required=True, help="beam-splitter reflectivity")
        if grid:
            p.add_argument("--grid", default=grid if grid is not True else None)
        if etas:
            p.add_argument("--eta-d", type=float, help="detector efficiency in [0, 1]")
            p.add_argument("--eta-s", type=float, help="source purity weight in [0, 1]")
        if points:
            p.add_argument(
                "--points", type=int, default=points, help="phase-space grid points per axis"
            )

    p = sub.add_parser("state", help="single-configuration report")
    add_common(p, config="full", etas=True)
    p = sub.add_parser("scan", help="min variance over an (|alpha|^2, R) grid")
    add_common(p, config=True, grid="0.05:16:160,0.05:0.95:91")
    p = sub.add_parser("optimize", help="best squeezing for one (n, m)")
    add_common(p, config=True)
    p = sub.add_parser("table1", help="squeezing optima grid")
    add_common(p)
    p = sub.add_parser("table2", help="heralded vs free superposition optima")
    add_common(p)
    p = sub.add_parser("table3", help="benchmark success probabilities and negativities")
    add_common(p, etas=True, points=401)
    p = sub.add_parser("wigner", help="Wigner samples for one configuration")
    add_common(p, config="full", grid=True, points=201)
    p = sub.add_parser("hsd-scan", help="non-Gaussianity over an (|alpha|^2, R) grid")
    add_common(p, config=True, grid="0.05:16:80,0.05:0.95:46")
    p = sub.add_parser("fidelity-map", help="fidelity over an (eta_d, eta_s) grid")
    add_common(p, config="full", grid="0:1:21,0:1:21")
    return parser


def run(args) -> int:
    start = time.perf_counter()
    validators = {
        "alpha_sq": lambda v: v >= 0,
        "R": lambda v: 0 < v < 1,
        "n": lambda v: v >= 0,
        "m": lambda v: v >= 0,
        "eta_d": lambda v: 0 <= v <= 1,
        "eta_s": lambda v: 0 <= v <= 1,
        "dim": lambda v: v >= 1,
    }
    for name, ok in validators.items():
        val = getattr(args, name, None)
        if val is not None and not ok(val):
            print(f"dqsim: invalid value for --{name.replace('_', '-')}: {val}", file=sys.stderr)
            return 2
    try:
        header, rows, meta = _COMMANDS[args.command](args)
        _emit(args, header, rows, meta)
    except argparse.ArgumentTypeError as exc:
        print(f"dqsim: {exc}", file=sys.stderr)
        return 2
    except DQSimError as exc:
        print(f"dqsim: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if args.tolerance_report:
        print(json.dumps({"tolerances": TOLERANCES}, indent=2, sort_keys=True), file=sys.stderr)
    print(f"dqsim: {args.command} finished in {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(args)


if __name__ == "__main__":
    raise SystemExit(main())
