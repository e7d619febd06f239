"""Command-line front end.

Subcommands::

    exponent       gf | gf-variable | tce-binary | tce-general over (R, T) grids
    phase-diagram  region-labeled (s, R) grid, boundary curves, gnuplot script
    simulate       seeded Monte Carlo trials, one CSV row per configuration
    compare        fitted simulation slopes vs computed exponent bounds

Every command writes a JSON run manifest (command, parameters, input
digests, library version, seed, output paths) *before* its outputs, so a
run can be replayed from the manifest alone.  Outputs land in
--outdir (default: $SWEXP_OUTDIR or the working directory).

Exit codes: 0 success, 1 comparison failures, 2 invalid input, 3 resource
cap exceeded.  Infinities are serialized as ``inf`` in CSV.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import (
    DegenerateData,
    DomainError,
    InfeasibleRate,
    ResourceError,
    SourceSpecError,
)
from .source_model import LN2, BinarySymmetricPair, load_source
from . import gallager_forney, tce_binary, tce_general, variable_rate
from .binning_simulator import (
    SIM_CSV_SCHEMA,
    SimConfig,
    empirical_exponent,
    run_trials,
    write_batch_csv,
)

EXP_CSV_SCHEMA = "R,T,value,diverged,argmax"


def _outdir(args) -> str:
    d = args.outdir or os.environ.get("SWEXP_OUTDIR") or "."
    os.makedirs(d, exist_ok=True)
    return d


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _write_manifest(path: str, command: str, params: dict, inputs: dict, outputs: list,
                    master_seed=None) -> None:
    manifest = {
        "command": command,
        "parameters": params,
        "input_digests": {p: _digest(p) for p in inputs},
        "library_version": __version__,
        "master_seed": master_seed,
        "outputs": outputs,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_grid(single, grid, name):
    if (single is None) == (grid is None):
        raise DomainError(f"give exactly one of --{name} or --{name}-grid")
    if single is not None:
        return [float(single)]
    try:
        lo, hi, num = grid.split(":")
        return list(np.linspace(float(lo), float(hi), int(num)))
    except ValueError as exc:
        raise DomainError(f"--{name}-grid expects lo:hi:num, got {grid!r}") from exc


def _get_source(args):
    if getattr(args, "bss", None) is not None:
        return BinarySymmetricPair(args.bss), []
    if getattr(args, "source", None):
        return load_source(args.source), [args.source]
    raise DomainError("a source is required: --bss P or --source FILE")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def cmd_exponent(args) -> int:
    src, input_files = _get_source(args)
    rs = _parse_grid(args.R, args.R_grid, "R")
    ts = _parse_grid(args.T, args.T_grid, "T")
    outdir = _outdir(args)
    out = os.path.join(outdir, args.out)
    _write_manifest(
        out + ".manifest.json", "exponent",
        {"method": args.method, "bss": args.bss, "source": args.source,
         "R": rs, "T": ts, "units": args.units},
        input_files, [out],
    )
    scale = 1.0 if args.units == "nats" else 1.0 / LN2
    value_col = "value" if args.units == "nats" else "value_bits"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(f"# schema=swexp.exponent.v1 method={args.method}\n")
        fh.write(f"R,T,{value_col},diverged,argmax\n")
        for R in rs:
            for T in ts:
                if args.method == "gf":
                    res = gallager_forney.e1(src, R, T)
                elif args.method == "gf-variable":
                    res = variable_rate.e1_tilde(src, R, T)
                elif args.method == "tce-binary":
                    if not isinstance(src, BinarySymmetricPair):
                        raise DomainError("tce-binary requires --bss")
                    res = tce_binary.e1_prime_binary(src.p, R, T)
                else:
                    res = tce_general.e1_prime_general(src, R, T)
                val = res.value * scale if math.isfinite(res.value) else res.value
                argmax = ";".join(
                    f"{k}={v:.6g}" for k, v in res.argmax.items()
                    if isinstance(v, (int, float))
                )
                fh.write(f"{_fmt(float(R))},{_fmt(float(T))},{_fmt(float(val))},"
                         f"{int(res.diverged)},{argmax}\n")
    print(out)
    return 0


def cmd_phase_diagram(args) -> int:
    p = args.p
    svals = _parse_grid(None, args.s_grid, "s")
    rvals = _parse_grid(None, args.R_grid, "R")
    outdir = _outdir(args)
    prefix = os.path.join(outdir, args.out_prefix)
    grid_csv = prefix + "_grid.csv"
    bound_csv = prefix + "_boundaries.csv"
    cont_csv = prefix + "_continuity.csv"
    script = prefix + "_plot.gp"
    _write_manifest(
        prefix + ".manifest.json", "phase-diagram",
        {"p": p, "s_grid": args.s_grid, "R_grid": args.R_grid},
        [], [grid_csv, bound_csv, cont_csv, script],
    )
    pts = tce_binary.phase_grid(p, svals, rvals)
    tce_binary.write_phase_csv(pts, grid_csv, p)
    tce_binary.write_phase_boundaries_csv(bound_csv, p, svals)
    tce_binary.write_phase_plot_script(script, p, os.path.basename(bound_csv),
                                       os.path.basename(prefix) + ".png")
    # boundary continuity spot checks: closed-form L from both sides
    with open(cont_csv, "w", encoding="utf-8") as fh:
        fh.write(f"# schema=swexp.phase-continuity.v1 p={p!r}\n")
        fh.write("s,R,boundary,L_below,L_above,abs_diff\n")
        eps = 1e-12
        hp = tce_binary.binary_entropy(p)
        for s in svals:
            curves = [("h_p", hp), ("h_ps", tce_binary.binary_entropy(tce_binary.tilted_crossover(p, s)))]
            if s > 1:
                curves.append(("R_s", tce_binary.boundary_rate(p, s)))
            for name, R in curves:
                if not (eps < R < LN2 - eps):
                    continue
                lo = tce_binary.l_closed_form(p, R - eps, s)[0]
                hi = tce_binary.l_closed_form(p, R + eps, s)[0]
                fh.write(f"{_fmt(float(s))},{_fmt(float(R))},{name},"
                         f"{_fmt(lo)},{_fmt(hi)},{_fmt(abs(hi - lo))}\n")
    print(grid_csv)
    return 0


def cmd_simulate(args) -> int:
    src, input_files = _get_source(args)
    ns = [int(v) for v in args.n.split(",")]
    rates = None
    if args.rates:
        rates = tuple(float(v) for v in args.rates.split(","))
    outdir = _outdir(args)
    out = os.path.join(outdir, args.out)
    _write_manifest(
        out + ".manifest.json", "simulate",
        {"bss": args.bss, "source": args.source, "n": ns, "R": args.R, "T": args.T,
         "trials": args.trials, "mode": args.mode, "rates": rates, "engine": args.engine},
        input_files, [out], master_seed=args.seed,
    )
    batches = []
    for n in ns:
        cfg = SimConfig(
            source=src, n=n, R=args.R, T=args.T, trials=args.trials,
            master_seed=args.seed, mode=args.mode, rates=rates, engine=args.engine,
        )
        batches.append(run_trials(cfg, workers=args.workers))
    write_batch_csv(batches, out)
    print(out)
    return 0


def _read_csv(path: str, expected: str):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    if not lines:
        raise DomainError(f"{path}: empty CSV")
    header = lines[0].split(",")
    for col in expected.split(","):
        if col not in header and not (col == "value" and f"{col}_bits" in header):
            raise DomainError(f"{path}: schema mismatch, missing column {col!r}")
    rows = []
    for ln in lines[1:]:
        if ln:
            rows.append(dict(zip(header, ln.split(","))))
    return header, rows


def cmd_compare(args) -> int:
    _, sim_rows = _read_csv(args.sim, SIM_CSV_SCHEMA)
    exp_header, exp_rows = _read_csv(args.exponent, "R,T,value,diverged")
    value_col = "value" if "value" in exp_header else "value_bits"
    if value_col == "value_bits":
        raise DomainError("compare requires an exponent CSV in nats (column 'value')")
    groups = {}
    for row in sim_rows:
        key = (float(row["R_nominal"]), float(row["T"]))
        groups.setdefault(key, []).append(row)
    report = []
    all_pass = True
    for (R, T), rows in sorted(groups.items()):
        bounds = [
            float(er["value"]) for er in exp_rows
            if abs(float(er["R"]) - R) < 1e-9 and abs(float(er["T"]) - T) < 1e-9
        ]
        if not bounds:
            report.append(f"SKIP R={R} T={T}: no matching exponent row")
            continue
        bound = bounds[0]
        pts = [(int(r["n"]), int(r["e1_count"]) / int(r["trials"])) for r in rows]
        if len(pts) < 3:
            report.append(f"SKIP R={R} T={T}: need >= 3 block lengths, got {len(pts)}")
            continue
        fit = empirical_exponent(pts)
        ok = fit.slope >= bound - fit.ci_half_width
        all_pass &= ok
        report.append(
            f"{'PASS' if ok else 'FAIL'} R={R} T={T}: slope={fit.slope:.6f} "
            f"ci={fit.ci_half_width:.6f} bound={bound:.6f}"
        )
    text = "\n".join(report) + "\n"
    sys.stdout.write(text)
    if args.out:
        outdir = _outdir(args)
        out = os.path.join(outdir, args.out)
        _write_manifest(
            out + ".manifest.json", "compare",
            {"sim": args.sim, "exponent": args.exponent},
            [args.sim, args.exponent], [out],
        )
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="swexp",
        description="Erasure/list exponents for Slepian-Wolf random binning",
    )
    ap.add_argument("--outdir", default=None, help="output directory (default $SWEXP_OUTDIR or .)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_source(p):
        p.add_argument("--bss", type=float, default=None,
                       help="binary symmetric pair with this crossover probability")
        p.add_argument("--source", default=None, help="JSON joint-source spec file")

    pe = sub.add_parser("exponent", help="compute exponents on an (R, T) grid")
    add_source(pe)
    pe.add_argument("--method", required=True,
                    choices=["gf", "gf-variable", "tce-binary", "tce-general"])
    pe.add_argument("--R", type=float, default=None)
    pe.add_argument("--R-grid", dest="R_grid", default=None, help="lo:hi:num")
    pe.add_argument("--T", type=float, default=None)
    pe.add_argument("--T-grid", dest="T_grid", default=None, help="lo:hi:num")
    pe.add_argument("--units", choices=["nats", "bits"], default="nats",
                    help="display units for the value column (bits is display-only)")
    pe.add_argument("--out", default="exponent.csv")
    pe.set_defaults(func=cmd_exponent)

    pp = sub.add_parser("phase-diagram", help="emit the (s, R) region diagram")
    pp.add_argument("--p", type=float, required=True)
    pp.add_argument("--s-grid", dest="s_grid", default="0:4:161", help="lo:hi:num")
    pp.add_argument("--R-grid", dest="R_grid", default=f"0:{LN2}:131", help="lo:hi:num")
    pp.add_argument("--out-prefix", dest="out_prefix", default="phase")
    pp.set_defaults(func=cmd_phase_diagram)

    ps = sub.add_parser("simulate", help="run seeded binning trials")
    add_source(ps)
    ps.add_argument("--n", required=True, help="block length, or comma list")
    ps.add_argument("--R", type=float, required=True)
    ps.add_argument("--T", type=float, required=True)
    ps.add_argument("--trials", type=int, required=True)
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--mode", choices=["fixed", "variable"], default="fixed")
    ps.add_argument("--rates", default=None, help="comma list of per-letter rates (variable mode)")
    ps.add_argument("--engine", choices=["auto", "grouped", "exhaustive"], default="auto")
    ps.add_argument("--workers", type=int, default=1)
    ps.add_argument("--out", default="simulate.csv")
    ps.set_defaults(func=cmd_simulate)

    pc = sub.add_parser("compare", help="check fitted slopes against computed bounds")
    pc.add_argument("--sim", required=True, help="CSV from the simulate command")
    pc.add_argument("--exponent", required=True, help="CSV from the exponent command")
    pc.add_argument("--out", default=None, help="optional report file")
    pc.set_defaults(func=cmd_compare)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, SourceSpecError, InfeasibleRate, DegenerateData, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
