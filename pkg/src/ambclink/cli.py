"""Batch command-line front end: sweeps, pilot studies, and the verify suite.

Output is CSV plot data plus a short human-readable summary on stdout.
Exit statuses: 0 success, 1 validation error, 2 check failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass

from . import __version__
from .config import MODES, PAPER_DEFAULTS, SystemParams, load_scenario, read_scenario
from .errors import AmbclinkError, ConfigError
from .montecarlo import (
    POLICIES,
    SWEEP_BDPR,
    SWEEP_PS,
    SweepSpec,
    run_pilot_sweep,
    run_sweep,
)
from .verify import run_all_checks

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CHECK_FAILURE = 2
EXIT_IO = 3

BER_CSV_HEADER = ("sweep_var,value,mode,threshold_policy,ber_empirical,"
                  "ber_ci_halfwidth,ber_closed_form,threshold_mean,errors,bits,failures")
PILOT_CSV_HEADER = "pilot_fraction,k_train,R_mean,R_median,R_p90,frames"


@dataclass(frozen=True)
class CommandOutcome:
    command: str
    input_digest: str
    output_paths: tuple
    duration_s: float
    failures: int


def _digest(params: SystemParams, flags: dict, seed: int) -> str:
    payload = json.dumps(
        {"scenario": params.to_dict(), "flags": flags, "seed": seed},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def _load_params(args) -> SystemParams:
    if args.scenario:
        return read_scenario(args.scenario, paper_defaults=args.paper_defaults)
    if args.paper_defaults:
        return load_scenario({}, paper_defaults=True)
    raise ConfigError("provide --scenario <path> or --paper-defaults")


def _parse_sweep(text: str):
    """Parse `var:start:stop:step` into (sweep_var, values)."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"sweep must look like var:start:stop:step, got {text!r}")
    var, start, stop, step = parts
    names = {"ps": SWEEP_PS, "bdpr": SWEEP_BDPR}
    if var not in names:
        raise ConfigError(f"sweep variable must be one of {sorted(names)}, got {var!r}")
    try:
        start, stop, step = float(start), float(stop), float(step)
    except ValueError as exc:
        raise ConfigError(f"non-numeric sweep bounds in {text!r}") from exc
    if step <= 0 or stop < start:
        raise ConfigError(f"need start <= stop and step > 0 in {text!r}")
    values = []
    v = start
    while v <= stop + 1e-9:
        values.append(round(v, 9))
        v += step
    return names[var], tuple(values)


def _write_csv(path: str, header: str, rows, provenance: dict):
    """Write atomically: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".csv.part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            for key, value in provenance.items():
                fh.write(f"# {key}={value}\n")
            fh.write(header + "\n")
            for row in rows:
                fh.write(row + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _format_float(x: float) -> str:
    return repr(float(x))


def cmd_ber_sweep(args) -> int:
    t0 = time.monotonic()
    params = _load_params(args)
    if args.ps is not None:
        from dataclasses import replace
        params = replace(params, ps_dbm=args.ps)
    sweep_var, values = _parse_sweep(args.sweep)
    modes = tuple(m.strip() for m in args.modes.split(","))
    if not all(m in MODES for m in modes):
        raise ConfigError(f"--modes must be a subset of {','.join(MODES)}, got {args.modes!r}")
    spec = SweepSpec(
        scenario=params,
        sweep_var=sweep_var,
        values=values,
        modes=modes,
        threshold_policy=args.threshold_policy,
        n_frames=args.frames,
        n_realizations=args.realizations,
        master_seed=args.seed,
        fixed_bdpr_db=args.bdpr if sweep_var == SWEEP_PS else None,
    )
    points = run_sweep(spec, workers=args.workers)
    flags = {
        "sweep": args.sweep, "modes": args.modes, "threshold_policy": args.threshold_policy,
        "frames": args.frames, "realizations": args.realizations, "bdpr": args.bdpr,
        "ps": args.ps,
    }
    digest = _digest(params, flags, args.seed)
    rows = [
        ",".join([
            p.sweep_var, _format_float(p.value), p.mode, p.threshold_policy,
            _format_float(p.ber_empirical), _format_float(p.ber_ci_halfwidth),
            _format_float(p.ber_closed_form), _format_float(p.threshold_mean),
            str(p.errors), str(p.bits), str(p.failures),
        ])
        for p in points
    ]
    _write_csv(args.out, BER_CSV_HEADER, rows, {
        "tool_version": __version__,
        "scenario_digest": digest,
        "master_seed": args.seed,
    })
    failures = sum(p.failures for p in points)
    outcome = CommandOutcome("ber-sweep", digest, (args.out,), time.monotonic() - t0, failures)
    print(f"ber-sweep: {len(points)} points -> {args.out} "
          f"({outcome.duration_s:.1f}s, {failures} trial failures, digest {digest[:12]})")
    return EXIT_OK


def cmd_pilot_sweep(args) -> int:
    t0 = time.monotonic()
    params = _load_params(args)
    if args.ps is not None:
        from dataclasses import replace
        params = replace(params, ps_dbm=args.ps)
    try:
        fractions = tuple(float(f) for f in args.fractions.split(","))
    except ValueError as exc:
        raise ConfigError(f"--fractions must be comma-separated numbers, got {args.fractions!r}") from exc
    # validate every fraction up front so no work happens on a bad plan
    from dataclasses import replace
    for f in fractions:
        replace(params, pilot_fraction=f)
        k_train = round(f * params.k_symbols)
        if k_train < 4 or k_train % 2:
            raise ConfigError(
                f"pilot fraction {f} gives k_train={k_train}; need an even count >= 4"
            )
    points = run_pilot_sweep(
        params, fractions, mode=args.mode,
        n_realizations=args.realizations, n_frames=args.frames,
        master_seed=args.seed, workers=args.workers,
    )
    flags = {"fractions": args.fractions, "mode": args.mode,
             "frames": args.frames, "realizations": args.realizations, "ps": args.ps}
    digest = _digest(params, flags, args.seed)
    rows = [
        ",".join([
            _format_float(p.pilot_fraction), str(p.k_train),
            _format_float(p.r_mean), _format_float(p.r_median),
            _format_float(p.r_p90), str(p.frames),
        ])
        for p in points
    ]
    _write_csv(args.out, PILOT_CSV_HEADER, rows, {
        "tool_version": __version__,
        "scenario_digest": digest,
        "master_seed": args.seed,
    })
    failures = sum(p.failures for p in points)
    outcome = CommandOutcome("pilot-sweep", digest, (args.out,), time.monotonic() - t0, failures)
    print(f"pilot-sweep: {len(points)} points -> {args.out} "
          f"({outcome.duration_s:.1f}s, {failures} frame failures, digest {digest[:12]})")
    return EXIT_OK


def cmd_verify(args) -> int:
    t0 = time.monotonic()
    params = _load_params(args)
    results = run_all_checks(params, seed=args.seed)
    width = max(len(r.name) for r in results)
    all_ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
        all_ok = all_ok and r.passed
    print(f"verify: {'all checks passed' if all_ok else 'CHECKS FAILED'} "
          f"({time.monotonic() - t0:.1f}s)")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambclink",
        description="Ambient backscatter link simulator and analysis toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--scenario", help="path to a JSON scenario file")
        p.add_argument("--paper-defaults", action="store_true",
                       help="use the published parameter set")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel workers (does not affect results)")
        p.add_argument("--ps", type=float, default=None,
                       help="override source power in dBm")
        if needs_out:
            p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("ber-sweep", help="BER versus a swept variable")
    common(p)
    p.add_argument("--sweep", required=True, help="var:start:stop:step (var: ps|bdpr)")
    p.add_argument("--modes", default=",".join(MODES), help="comma list of modes")
    p.add_argument("--threshold-policy", choices=POLICIES, default="closed_form_true")
    p.add_argument("--frames", type=int, default=1, help="frames per realization")
    p.add_argument("--realizations", type=int, default=100, help="channel draws per point")
    p.add_argument("--bdpr", type=float, default=None,
                   help="pin BDPR (dB) during a ps sweep")
    p.set_defaults(func=cmd_ber_sweep)

    p = sub.add_parser("pilot-sweep", help="threshold error versus pilot overhead")
    common(p)
    p.add_argument("--fractions", default="0.05,0.1,0.2,0.4",
                   help="comma list of pilot fractions")
    p.add_argument("--mode", choices=MODES, default="lna")
    p.add_argument("--frames", type=int, default=10, help="frames per realization")
    p.add_argument("--realizations", type=int, default=50, help="channel draws")
    p.set_defaults(func=cmd_pilot_sweep)

    p = sub.add_parser("verify", help="run all oracle cross-checks")
    common(p, needs_out=False)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AmbclinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
