"""Command-line surface.

Every run is deterministic: identical invocations produce byte-identical
output files.  Exit codes: 0 success, 1 usage error, 2 numerical-guard
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import selfcheck as selfcheck_mod
from .coeffs import CoeffCase, l_coeff
from .density import (Constant, DiskIndicator, Gaussian, GridParams,
                      QuasiCharacter, export_grid_csv, integrate_against,
                      invert_to_density, load_grid, mtilde_grid, save_grid)
from .errors import CutoffError, GuardError, MfunError, PrecisionWarning
from .forms import build_builtin, eta, load_form
from .harness import avg_forms, avg_twists, equidist_test, load_family, petersson_check
from .lfun import EvalParams, conductor_bound
from .mtilde import (MtildeParams, mtilde_euler, mtilde_euler_tail,
                     mtilde_harmonic, mtilde_series, mtilde_series_tail,
                     mtilde_sigma)

OUT_DIR_ENV = "MFUN_OUT_DIR"


def parse_complex(text: str) -> complex:
    """Accept forms like '1', '1i', '0.5+0.25i', '-2+1j'."""
    cleaned = text.strip().replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad complex number {text!r}") from exc


def parse_case(text: str) -> CoeffCase:
    table = {"log": CoeffCase.LOG, "log-deriv": CoeffCase.LOG_DERIV,
             "logderiv": CoeffCase.LOG_DERIV}
    try:
        return table[text.strip().lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"case must be 'log' or 'log-deriv', got {text!r}") from None


def parse_phi(text: str):
    kind, _, rest = text.partition(":")
    args = [float(x) for x in rest.split(",")] if rest else []
    if kind == "const":
        return Constant()
    if kind == "disk" and len(args) == 3:
        return DiskIndicator(complex(args[0], args[1]), args[2])
    if kind == "gauss" and len(args) == 3:
        return Gaussian(complex(args[0], args[1]), args[2])
    if kind == "psi" and len(args) == 4:
        return QuasiCharacter(complex(args[0], args[1]), complex(args[2], args[3]))
    raise argparse.ArgumentTypeError(
        f"bad test function {text!r}; use const, disk:cx,cy,r, gauss:cx,cy,w, "
        "or psi:a,b,c,d")


def _load_config(path: str) -> dict:
    allowed = {"out", "format", "threads", "p_max", "n_max", "r_max", "size",
               "nodes", "X", "tol", "strict"}
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise MfunError(f"config line {line_no}: expected key=value")
            key, _, val = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in allowed:
                raise MfunError(f"config line {line_no}: unknown key {key!r}")
            out[key] = val.strip()
    return out


def _resolve_form(args):
    if getattr(args, "load", None):
        return load_form(args.load)
    return build_builtin(args.form, args.p_max)


def _emit(args, text: str) -> None:
    if args.out:
        path = args.out
        if not os.path.isabs(path):
            path = os.path.join(os.environ.get(OUT_DIR_ENV, "."), path)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _json(payload) -> str:
    return json.dumps(payload, sort_keys=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mfun",
        description="Value-distribution computations for L-functions of "
                    "modular forms")
    ap.add_argument("--config", help="key=value defaults file")
    ap.add_argument("--out", help="output path (relative paths resolve "
                                  f"against ${OUT_DIR_ENV})")
    ap.add_argument("--format", choices=["json", "csv", "grid-binary"],
                    default="json")
    ap.add_argument("--strict", action="store_true",
                    help="escalate precision warnings to failures")
    ap.add_argument("--threads", type=int, default=0,
                    help="worker cap for parallel loops (0 = serial); "
                         "results are independent of this value")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("form", help="eigenvalue dump")
    p.add_argument("--form", default="delta", choices=["delta", "11a"])
    p.add_argument("--load", help="eigenvalue CSV path (overrides --form)")
    p.add_argument("--p-max", type=int, default=1000)
    p.add_argument("--eta-at", type=int, nargs="*", default=[],
                   help="also report eta at these indices")

    p = sub.add_parser("coeffs", help="l_z coefficient tables")
    p.add_argument("--case", type=parse_case, required=True)
    p.add_argument("--form", default="delta", choices=["delta", "11a"])
    p.add_argument("--load")
    p.add_argument("--p-max", type=int, default=1000)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--n-max", type=int, default=100)

    p = sub.add_parser("mtilde", help="characteristic-series values")
    p.add_argument("--case", type=parse_case, required=True)
    p.add_argument("--form", default="delta", choices=["delta", "11a"])
    p.add_argument("--load")
    p.add_argument("--sigma", type=parse_complex, required=True,
                   help="s (complex allowed; harmonic mode uses it fully)")
    p.add_argument("--z1", type=parse_complex, required=True)
    p.add_argument("--z2", type=parse_complex, required=True)
    p.add_argument("--mode", choices=["series", "euler", "sigma", "harmonic"],
                   default="series")
    p.add_argument("--p-max", type=int, default=10_000)
    p.add_argument("--n-max", type=int, default=100_000)
    p.add_argument("--r-max", type=int, default=64)
    p.add_argument("--avoid-prime", type=int)
    p.add_argument("--cutoff", type=int, default=2000, help="harmonic cutoff")

    p = sub.add_parser("density", help="characteristic + density grid files")
    p.add_argument("--case", type=parse_case, required=True)
    p.add_argument("--form", default="delta", choices=["delta", "11a"])
    p.add_argument("--load")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--p-max", type=int, default=500)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--extent", type=float, help="half-width; omit for auto")
    p.add_argument("--prefix", default="mgrid", help="output file prefix")

    p = sub.add_parser("avg-twists", help="character-twist average experiment")
    p.add_argument("--case", type=parse_case, required=True)
    p.add_argument("--form", default="delta", choices=["delta", "11a"])
    p.add_argument("--load")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=parse_complex, required=True)
    p.add_argument("--z1", type=parse_complex, required=True)
    p.add_argument("--z2", type=parse_complex, required=True)
    p.add_argument("--p-max", type=int, default=10_000)
    p.add_argument("--n-max", type=int, default=100_000)
    p.add_argument("--X", type=float, help="smoothing scale (exploratory mode)")
    p.add_argument("--no-principal", action="store_true")

    p = sub.add_parser("equidist", help="equidistribution experiment")
    p.add_argument("--case", type=parse_case, required=True)
    p.add_argument("--form", default="delta", choices=["delta", "11a"])
    p.add_argument("--load")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--p-max", type=int, default=2000)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--grid", help="reuse a saved characteristic grid file")
    p.add_argument("--phi", type=parse_phi, nargs="+", required=True)

    p = sub.add_parser("avg-forms", help="harmonic form-family average")
    p.add_argument("--family", required=True)
    p.add_argument("--case", type=parse_case, required=True)
    p.add_argument("--s", type=parse_complex, required=True)
    p.add_argument("--z1", type=parse_complex, required=True)
    p.add_argument("--z2", type=parse_complex, required=True)
    p.add_argument("--cutoff", type=int, default=2000)
    p.add_argument("--p-max", type=int, default=2000)
    p.add_argument("--n-max", type=int, default=20_000)

    p = sub.add_parser("petersson", help="weighted eigenvalue correlation check")
    p.add_argument("--family", required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)

    p = sub.add_parser("selfcheck", help="run the fast invariant suite")
    p.add_argument("--p-max", type=int, default=2000)

    return ap


def _cmd_form(args) -> str:
    form = _resolve_form(args)
    norm = (form.weight - 1) / 2
    rows = [{"p": p, "a_p": form.eta_prime(p) * p**norm, "eta": form.eta_prime(p)}
            for p in form.stored_primes()]
    extra = {str(n): eta(form, n) for n in args.eta_at}
    payload = {"label": form.label, "level": form.level, "weight": form.weight,
               "p_max": form.p_max, "eigenvalues": rows}
    if extra:
        payload["eta_at"] = extra
    if args.format == "csv":
        lines = [f"#level={form.level},weight={form.weight},label={form.label}"]
        lines += [f"{r['p']},{r['a_p']!r}" for r in rows]
        return "\n".join(lines)
    return _json(payload)


def _cmd_coeffs(args) -> str:
    form = _resolve_form(args)
    rows = []
    for n in range(1, args.n_max + 1):
        v = l_coeff(args.case, args.z, form, n)
        rows.append([n, v.real, v.imag])
    if args.format == "csv":
        return "\n".join(["n,l_re,l_im"] + [f"{n},{re!r},{im!r}" for n, re, im in rows])
    return _json({"case": args.case.value, "form": form.label,
                  "z": [args.z.real, args.z.imag], "l": rows})


def _cmd_mtilde(args) -> str:
    s = args.sigma
    params = MtildeParams(n_max=args.n_max, p_max=args.p_max, r_max=args.r_max,
                          avoid_prime=args.avoid_prime)
    if args.mode == "harmonic":
        value = mtilde_harmonic(args.case, s, args.z1, args.z2, args.cutoff)
        tail = None
    else:
        args.p_max = max(args.p_max, args.n_max)  # series needs the full table
        form = _resolve_form(args)
        if args.mode == "series":
            value = mtilde_series(args.case, form, s, args.z1, args.z2, params)
            tail = mtilde_series_tail(args.case, form, s, args.z1, args.z2, params)
        elif args.mode == "sigma":
            value = mtilde_sigma(args.case, form, s, args.z1, args.z2, params)
            tail = mtilde_series_tail(args.case, form, s.real, args.z1, args.z2,
                                      params)
        else:
            value = mtilde_euler(args.case, form, s, args.z1, args.z2, params)
            tail = mtilde_euler_tail(args.case, s.real, args.p_max, args.z1,
                                     args.z2)
    payload = {"mode": args.mode, "case": args.case.value,
               "s": [s.real, s.imag],
               "z1": [args.z1.real, args.z1.imag],
               "z2": [args.z2.real, args.z2.imag],
               "value": [value.real, value.imag],
               "tail_bound": tail}
    return _json(payload)


def _cmd_density(args) -> str:
    form = _resolve_form(args)
    gp = GridParams(extent=args.extent, size=args.size)
    grid = mtilde_grid(args.case, form, args.sigma, args.p_max, gp)
    dens = invert_to_density(grid)
    out_dir = os.environ.get(OUT_DIR_ENV, ".")
    char_path = os.path.join(out_dir, f"{args.prefix}_char.mgrd")
    dens_path = os.path.join(out_dir, f"{args.prefix}_density.mgrd")
    save_grid(grid, char_path)
    save_grid(dens, dens_path)
    csv_path = None
    if args.format == "csv":
        csv_path = os.path.join(out_dir, f"{args.prefix}_density.csv")
        export_grid_csv(dens, csv_path)
    mass = integrate_against(dens, Constant())
    payload = {
        "characteristic_file": char_path, "density_file": dens_path,
        "csv_file": csv_path, "extent": grid.extent,
        "density_extent": dens.extent, "size": grid.size,
        "mass": [mass.real, mass.imag],
        "min_real": float(dens.samples.real.min()),
        "max_abs_imag": float(np.abs(dens.samples.imag).max()),
    }
    return _json(payload)


def _cmd_avg_twists(args) -> str:
    eval_p_max = args.p_max
    args.p_max = max(args.p_max, args.n_max)
    form = _resolve_form(args)
    eparams = EvalParams(p_max=eval_p_max, n_max=args.n_max,
                         X=args.X if args.X else float(args.m))
    mtp = MtildeParams(n_max=args.n_max, p_max=args.p_max)
    rec = avg_twists(args.case, form, args.m, args.s, args.z1, args.z2,
                     include_principal=not args.no_principal, params=eparams,
                     mt_params=mtp)
    return rec.to_json()


def _cmd_equidist(args) -> str:
    form = _resolve_form(args)
    if args.grid:
        grid = load_grid(args.grid)
    else:
        grid = mtilde_grid(args.case, form, args.sigma, args.p_max,
                           GridParams(size=args.size))
    dens = invert_to_density(grid) if grid.meaning.value == "characteristic" \
        else grid
    eparams = EvalParams(p_max=args.p_max, n_max=max(args.p_max, 10_000))
    recs = equidist_test(args.case, form, args.m, args.sigma, dens, args.phi,
                         params=eparams)
    return "\n".join(r.to_json() for r in recs)


def _cmd_avg_forms(args) -> str:
    fam = load_family(args.family)
    eparams = EvalParams(p_max=min(args.p_max, fam.p_max),
                         n_max=args.n_max, X=float(fam.level))
    rec = avg_forms(args.case, fam, args.s, args.z1, args.z2, params=eparams,
                    cutoff=args.cutoff, threads=max(1, args.threads))
    return rec.to_json()


def _cmd_petersson(args) -> str:
    fam = load_family(args.family)
    rec = petersson_check(fam, args.x, args.y)
    return rec.to_json()


_HANDLERS = {
    "form": _cmd_form,
    "coeffs": _cmd_coeffs,
    "mtilde": _cmd_mtilde,
    "density": _cmd_density,
    "avg-twists": _cmd_avg_twists,
    "equidist": _cmd_equidist,
    "avg-forms": _cmd_avg_forms,
    "petersson": _cmd_petersson,
}


def dispatch(argv) -> int:
    ap = build_parser()
    try:
        # pre-scan for --config so file values become parser defaults
        if "--config" in argv:
            cfg_path = argv[argv.index("--config") + 1]
            cfg = _load_config(cfg_path)
            numeric = {"threads", "p_max", "n_max", "r_max", "size", "nodes"}
            defaults = {}
            for k, v in cfg.items():
                if k in numeric:
                    defaults[k] = int(v)
                elif k in ("X", "tol"):
                    defaults[k] = float(v)
                elif k == "strict":
                    defaults[k] = v.lower() in ("1", "true", "yes")
                else:
                    defaults[k] = v
            ap.set_defaults(**defaults)
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    except (MfunError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        with warnings.catch_warnings():
            if args.strict:
                warnings.simplefilter("error", PrecisionWarning)
            if args.command == "selfcheck":
                ok = selfcheck_mod.run(p_max=args.p_max)
                return 0 if ok else 2
            text = _HANDLERS[args.command](args)
        _emit(args, text)
        return 0
    except (GuardError, CutoffError, PrecisionWarning) as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 2
    except MfunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
