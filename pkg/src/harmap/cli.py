"""Command-line surface: certify, extend, shear, counterexample, conformal.

Exit codes: 0 ok/invertible, 2 input error, 3 not invertible,
4 indeterminate, 5 dilatation bound, 6 convex input, 7 nonstarlike.
All reports are deterministic JSON (sorted keys, no timestamps); dense grids
go to CSV.  Files are written atomically (temp + rename).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import warnings

import numpy as np

from . import __version__, certify, choquet, conformal, dirichlet, shear, spectral
from .dirichlet import BoundaryCurve
from .errors import (ConvexInputError, DilatationBoundError, HarmapError,
                     NonstarlikeError)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_INVERTIBLE = 3
EXIT_INDETERMINATE = 4
EXIT_DILATATION = 5
EXIT_CONVEX_INPUT = 6
EXIT_NONSTARLIKE = 7

VERDICT_EXIT = {
    certify.INVERTIBLE: EXIT_OK,
    certify.NOT_INVERTIBLE: EXIT_NOT_INVERTIBLE,
    certify.INDETERMINATE: EXIT_INDETERMINATE,
}


class InputError(Exception):
    pass


def _default_n() -> int:
    raw = os.environ.get("HARMAP_DEFAULT_N")
    if raw is None:
        return spectral.DEFAULT_N
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"HARMAP_DEFAULT_N={raw!r} is not an integer")
    if not spectral.is_power_of_two(n) or n < 8:
        raise InputError(f"HARMAP_DEFAULT_N={n} must be a power of two >= 8")
    return n


def _atomic_write(path: str, data: str):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".harmap-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path: str, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _atomic_write(path, buf.getvalue())


def load_curve(path: str, samples: int | None = None) -> BoundaryCurve:
    """Read a curve file: samples format or fourier format (see README)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read curve file {path}: {exc}")
    fmt = doc.get("format")
    if fmt == "samples":
        try:
            n = int(doc["n"])
            phi = np.asarray(doc["phi"], dtype=float)
            psi = np.asarray(doc["psi"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed samples curve file: {exc}")
        if phi.size != n or psi.size != n:
            raise InputError("phi/psi lengths disagree with n")
        if not spectral.is_power_of_two(n) or n < 8:
            raise InputError("sample count must be a power of two >= 8")
        if samples is not None and samples != n:
            raise InputError(
                "refusing to resample user sample data; provide fourier format"
            )
        try:
            return BoundaryCurve.from_components(phi, psi)
        except ValueError as exc:
            raise InputError(str(exc))
    if fmt == "fourier":
        try:
            entries = [(int(k), float(re), float(im))
                       for k, re, im in doc["coeffs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed fourier curve file: {exc}")
        ks = [k for k, _, _ in entries]
        if len(set(ks)) != len(ks):
            raise InputError("duplicate fourier indices")
        n = samples if samples is not None else _default_n()
        degree = max((abs(k) for k in ks), default=0)
        if n < 2 * degree + 2:
            raise InputError(
                f"{n} samples cannot carry fourier degree {degree}"
            )
        t = spectral.grid(n)
        w = np.zeros(n, dtype=complex)
        for k, re, im in entries:
            w += (re + 1j * im) * np.exp(1j * k * t)
        return BoundaryCurve.from_complex(w)
    raise InputError(f"unknown curve format {fmt!r}")


def load_series(path: str) -> shear.PowerSeries:
    """Read a Taylor-coefficient file {"coeffs": [[k, re, im], ...]}."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
        entries = [(int(k), float(re), float(im)) for k, re, im in doc["coeffs"]]
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read series file {path}: {exc}")
    if any(k < 0 for k, _, _ in entries):
        raise InputError("taylor indices must be nonnegative")
    ks = [k for k, _, _ in entries]
    if len(set(ks)) != len(ks):
        raise InputError("duplicate taylor indices")
    order = max(ks, default=0)
    c = np.zeros(order + 1, dtype=complex)
    for k, re, im in entries:
        c[k] = re + 1j * im
    return shear.PowerSeries(c)


def curve_payload(curve: BoundaryCurve) -> dict:
    return {
        "format": "samples",
        "n": curve.n,
        "phi": [float(v) for v in curve.phi.values],
        "psi": [float(v) for v in curve.psi.values],
    }


def _runs(mask: np.ndarray):
    """Contiguous cyclic index runs where mask holds, as [start, stop) pairs."""
    n = mask.size
    if mask.all():
        return [[0, n]]
    if not mask.any():
        return []
    start = int(np.nonzero(~mask)[0][0]) + 1
    runs = []
    j = start
    current = None
    for step in range(n):
        idx = (start + step) % n
        if mask[idx]:
            if current is None:
                current = [idx, idx + 1]
            else:
                current[1] += 1
        else:
            if current is not None:
                runs.append([current[0] % n, (current[1] - 1) % n + 1])
                current = None
    if current is not None:
        runs.append([current[0] % n, (current[1] - 1) % n + 1])
    return sorted(runs)


def certificate_payload(rep: certify.CertificateReport, grid_n: int,
                        warnings_list) -> dict:
    windings = None
    if rep.wn_report is not None:
        windings = {
            "wn_f": rep.wn_report.wn_f,
            "wn_phi": rep.wn_report.wn_phi,
            "critical_points": rep.wn_report.critical_points,
            "consistent": rep.wn_report.consistent,
        }
    partition = None
    if rep.partition is not None:
        in_c = np.zeros(grid_n, dtype=bool)
        in_c[rep.partition.gamma_c_indices] = True
        partition = {
            "gamma_c_arcs": _runs(in_c),
            "gamma_nc_arcs": _runs(~in_c),
            "gamma_c_count": int(rep.partition.gamma_c_indices.size),
            "gamma_nc_count": int(rep.partition.gamma_nc_indices.size),
        }
    return {
        "verdict": rep.verdict,
        "min_jacobian": rep.min_jacobian,
        "argmin_theta": rep.argmin_theta,
        "margin": rep.margin,
        "checked_min": None if not np.isfinite(rep.checked_min) else rep.checked_min,
        "gamma_c_min": rep.gamma_c_min,
        "windings": windings,
        "partition": partition,
        "regularity": {
            "is_simple": rep.regularity.is_simple,
            "is_c1_diffeo": rep.regularity.is_c1_diffeo,
            "orientation": rep.regularity.orientation,
            "min_speed": rep.regularity.min_speed,
            "max_speed": rep.regularity.max_speed,
            "tail_fraction": rep.regularity.tail_fraction,
        },
        "reasons": list(rep.reasons),
        "warnings": warnings_list,
        "grid_n": grid_n,
        "tool_version": __version__,
    }


def _collect_warnings(wlist):
    return sorted({f"{w.category.__name__}: {w.message}" for w in wlist})


def cmd_certify(args) -> int:
    curve = load_curve(args.input, args.samples)
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        rep = (certify.certify_nonconvex(curve) if args.nonconvex_only
               else certify.certify_full(curve))
    payload = certificate_payload(rep, curve.n, _collect_warnings(wlist))
    if args.report:
        _write_json(args.report, payload)
    print(f"verdict: {rep.verdict} (min boundary jacobian {rep.min_jacobian:.6g})")
    return VERDICT_EXIT[rep.verdict]


def cmd_extend(args) -> int:
    curve = load_curve(args.input, args.samples)
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        U = dirichlet.solve(curve)
    rings, spokes = args.rings, args.spokes
    field = dirichlet.jacobian_field(U, rings, spokes)
    rows = []
    for i, r in enumerate(field.radii):
        z = r * np.exp(1j * field.thetas)
        vals = dirichlet.evaluate(U, z)
        for j, th in enumerate(field.thetas):
            rows.append([repr(float(r)), repr(float(th)),
                         repr(float(vals[j].real)), repr(float(vals[j].imag)),
                         repr(float(field.values[i, j]))])
    _write_csv(args.out_csv, ["r", "theta", "u", "v", "det_du"], rows)
    print(f"wrote {rings * spokes} rows to {args.out_csv} "
          f"(min det DU {field.min_value:.6g})")
    return EXIT_OK


def cmd_shear(args) -> int:
    f = load_series(args.f)
    omega = load_series(args.omega)
    spec = shear.DilatationSpec.from_series(omega)
    U = shear.shear_construct(f, spec, order=args.order)
    n = args.samples if args.samples else _default_n()
    while n < 2 * U.degree + 2:
        n *= 2
    trace = dirichlet.boundary_trace(U, n)
    omega_back = shear.dilatation(U)
    zb = np.exp(1j * spectral.grid(512))
    roundtrip = float(np.max(np.abs(omega_back(zb) - omega.pad(omega_back.order)(zb))))
    re_exact = bool(np.array_equal(dirichlet.analytic_f(U),
                                   f.pad(U.degree).coeffs))
    if args.out_curve:
        _write_json(args.out_curve, curve_payload(trace))
    if args.report:
        _write_json(args.report, {
            "order": U.degree,
            "sup_omega": spec.sup_bound,
            "dilatation_roundtrip_error": roundtrip,
            "re_part_exact": re_exact,
            "trace_n": n,
            "tool_version": __version__,
        })
    print(f"shear ok: sup|omega| = {spec.sup_bound:.6g}, "
          f"roundtrip error {roundtrip:.3g}")
    return EXIT_OK


def cmd_counterexample(args) -> int:
    curve = load_curve(args.input, args.samples)
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        bundle = choquet.build_counterexample(curve)
    sc = bundle.scaffold
    if args.out_phi:
        _write_json(args.out_phi, curve_payload(bundle.phi))
    if args.out_eta:
        det = dirichlet.eval_jacobian(bundle.U, bundle.eta)
        rows = [[repr(float(x)), repr(float(z.real)), repr(float(z.imag)),
                 repr(float(d))]
                for x, z, d in zip(bundle.eta_x, bundle.eta, det)]
        _write_csv(args.out_eta, ["x", "z_re", "z_im", "det_du"], rows)
    if args.out_grid:
        field = dirichlet.jacobian_field(bundle.U, 64, 256)
        rows = []
        for i, r in enumerate(field.radii):
            for j, th in enumerate(field.thetas):
                rows.append([repr(float(r)), repr(float(th)),
                             repr(float(field.values[i, j]))])
        _write_csv(args.out_grid, ["r", "theta", "det_du"], rows)
    if args.report:
        _write_json(args.report, {
            "p": sc.p,
            "bridge": [[sc.bridge_a.real, sc.bridge_a.imag],
                       [sc.bridge_b.real, sc.bridge_b.imag]],
            "cone_vertex": [sc.vertex.real, sc.vertex.imag],
            "contacts": [[sc.contact_a.real, sc.contact_a.imag],
                         [sc.contact_b.real, sc.contact_b.imag]],
            "witnesses": [
                {"z1": [z1.real, z1.imag], "z2": [z2.real, z2.imag],
                 "du": float(abs(dirichlet.evaluate(bundle.U, z1)
                                 - dirichlet.evaluate(bundle.U, z2))),
                 "dz": float(abs(z1 - z2))}
                for z1, z2 in bundle.witnesses
            ],
            "diagnostics": {k: (v if not isinstance(v, tuple) else list(v))
                            for k, v in bundle.diagnostics.items()},
            "warnings": _collect_warnings(wlist),
            "tool_version": __version__,
        })
    print(f"counterexample ok: min boundary jacobian "
          f"{bundle.diagnostics['phi_min_jacobian']:.6g}, "
          f"{len(bundle.witnesses)} witness pairs")
    return EXIT_OK


def cmd_conformal(args) -> int:
    try:
        with open(args.input) as fh:
            doc = json.load(fh)
        center = complex(float(doc["center"][0]), float(doc["center"][1]))
        rho = np.asarray(doc["rho"], dtype=float)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read polar file {args.input}: {exc}")
    try:
        samples = spectral.PeriodicSamples(rho)
    except ValueError as exc:
        raise InputError(str(exc))
    boundary = conformal.StarlikeBoundary(center, samples)
    m = conformal.theodorsen(boundary, tol=args.tol, max_iter=args.max_iter)
    if args.report:
        _write_json(args.report, {
            "residual": m.residual,
            "leakage": m.leakage,
            "iterations": m.iterations,
            "near_circle_bound": m.near_circle_bound,
            "taylor_head": [[k, float(c.real), float(c.imag)]
                            for k, c in enumerate(m.taylor.coeffs[:8])],
            "tool_version": __version__,
        })
    print(f"conformal ok: residual {m.residual:.3g}, leakage {m.leakage:.3g}, "
          f"{m.iterations} iterations")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="harmap",
        description="Certify invertibility of harmonic extensions of the disk, "
                    "build sheared harmonic maps, and construct fold "
                    "counterexamples.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="boundary-Jacobian invertibility check")
    c.add_argument("input")
    c.add_argument("--samples", type=int, default=None)
    c.add_argument("--nonconvex-only", action="store_true", dest="nonconvex_only")
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_certify)

    e = sub.add_parser("extend", help="evaluate the harmonic extension on a grid")
    e.add_argument("input")
    e.add_argument("--samples", type=int, default=None)
    e.add_argument("--rings", type=int, default=32)
    e.add_argument("--spokes", type=int, default=128)
    e.add_argument("--out-csv", required=True, dest="out_csv")
    e.set_defaults(func=cmd_extend)

    s = sub.add_parser("shear", help="harmonic map with prescribed dilatation")
    s.add_argument("f", help="taylor series file for f")
    s.add_argument("omega", help="taylor series file for the dilatation")
    s.add_argument("--order", type=int, default=shear.DEFAULT_ORDER)
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--report", default=None)
    s.add_argument("--out-curve", default=None, dest="out_curve")
    s.set_defaults(func=cmd_shear)

    x = sub.add_parser("counterexample",
                       help="non-invertible boundary data for a nonconvex target")
    x.add_argument("input")
    x.add_argument("--samples", type=int, default=None)
    x.add_argument("--report", default=None)
    x.add_argument("--out-phi", default=None, dest="out_phi")
    x.add_argument("--out-eta", default=None, dest="out_eta")
    x.add_argument("--out-grid", default=None, dest="out_grid")
    x.set_defaults(func=cmd_counterexample)

    k = sub.add_parser("conformal", help="disk-to-starlike-domain map (debug)")
    k.add_argument("input", help="polar file {center: [x, y], rho: [...]}")
    k.add_argument("--tol", type=float, default=conformal.DEFAULT_TOL)
    k.add_argument("--max-iter", type=int, default=conformal.DEFAULT_MAX_ITER,
                   dest="max_iter")
    k.add_argument("--report", default=None)
    k.set_defaults(func=cmd_conformal)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DilatationBoundError as exc:
        print(f"dilatation bound: {exc}", file=sys.stderr)
        return EXIT_DILATATION
    except ConvexInputError as exc:
        print(f"convex input: {exc}", file=sys.stderr)
        return EXIT_CONVEX_INPUT
    except NonstarlikeError as exc:
        print(f"nonstarlike: {exc}", file=sys.stderr)
        return EXIT_NONSTARLIKE
    except HarmapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main():  # pragma: no cover - thin script wrapper
    sys.exit(main())
