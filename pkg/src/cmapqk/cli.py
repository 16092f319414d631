"""Command-line front end: verification runs, metric evaluation, scans.

Exit codes: 0 success, 1 verification failure, 2 invalid input or config.
The config file is plain ``key = value`` text; see README for the schema.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fs_metric, hkqk, rigid_cmap as rc, sampling, special_kahler as sk, suite
from .errors import CmapQKError, ConfigError
from .prepotential import Prepotential
from .report import Report
from .tensor_calc import curvature, signature


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _parse_coefficients(text: str) -> list[tuple[int, int, int, float]]:
    triples = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 4:
            raise ConfigError(f"cubic coefficient entry must be 'mu,nu,la,value': {chunk!r}")
        triples.append((int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3])))
    return triples


def _parse_floats(text: str) -> list[float]:
    return [float(p) for p in text.replace(";", ",").split(",") if p.strip()]


def build_prepotential(cfg: dict, args) -> tuple[str, Prepotential]:
    family = getattr(args, "family", None) or cfg.get("family")
    if family in (None, "", "default"):
        return "quadratic_n1", Prepotential.quadratic(1)
    if family == "stu":
        return "stu", Prepotential.stu()
    n_raw = getattr(args, "n", None)
    n = int(n_raw if n_raw is not None else cfg.get("n", 1))
    if family == "quadratic":
        return f"quadratic_n{n}", Prepotential.quadratic(n)
    if family == "cubic":
        coeff_text = getattr(args, "coefficients", None) or cfg.get("coefficients")
        if not coeff_text:
            raise ConfigError("cubic family needs coefficients (mu,nu,la,value triples)")
        return f"cubic_n{n}", Prepotential.cubic(n, _parse_coefficients(coeff_text))
    raise ConfigError(f"unknown family {family!r}")


def build_run_config(cfg: dict, args) -> suite.RunConfig:
    seed = int(getattr(args, "seed", None) or cfg.get("seed", 42))
    c_list = tuple(_parse_floats(cfg.get("c_list", "-0.3, 0, 0.5")))
    samples = {}
    tols = {}
    for key, val in cfg.items():
        if key.startswith("samples."):
            samples[key[len("samples."):]] = int(val)
        elif key.startswith("tol."):
            tols[key[len("tol."):]] = float(val)
    for item in getattr(args, "tol_override", None) or []:
        if "=" not in item:
            raise ConfigError(f"--tol-override expects name=value, got {item!r}")
        name, val = item.split("=", 1)
        tols[name.strip()] = float(val)
    checks = None
    if cfg.get("checks"):
        checks = tuple(p.strip() for p in cfg["checks"].split(",") if p.strip())
    if getattr(args, "checks", None):
        checks = tuple(p.strip() for p in args.checks.split(",") if p.strip())
    unknown = set(samples) | set(tols) | set(checks or ())
    unknown -= set(suite.CHECK_NAMES)
    if unknown:
        raise ConfigError(f"unknown check name(s): {sorted(unknown)}")

    preps: tuple[tuple[str, Prepotential], ...] = ()
    if (getattr(args, "family", None) or cfg.get("family")) not in (None, "", "default"):
        preps = (build_prepotential(cfg, args),)
    return suite.RunConfig(
        prepotentials=preps, c_list=c_list, seed=seed, samples=samples, tolerances=tols, checks=checks
    )


def _write_output(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _matrix_csv(labels, matrix: np.ndarray) -> str:
    lines = [",".join(labels)]
    for row in np.asarray(matrix):
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _emit_matrix(args, labels, matrix, extra: dict) -> None:
    if args.format == "csv":
        _write_output(_matrix_csv(labels, matrix), args.out)
    else:
        payload = {"chart_labels": list(labels), "matrix": np.asarray(matrix).tolist()}
        payload.update(extra)
        _write_output(json.dumps(payload, indent=2, sort_keys=True), args.out)


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args, cfg: dict) -> int:
    run_cfg = build_run_config(cfg, args)
    report = suite.run_suite(run_cfg)
    report.validate()
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: max residual {check.max_residual:.3e} (tol {check.tolerance:g})")
    out = args.out or cfg.get("out")
    text = report.to_json()
    if out:
        Path(out).write_text(text)
        print(f"report written to {out}")
    else:
        print(text)
    return 0 if report.all_passed else 1


def _qk_point_from_arg(point: list[float], n: int) -> hkqk.QKChartPoint:
    return hkqk.QKChartPoint.from_chart(np.asarray(point, dtype=float), n)


def cmd_eval_metric(args, cfg: dict) -> int:
    space = args.space
    point = _parse_floats(args.point)
    c = args.c if args.c is not None else 0.0
    if space == "uh":
        g = fs_metric.uh_metric(c, fs_metric.UHPoint.from_coords(point))
        pos, neg, null = signature(g, 1e-10)
        _emit_matrix(args, ["rho", "phit", "zt0", "zc0"], g, {"space": space, "c": c, "signature": [pos, neg]})
        return 0
    name, prep = build_prepotential(cfg, args)
    m = prep.dim
    if space == "affine":
        z = np.asarray(point[:m]) + 1j * np.asarray(point[m:2 * m])
        g = sk.metric_affine(prep, z)
        labels = sk.affine_chart(prep.n).labels
        _emit_matrix(args, labels, g, {"space": space, "prepotential": name})
    elif space == "projective":
        x = np.asarray(point[:prep.n]) + 1j * np.asarray(point[prep.n:2 * prep.n])
        g = sk.metric_projective(prep, x)
        labels = [f"u{i}" for i in range(1, prep.n + 1)] + [f"v{i}" for i in range(1, prep.n + 1)]
        _emit_matrix(args, labels, g, {"space": space, "prepotential": name})
    elif space == "hk":
        frame = rc.hk_frame(prep, rc.CotangentPoint.from_chart(np.asarray(point)))
        labels = frame.chart.labels
        extra = {
            "space": space,
            "prepotential": name,
            "cond_n": frame.cond_n,
            "quaternion_residual": frame.quaternion_residual(),
        }
        if args.format == "json":
            extra["omega"] = [w.tolist() for w in frame.omega]
        _emit_matrix(args, labels, frame.g, extra)
    elif space in ("qk-pipeline", "fs", "fs-deformed"):
        qpt = _qk_point_from_arg(point, prep.n)
        labels = sk.quaternionic_chart(prep.n).labels
        if space == "qk-pipeline":
            res = hkqk.qk_pipeline(prep, qpt, c)
            _, _, regime = fs_metric.signature_expected(c, qpt.rho, prep.n)
            _emit_matrix(
                args, labels, res.metric,
                {"space": space, "prepotential": name, "c": c, "sigma": res.sigma,
                 "regime": regime, "kernel_residual": res.kernel_residual},
            )
        else:
            g = fs_metric.fs_closed_form(prep, qpt) if space == "fs" else fs_metric.deformed_fs_closed_form(prep, qpt, c)
            _, _, regime = fs_metric.signature_expected(c if space == "fs-deformed" else 0.0, qpt.rho, prep.n)
            _emit_matrix(args, labels, g, {"space": space, "prepotential": name, "c": c, "regime": regime})
    else:
        raise ConfigError(f"unknown space {space!r}")
    return 0


def _metric_field_for_space(space: str, prep: Prepotential, c: float):
    if space == "uh":
        return fs_metric.uh_metric_field(c)
    if space == "ch1":
        return fs_metric.ch1_metric_field()
    if space == "hk":
        return rc.metric_field(prep)
    if space == "fs":
        return fs_metric.deformed_fs_field(prep, 0.0)
    if space == "fs-deformed":
        return fs_metric.deformed_fs_field(prep, c)
    raise ConfigError(f"no metric field for space {space!r}")


def cmd_curvature(args, cfg: dict) -> int:
    c = args.c if args.c is not None else 0.0
    name, prep = build_prepotential(cfg, args)
    field = _metric_field_for_space(args.space, prep, c)
    rep = curvature(field, _parse_floats(args.point), h=args.h)
    payload = {
        "space": args.space,
        "c": c,
        "scal": rep.scal,
        "einstein_lambda": rep.einstein_lambda,
        "einstein_residual": rep.einstein_residual,
        "noise_floor": rep.noise_floor,
        "ricci_asymmetry": rep.ricci_asymmetry,
        "bianchi_residual": rep.bianchi_residual,
        "fd_step": rep.fd_step,
        "ricci": rep.ricci.tolist(),
        "christoffel": rep.christoffel.tolist(),
        "riemann": rep.riemann.tolist(),
    }
    _write_output(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0


def cmd_signature_scan(args, cfg: dict) -> int:
    name, prep = build_prepotential(cfg, args)
    c = args.c
    lo, hi = (float(p) for p in args.rho_range.split(":"))
    if lo >= hi:
        raise ConfigError("--rho-range expects lo:hi with lo < hi")
    margin = 1e-6
    for pole in (0.0, -2.0 * c):
        if lo - margin < pole < hi + margin:
            raise ConfigError(f"rho range [{lo:g}, {hi:g}] crosses the pole rho = {pole:g}")
    if lo + c <= 0.0:
        raise ConfigError(f"rho range violates rho + c > 0 at rho = {lo:g}")
    rng = np.random.default_rng(int(getattr(args, "seed", None) or cfg.get("seed", 42)))
    rows = ["rho,pos,neg,expected_pos,expected_neg,regime,match"]
    mismatch = False
    for rho in np.linspace(lo, hi, args.steps):
        rho = float(rho)
        x = sampling.sample_projective_point(prep, rng)
        zt, zc = sampling.sample_fibers(prep.dim, rng)
        qpt = hkqk.QKChartPoint.make(x, rho, 0.0, zt, zc)
        g = fs_metric.deformed_fs_closed_form(prep, qpt, c)
        pos, neg, null = signature(g, 1e-8)
        epos, eneg, regime = fs_metric.signature_expected(c, rho, prep.n)
        ok = (pos, neg, null) == (epos, eneg, 0)
        mismatch = mismatch or not ok
        rows.append(f"{rho!r},{pos},{neg},{epos},{eneg},{regime},{str(ok).lower()}")
    _write_output("\n".join(rows) + "\n", args.out)
    return 1 if mismatch else 0


def cmd_compare_paths(args, cfg: dict) -> int:
    run_cfg = build_run_config(cfg, args)
    tol = run_cfg.tolerances.get("two_path_agreement", 1e-9)
    rng = np.random.default_rng(run_cfg.seed)
    rows = []
    worst = 0.0
    for name, prep in run_cfg.prepotentials:
        for c in run_cfg.c_list:
            for _ in range(args.samples):
                qpt = sampling.sample_qk_point(prep, c, rng)
                res = hkqk.qk_pipeline(prep, qpt, c)
                closed = fs_metric.deformed_fs_closed_form(prep, qpt, c)
                scale = max(1.0, float(np.max(np.abs(closed))))
                rel = float(np.max(np.abs(-2.0 * res.sigma * res.metric - closed))) / scale
                worst = max(worst, rel)
                rows.append({"prepotential": name, "c": c, "rho": qpt.rho, "sigma": res.sigma, "rel_diff": rel})
    payload = {"tolerance": tol, "max_rel_diff": worst, "passed": worst < tol, "points": rows}
    if args.format == "csv":
        lines = ["prepotential,c,rho,sigma,rel_diff"]
        lines += [f"{r['prepotential']},{r['c']!r},{r['rho']!r},{r['sigma']},{r['rel_diff']!r}" for r in rows]
        _write_output("\n".join(lines) + "\n", args.out)
    else:
        _write_output(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0 if worst < tol else 1


def cmd_curve_length(args, cfg: dict) -> int:
    length, rec = fs_metric.incompleteness_curve_length(args.c, args.case)
    payload = {
        "case": args.case,
        "c": args.c,
        "length": length,
        "converged": rec.converged,
        "panels": rec.panels,
        "evaluations": rec.evaluations,
        "abs_error_estimate": rec.abs_error,
    }
    _write_output(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0


def golden_vectors(run_cfg: suite.RunConfig, count: int) -> dict:
    """Deterministic sampled inputs with every constructor output, for pinning."""
    rng = np.random.default_rng(run_cfg.seed)
    records = []
    for name, prep in run_cfg.prepotentials:
        for c in run_cfg.c_list:
            for _ in range(count):
                qpt = sampling.sample_qk_point(prep, c, rng)
                ppt = hkqk.lift_qk_point(prep, qpt, c)
                frame = rc.hk_frame(prep, ppt.base)
                data = hkqk.pipeline_data(prep, ppt, c)
                res = hkqk.qk_pipeline(prep, qpt, c)
                closed = fs_metric.deformed_fs_closed_form(prep, qpt, c)
                records.append(
                    {
                        "prepotential": name,
                        "c": c,
                        "point": {
                            "x_re": np.real(qpt.x).tolist(),
                            "x_im": np.imag(qpt.x).tolist(),
                            "rho": qpt.rho,
                            "phi_tilde": qpt.phi_tilde,
                            "zeta_tilde": qpt.zeta_tilde.tolist(),
                            "zeta": qpt.zeta.tolist(),
                        },
                        "outputs": {
                            "g_n": frame.g.tolist(),
                            "omega": [w.tolist() for w in frame.omega],
                            "f": data.f,
                            "f1": data.f1,
                            "kernel_residual": data.kernel_residual,
                            "sigma": res.sigma,
                            "pipeline_metric": res.metric.tolist(),
                            "closed_form": closed.tolist(),
                        },
                    }
                )
    return {"seed": run_cfg.seed, "count_per_case": count, "records": records}


def _recompute_outputs(record: dict, preps: dict) -> dict:
    prep = preps[record["prepotential"]]
    p = record["point"]
    qpt = hkqk.QKChartPoint.make(
        np.asarray(p["x_re"]) + 1j * np.asarray(p["x_im"]), p["rho"], p["phi_tilde"],
        np.asarray(p["zeta_tilde"]), np.asarray(p["zeta"]),
    )
    c = record["c"]
    ppt = hkqk.lift_qk_point(prep, qpt, c)
    frame = rc.hk_frame(prep, ppt.base)
    data = hkqk.pipeline_data(prep, ppt, c)
    res = hkqk.qk_pipeline(prep, qpt, c)
    closed = fs_metric.deformed_fs_closed_form(prep, qpt, c)
    return {
        "g_n": frame.g.tolist(),
        "omega": [w.tolist() for w in frame.omega],
        "f": data.f,
        "f1": data.f1,
        "kernel_residual": data.kernel_residual,
        "sigma": res.sigma,
        "pipeline_metric": res.metric.tolist(),
        "closed_form": closed.tolist(),
    }


def cmd_emit_vectors(args, cfg: dict) -> int:
    run_cfg = build_run_config(cfg, args)
    if args.replay:
        stored = json.loads(Path(args.replay).read_text())
        preps = dict(run_cfg.prepotentials)
        worst = 0.0
        for record in stored["records"]:
            fresh = _recompute_outputs(record, preps)
            for key, val in record["outputs"].items():
                diff = np.max(np.abs(np.asarray(val, dtype=float) - np.asarray(fresh[key], dtype=float)))
                worst = max(worst, float(diff))
        print(f"replay max diff: {worst:.3e}")
        return 0 if worst == 0.0 else 1
    payload = golden_vectors(run_cfg, args.samples)
    _write_output(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", help="path to a key = value config file")
    common.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol-override", action="append", metavar="CHECK=VALUE",
                        help="override a check tolerance (repeatable)")
    common.add_argument("--family", choices=("quadratic", "cubic", "stu"))
    common.add_argument("--n", type=int, help="projective dimension of the prepotential")
    common.add_argument("--coefficients", help="cubic monomials 'mu,nu,la,value; ...' (1-based)")

    parser = argparse.ArgumentParser(prog="cmapqk", description=__doc__, allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str):
        return sub.add_parser(name, help=help_text, parents=[common], allow_abbrev=False)

    p = add("verify", "run the full verification suite")
    p.add_argument("--checks", help="comma-separated subset of checks")
    p.set_defaults(func=cmd_verify)

    p = add("eval-metric", "evaluate a metric at a chart point")
    p.add_argument("--space", required=True,
                   choices=("affine", "projective", "hk", "qk-pipeline", "fs", "fs-deformed", "uh"))
    p.add_argument("--point", required=True, help="comma-separated chart coordinates")
    p.add_argument("--c", type=float, help="deformation parameter")
    p.set_defaults(func=cmd_eval_metric)

    p = add("curvature", "finite-difference curvature report")
    p.add_argument("--space", required=True, choices=("uh", "ch1", "hk", "fs", "fs-deformed"))
    p.add_argument("--point", required=True)
    p.add_argument("--c", type=float)
    p.add_argument("--h", type=float, default=1e-3)
    p.set_defaults(func=cmd_curvature)

    p = add("signature-scan", "scan rho and compare signatures to the regime table")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--rho-range", required=True, metavar="LO:HI")
    p.add_argument("--steps", type=int, default=20)
    p.set_defaults(func=cmd_signature_scan)

    p = add("compare-paths", "pipeline vs closed form at sampled points")
    p.add_argument("--samples", type=int, default=10)
    p.set_defaults(func=cmd_compare_paths)

    p = add("curve-length", "incompleteness curve length")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--case", required=True, choices=("i-neg-branch", "ii", "iii"))
    p.set_defaults(func=cmd_curve_length)

    p = add("emit-vectors", "write (or replay) golden regression vectors")
    p.add_argument("--samples", type=int, default=3, help="points per (prepotential, c)")
    p.add_argument("--replay", help="existing vector file to recompute and diff")
    p.set_defaults(func=cmd_emit_vectors)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg: dict = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            print(f"error: config file not found: {path}", file=sys.stderr)
            return 2
        try:
            cfg = parse_config_text(path.read_text())
        except CmapQKError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    try:
        return args.func(args, cfg)
    except CmapQKError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
