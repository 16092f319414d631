"""The verification suite behind the `verify` command.

Each check samples deterministically (seeded per check), measures a residual
against its pinned tolerance and returns a CheckRecord; run_suite collects
them into a Report.  Tolerances and sample counts can be overridden per
check through RunConfig.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fs_metric, hkqk, rigid_cmap as rc, sampling, special_kahler as sk
from .prepotential import Prepotential
from .report import CheckRecord, Report
from .tensor_calc import (
    FormField,
    VectorField,
    curvature,
    einstein_check,
    exterior_derivative,
    lie_derivative_2tensor,
    lie_derivative_metric,
    signature,
)


@dataclass
class RunConfig:
    prepotentials: tuple[tuple[str, Prepotential], ...] = ()
    c_list: tuple[float, ...] = (-0.3, 0.0, 0.5)
    seed: int = 42
    samples: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    checks: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.prepotentials:
            self.prepotentials = tuple(sampling.builtin_prepotentials().items())

    def to_dict(self) -> dict:
        return {
            "prepotentials": [
                {"name": name, "family": prep.family, "n": prep.n} for name, prep in self.prepotentials
            ],
            "c_list": list(self.c_list),
            "seed": self.seed,
            "samples": dict(self.samples),
            "tolerances": {k: float(v) for k, v in self.tolerances.items()},
            "checks": None if self.checks is None else list(self.checks),
        }


@dataclass(frozen=True)
class CheckSpec:
    name: str
    tolerance: float
    samples: int
    runner: Callable


def _check_hk_algebra(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    worst = 0.0
    meta = {}
    sig_ok = True
    for name, prep in cfg.prepotentials:
        fam_worst = 0.0
        for _ in range(samples):
            z = sampling.sample_cone_point(prep, rng)
            zt, zc = sampling.sample_fibers(prep.dim, rng)
            frame = rc.hk_frame(prep, rc.CotangentPoint.make(z, zt, zc))
            fam_worst = max(fam_worst, frame.quaternion_residual())
            pos, neg, null = signature(frame.g, 1e-10)
            if (pos, neg, null) != (4, 4 * prep.n, 0):
                sig_ok = False
        meta[f"max_residual[{name}]"] = fam_worst
        worst = max(worst, fam_worst)
    meta["signature_ok"] = sig_ok
    return CheckRecord(
        name="hk_quaternion_algebra",
        anchor="J_a^2 = -Id, J1 J2 = J3, anticommutation; sig(g_N) = (4, 4n)",
        points=samples * len(cfg.prepotentials),
        max_residual=worst,
        tolerance=tol,
        passed=worst < tol and sig_ok,
        meta=meta,
    )


def _check_closedness(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    worst = 0.0
    meta = {}
    for name, prep in cfg.prepotentials:
        fields = rc.omega_form_fields(prep)
        fam_worst = 0.0
        for _ in range(samples):
            z = sampling.sample_cone_point(prep, rng)
            zt, zc = sampling.sample_fibers(prep.dim, rng)
            coords = rc.CotangentPoint.make(z, zt, zc).chart_coords()
            for form in fields:
                d = exterior_derivative(form, coords, h=1e-3, richardson=True)
                fam_worst = max(fam_worst, float(np.max(np.abs(d))))
        meta[f"max_residual[{name}]"] = fam_worst
        worst = max(worst, fam_worst)
    return CheckRecord(
        name="omega_closedness",
        anchor="d omega_a = 0 for the three Kahler forms",
        points=samples * len(cfg.prepotentials),
        max_residual=worst,
        tolerance=tol,
        passed=worst < tol,
        meta=meta,
    )


def _check_fiber_identity(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    worst = 0.0
    meta = {}
    for name, prep in cfg.prepotentials:
        fam_worst = 0.0
        for _ in range(samples):
            z = sampling.sample_cone_point(prep, rng)
            fam_worst = max(fam_worst, fs_metric.matrix_identity_residual(prep, z))
        meta[f"max_residual[{name}]"] = fam_worst
        worst = max(worst, fam_worst)
    return CheckRecord(
        name="fiber_matrix_identity",
        anchor="sum dp Hhat dp = -2 sum A N^-1 Abar + (4/r^2) |sum z^I A_I|^2",
        points=samples * len(cfg.prepotentials),
        max_residual=worst,
        tolerance=tol,
        passed=worst < tol,
        meta=meta,
    )


def _check_script_i(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    worst_gap = 0.0
    min_eig = np.inf
    for name, prep in cfg.prepotentials:
        for _ in range(samples):
            z = sampling.sample_cone_point(prep, rng)
            mats = fs_metric.special_matrices(prep, z)
            worst_gap = max(worst_gap, mats.i_inv_gap)
            min_eig = min(min_eig, mats.i_eigmin)
    return CheckRecord(
        name="script_i_inverse",
        anchor="I = Im calN positive definite; closed-form I^-1 matches direct solve",
        points=samples * len(cfg.prepotentials),
        max_residual=worst_gap,
        tolerance=tol,
        passed=worst_gap < tol and min_eig > 0.0,
        meta={"min_eigenvalue": float(min_eig)},
    )


def _check_two_path(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    worst = 0.0
    meta = {}
    for name, prep in cfg.prepotentials:
        for c in cfg.c_list:
            key_worst = 0.0
            for _ in range(samples):
                qpt = sampling.sample_qk_point(prep, c, rng)
                res = hkqk.qk_pipeline(prep, qpt, c)
                closed = fs_metric.deformed_fs_closed_form(prep, qpt, c)
                scale = max(1.0, float(np.max(np.abs(closed))))
                rel = float(np.max(np.abs(-2.0 * res.sigma * res.metric - closed))) / scale
                key_worst = max(key_worst, rel)
            meta[f"max_rel[{name},c={c:g}]"] = key_worst
            worst = max(worst, key_worst)
    return CheckRecord(
        name="two_path_agreement",
        anchor="-2 sigma g'(pipeline) equals the closed-form one-parameter family",
        points=samples * len(cfg.prepotentials) * len(cfg.c_list),
        max_residual=worst,
        tolerance=tol,
        passed=worst < tol,
        meta=meta,
    )


LIE_TOL = 1e-6


def _check_kernel(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    worst_kernel = 0.0
    worst_lie = 0.0
    rank_ok = True
    for name, prep in cfg.prepotentials:
        for c in cfg.c_list:
            for k in range(samples):
                z = sampling.sample_cone_point(prep, rng)
                zt, zc = sampling.sample_fibers(prep.dim, rng)
                ppt = hkqk.PChartPoint(rc.CotangentPoint.make(z, zt, zc), float(rng.uniform(-2, 2)))
                data = hkqk.pipeline_data(prep, ppt, c)
                worst_kernel = max(worst_kernel, data.kernel_residual)
                pos, neg, null = signature(data.gTilde, 1e-8)
                if null != 1:
                    rank_ok = False
                if k < 2:  # FD Lie derivative is the costly part
                    lie = lie_derivative_2tensor(
                        hkqk.gtilde_eval(prep, c), hkqk.z1p_field(prep, c), ppt.chart_coords()
                    )
                    worst_lie = max(worst_lie, float(np.max(np.abs(lie))))
    return CheckRecord(
        name="kernel_invariance",
        anchor="gtilde Z1 = 0 with corank exactly 1; L_{Z1} gtilde = 0",
        points=samples * len(cfg.prepotentials) * len(cfg.c_list),
        max_residual=worst_kernel,
        tolerance=tol,
        passed=worst_kernel < tol and rank_ok and worst_lie < LIE_TOL,
        meta={"lie_residual": worst_lie, "lie_tolerance": LIE_TOL, "rank_defect_one": rank_ok},
    )


EINSTEIN_C_VALUES = (0.0, 0.5)
UH_SCAL_TOL = 1e-2


def _check_einstein(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    cubics = [(name, prep) for name, prep in cfg.prepotentials if prep.family == "cubic"]
    meta = {}
    worst = 0.0
    passed = True
    points = 0
    for name, prep in cubics[:1]:
        for c in EINSTEIN_C_VALUES:
            field = fs_metric.deformed_fs_field(prep, c)
            pts = []
            lo = max(0.0, -2.0 * c)
            for _ in range(samples):
                x = sampling.sample_projective_point(prep, rng)
                rho = float(rng.uniform(lo + 0.4, lo + 2.2))
                zt, zc = sampling.sample_fibers(prep.dim, rng, half_width=1.0)
                pts.append(hkqk.QKChartPoint.make(x, rho, float(rng.uniform(-2, 2)), zt, zc).chart_coords())
            rec = einstein_check(field, pts, tol=tol)
            points += samples
            meta[f"scal[{name},c={c:g}]"] = rec.scal_values
            meta[f"spread[{name},c={c:g}]"] = rec.scal_spread
            worst = max(worst, rec.max_residual, rec.scal_spread)
            passed = passed and rec.passed and all(s < 0 for s in rec.scal_values)
    uh_rep = curvature(fs_metric.uh_metric_field(0.0), [1.0 + 0.2 * rng.random(), 0.1, 0.3, -0.2])
    meta["uh_scal"] = uh_rep.scal
    uh_ok = abs(uh_rep.scal + 24.0) < UH_SCAL_TOL
    points += 1
    return CheckRecord(
        name="einstein_property",
        anchor="Ric = (scal/dim) g with constant negative scal; 4d case scal = -24",
        points=points,
        max_residual=worst,
        tolerance=tol,
        passed=passed and uh_ok,
        noise_floor=uh_rep.noise_floor,
        meta=meta,
    )


SIGNATURE_REGIMES = ((-1.0, "positive_definite"), (-1.0, "indefinite_4n_4"), (1.0, "indefinite_4_4n"))


def _check_signature_table(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    mismatches = 0
    total = 0
    meta = {}
    for name, prep in cfg.prepotentials:
        for c, regime in SIGNATURE_REGIMES:
            for _ in range(samples):
                qpt = sampling.sample_qk_point(prep, c, rng, regime=regime)
                g = fs_metric.deformed_fs_closed_form(prep, qpt, c)
                pos, neg, null = signature(g, tol)
                epos, eneg, label = fs_metric.signature_expected(c, qpt.rho, prep.n)
                total += 1
                if (pos, neg, null) != (epos, eneg, 0) or label != regime:
                    mismatches += 1
        meta[f"regimes[{name}]"] = [r for _, r in SIGNATURE_REGIMES]
    return CheckRecord(
        name="signature_table",
        anchor="eigenvalue signature matches the (c, rho) regime table",
        points=total,
        max_residual=float(mismatches),
        tolerance=1.0,
        passed=mismatches == 0,
        meta=meta,
    )


KK_BLOCK_TOL = 1e-10


def _check_ch1(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    rep1 = curvature(fs_metric.ch1_metric_field(), [1.0, 0.0])
    rep2 = curvature(fs_metric.ch1_metric_field(), [2.2, 1.0])
    scal_dev = max(abs(rep1.scal + 8.0), abs(rep2.scal + 8.0))

    block_worst = 0.0
    for name, prep in cfg.prepotentials:
        for lam in (1, -1):
            for _ in range(samples):
                x = sampling.sample_projective_point(prep, rng)
                base = np.concatenate([np.real(x), np.imag(x)])
                breve = _breve_field(prep, lam)
                eta_b = _eta_breve(prep)
                rho = float(lam) * float(rng.uniform(0.4, 2.5))
                kk = hkqk.kk_metric_conical(breve, lam, 0.0, rho, 0.0, base, eta_b)
                model = np.zeros_like(kk)
                k = breve.dim
                model[:k, :k] = breve(base)
                model[k:, k:] = -float(lam) * fs_metric.ch1_metric(rho)
                block_worst = max(block_worst, float(np.max(np.abs(2.0 * kk - model))))
    return CheckRecord(
        name="ch1_normalization",
        anchor="scal(g_CH1) = -8; conical two-form reduction at c=0 splits off -+ g_CH1",
        points=2 + 2 * samples * len(cfg.prepotentials),
        max_residual=block_worst,
        tolerance=KK_BLOCK_TOL,
        passed=block_worst < KK_BLOCK_TOL and scal_dev < tol,
        noise_floor=max(rep1.noise_floor, rep2.noise_floor),
        meta={"scal_deviation": scal_dev, "scal_tolerance": tol},
    )


def _breve_field(prep: Prepotential, lam: int):
    from .tensor_calc import MetricField

    n = prep.n

    def func(coords: np.ndarray) -> np.ndarray:
        x = coords[:n] + 1j * coords[n:]
        return -float(lam) * sk.metric_projective(prep, x)

    return MetricField(dim=2 * n, func=func, name=f"breve(lam={lam})")


def _eta_breve(prep: Prepotential):
    n = prep.n

    def func(coords: np.ndarray) -> np.ndarray:
        x = coords[:n] + 1j * coords[n:]
        return -0.5 * sk.dc_kahler_potential(prep, x)

    return func


def _check_kk_restriction(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    worst = 0.0
    meta = {}
    total = 0
    for name, prep in cfg.prepotentials:
        n = prep.n
        idx = list(range(2 * n + 2))
        fam_worst = 0.0
        for c in cfg.c_list:
            for _ in range(samples):
                x = sampling.sample_projective_point(prep, rng)
                regime = sampling.admissible_regimes(c)[int(rng.integers(len(sampling.admissible_regimes(c))))]
                rho = sampling.sample_rho(c, regime, rng)
                qpt = hkqk.QKChartPoint.make(x, rho, float(rng.uniform(-2, 2)))
                g = fs_metric.deformed_fs_closed_form(prep, qpt, c)
                restricted = g[np.ix_(idx, idx)]
                base = np.concatenate([np.real(x), np.imag(x)])
                kk = hkqk.kk_metric_conical(_breve_field(prep, 1), 1, c, rho, qpt.phi_tilde, base, _eta_breve(prep))
                sigma = 1.0 if rho > 0 else -1.0
                fam_worst = max(fam_worst, float(np.max(np.abs(-2.0 * sigma * kk - restricted))))
                total += 1
        meta[f"max_residual[{name}]"] = fam_worst
        worst = max(worst, fam_worst)
    return CheckRecord(
        name="kk_restriction",
        anchor="deformed metric restricted to {zt = zc = 0} equals the conical two-form reduction",
        points=total,
        max_residual=worst,
        tolerance=tol,
        passed=worst < tol,
        meta=meta,
    )


HEISENBERG_C_VALUES = (-1.0, 0.0, 2.0)
BOUND_EIG_FLOOR = -1e-12


def _check_uh(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    worst_lie = 0.0
    fields = fs_metric.heisenberg_vector_fields()
    for c in HEISENBERG_C_VALUES:
        metric = fs_metric.uh_metric_field(c)
        lo, hi = sampling.regime_interval(c, "positive_definite")
        for _ in range(max(3, samples // 20)):
            pt = np.array(
                [rng.uniform(lo + 0.3, lo + 2.5), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)]
            )
            for vf in fields:
                lie = lie_derivative_metric(metric, vf, pt)
                worst_lie = max(worst_lie, float(np.max(np.abs(lie))))
    min_eig = np.inf
    for c in (0.5, 2.0):
        for _ in range(samples):
            pt = fs_metric.UHPoint(
                float(rng.uniform(0.05, 4.0)), float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)),
                float(rng.uniform(-2, 2)),
            )
            min_eig = min(min_eig, fs_metric.uh_half_bound_min_eig(c, pt))
    return CheckRecord(
        name="uh_isometries_bound",
        anchor="Heisenberg fields are Killing; g^c dominates half the undeformed metric for c > 0",
        points=2 * samples,
        max_residual=worst_lie,
        tolerance=tol,
        passed=worst_lie < tol and min_eig > BOUND_EIG_FLOOR,
        meta={"bound_min_eigenvalue": float(min_eig), "bound_floor": BOUND_EIG_FLOOR},
    )


INCOMPLETENESS_CASES = (("i-neg-branch", 1.0), ("ii", -1.0), ("iii", -1.0))


def _check_incompleteness(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    worst_rel = 0.0
    meta = {}
    ok = True
    for case, c in INCOMPLETENESS_CASES:
        length, rec = fs_metric.incompleteness_curve_length(c, case, rel_tol=tol, initial_panels=4)
        length2, _ = fs_metric.incompleteness_curve_length(c, case, rel_tol=tol, initial_panels=8)
        rel = abs(length - length2) / max(abs(length), 1e-30)
        worst_rel = max(worst_rel, rel)
        meta[f"length[{case},c={c:g}]"] = length
        ok = ok and rec.converged and np.isfinite(length) and length > 0
    return CheckRecord(
        name="incompleteness_lengths",
        anchor="boundary-reaching radial curves have finite length (mesh-doubling stable)",
        points=len(INCOMPLETENESS_CASES),
        max_residual=worst_rel,
        tolerance=tol,
        passed=ok and worst_rel < tol,
        meta=meta,
    )


CP_C_VALUES = (-1.0, 0.0, 1.0)


def _check_cp(cfg: RunConfig, rng, tol: float, samples: int) -> CheckRecord:
    rs = np.linspace(0.1, 10.0, samples)
    worst = 0.0
    for c in CP_C_VALUES:
        for r in rs:
            worst = max(worst, fs_metric.cp_eigenfunction_residual(float(r), 0.0, c))
    return CheckRecord(
        name="cp_eigenfunction",
        anchor="r^2 F_rr = (3/4) F for F = (r^2 - c)/sqrt(r) on the half-plane",
        points=len(CP_C_VALUES) * samples,
        max_residual=worst,
        tolerance=tol,
        passed=worst < tol,
        meta={"grid": [0.1, 10.0]},
    )


REGISTRY: tuple[CheckSpec, ...] = (
    CheckSpec("hk_quaternion_algebra", 1e-11, 100, _check_hk_algebra),
    CheckSpec("omega_closedness", 1e-6, 20, _check_closedness),
    CheckSpec("fiber_matrix_identity", 1e-10, 100, _check_fiber_identity),
    CheckSpec("script_i_inverse", 1e-11, 100, _check_script_i),
    CheckSpec("two_path_agreement", 1e-9, 50, _check_two_path),
    CheckSpec("kernel_invariance", 1e-10, 8, _check_kernel),
    CheckSpec("einstein_property", 1e-3, 5, _check_einstein),
    CheckSpec("signature_table", 1e-8, 30, _check_signature_table),
    CheckSpec("ch1_normalization", 1e-6, 3, _check_ch1),
    CheckSpec("kk_restriction", 1e-10, 5, _check_kk_restriction),
    CheckSpec("uh_isometries_bound", 1e-8, 100, _check_uh),
    CheckSpec("incompleteness_lengths", 1e-8, 1, _check_incompleteness),
    CheckSpec("cp_eigenfunction", 1e-12, 50, _check_cp),
)

CHECK_NAMES = tuple(spec.name for spec in REGISTRY)


def run_suite(cfg: RunConfig) -> Report:
    report = Report(seed=cfg.seed, config=cfg.to_dict())
    for idx, spec in enumerate(REGISTRY):
        if cfg.checks is not None and spec.name not in cfg.checks:
            continue
        rng = np.random.default_rng([cfg.seed, idx])
        tol = float(cfg.tolerances.get(spec.name, spec.tolerance))
        samples = int(cfg.samples.get(spec.name, spec.samples))
        report.checks.append(spec.runner(cfg, rng, tol, samples))
    return report
