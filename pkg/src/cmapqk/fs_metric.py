"""Closed-form quaternionic metrics: the c-map metric, its one-parameter
deformation, the fiber matrices, and the four-dimensional special case.

Chart for the quaternionic base: (Re X, Im X, rho, phit, zt_I, zc^I); the
four-dimensional chart is (rho, phit, zt0, zc0).  sigma = sign(rho) is always
computed, never assumed; constructors report it where it matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArgumentError, ConditioningError, DomainError
from .hkqk import HAMILTONIAN_MARGIN, QKChartPoint, check_admissible
from .prepotential import Prepotential, eval_jet
from . import special_kahler as sk
from .realform import (
    hermitian_pairing_to_real,
    hermitian_to_real_metric,
    outer_sym,
    sym,
    wirtinger_to_dc,
)
from .rigid_cmap import fiber_metric_block
from .tensor_calc import MetricField, QuadratureRecord, VectorField, curve_length


# ---------------------------------------------------------------------------
# fiber matrices


@dataclass(frozen=True)
class SpecialMatrices:
    """calN = R + i I and derived blocks at a cone point (degree-0 data)."""

    calN: np.ndarray
    I_mat: np.ndarray
    R_mat: np.ndarray
    I_inv: np.ndarray
    I_inv_solve: np.ndarray
    Hhat: np.ndarray
    i_inv_gap: float
    i_eigmin: float


def special_matrices_from_data(data: sk.ConeData) -> SpecialMatrices:
    zz = data.z
    nn = data.nn
    nz = nn @ zz
    denom = zz @ nz
    if abs(denom) < 1e-12 * max(1.0, float(np.max(np.abs(nn)))) * float(np.vdot(zz, zz).real):
        raise ConditioningError("z^T N z is numerically degenerate at this point")
    caln = np.conj(data.jet.hess) + 1j * np.outer(nz, nz) / denom
    i_mat = sym(np.imag(caln))
    r_mat = sym(np.real(caln))
    m = zz.shape[0]
    ninv = np.linalg.solve(nn, np.eye(m))
    i_inv = sym(-2.0 * ninv + (4.0 / data.r2) * np.real(np.outer(zz, np.conj(zz))))
    i_inv_solve = sym(np.linalg.solve(i_mat, np.eye(m)))
    gap = float(np.max(np.abs(i_inv - i_inv_solve)))
    ir = i_inv @ r_mat
    hhat = sym(np.block([[i_inv, ir], [ir.T, i_mat + r_mat @ ir]]))
    eigmin = float(np.min(np.linalg.eigvalsh(i_mat)))
    return SpecialMatrices(caln, i_mat, r_mat, i_inv, i_inv_solve, hhat, gap, eigmin)


def special_matrices(prep: Prepotential, z: Sequence[complex]) -> SpecialMatrices:
    """Assemble calN, I, R, both I^-1 routes and the block matrix Hhat.

    calN = conj(F_IJ) + i (N z)(N z)^T / (z^T N z); the closed-form inverse is
    I^-1 = -2 N^-1 + (2 / z^T N zbar)(z zbar^T + zbar z^T), compared against a
    direct solve.
    """
    return special_matrices_from_data(sk.cone_data(prep, z))


def matrix_identity_residual(prep: Prepotential, z: Sequence[complex]) -> float:
    """Defect of sum dp Hhat dp = -2 sum A N^-1 Abar + (4/r^2) |sum z^I A_I|^2.

    Both sides are realised as real (2n+2) x (2n+2) matrices in the fiber
    coordinates (zt, zc); the two routes share no linear algebra beyond N.
    """
    data = sk.cone_data(prep, z)
    lhs = special_matrices_from_data(data).Hhat
    w = np.concatenate([data.z, data.jet.grad])  # fiber components of sum z^I A_I
    rhs = -2.0 * fiber_metric_block(data.nn, data.rr) + (4.0 / data.r2) * hermitian_pairing_to_real(w)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# closed-form quaternionic metrics


def deformed_fs_closed_form(prep: Prepotential, qpt: QKChartPoint, c: float) -> np.ndarray:
    """The one-parameter family of quaternionic metrics, as a real matrix.

    Terms: warped base metric (rho+c)/rho g_Mbar; the drho^2 term; the
    connection term with the c d^c K shift; the Hhat fiber term; and the
    c-dependent rank-one fiber term (2c/rho^2) e^K |X^I dzt_I + F_I dzc^I|^2.
    """
    rho = qpt.rho
    check_admissible(c, rho)
    n = prep.n
    m = n + 1
    dim = 4 * m
    i_rho, i_phit, i_fib = 2 * n, 2 * n + 1, 2 * n + 2

    lift = sk.lift_projective(prep, qpt.x)
    data = sk.cone_data(prep, lift)

    g = np.zeros((dim, dim))
    if n:
        gbar = hermitian_to_real_metric(sk.projective_hermitian_from_data(data))
        g[:2 * n, :2 * n] = ((rho + c) / rho) * gbar

    g[i_rho, i_rho] = (rho + 2.0 * c) / (rho + c) / (4.0 * rho**2)

    theta = np.zeros(dim)
    theta[i_phit] = 1.0
    theta[i_fib:i_fib + m] = qpt.zeta
    theta[i_fib + m:] = -qpt.zeta_tilde
    if n:
        theta[:2 * n] = c * wirtinger_to_dc(sk.kgrad_from_data(data))
    g += (rho + c) / (rho + 2.0 * c) / (4.0 * rho**2) * outer_sym(theta)

    mats = special_matrices_from_data(data)
    g[i_fib:, i_fib:] += mats.Hhat / (2.0 * rho)

    w = np.concatenate([lift, data.jet.grad])
    g[i_fib:, i_fib:] += (2.0 * c / rho**2) * hermitian_pairing_to_real(w) / data.r2
    return sym(g)


def fs_closed_form(prep: Prepotential, qpt: QKChartPoint) -> np.ndarray:
    """The undeformed c-map metric (c = 0); requires rho > 0."""
    if qpt.rho <= 0.0:
        raise DomainError("rho must be positive for the undeformed metric")
    return deformed_fs_closed_form(prep, qpt, 0.0)


def deformed_fs_field(prep: Prepotential, c: float) -> MetricField:
    """Metric field over the quaternionic chart, for the curvature engine."""
    n = prep.n
    dim = 4 * (n + 1)

    def domain(coords: np.ndarray) -> bool:
        qpt = QKChartPoint.from_chart(coords, n)
        if qpt.rho + c <= 0.0 or abs(qpt.rho) < HAMILTONIAN_MARGIN:
            return False
        if abs(qpt.rho + 2.0 * c) < HAMILTONIAN_MARGIN:
            return False
        return sk.in_cone_domain(prep, sk.lift_projective(prep, qpt.x))

    return MetricField(
        dim=dim,
        func=lambda coords: deformed_fs_closed_form(prep, QKChartPoint.from_chart(coords, n), c),
        domain=domain,
        name=f"g_FS^c[{prep.family} n={n}, c={c}]",
    )


def signature_expected(c: float, rho: float, n: int) -> tuple[int, int, str]:
    """Expected (positive, negative) counts of the deformed metric.

    (4n+4, 0) for rho > max(0, -2c); (4n, 4) on the band -c < rho < -2c of a
    negative c; (4, 4n) on -c < rho < 0 of a positive c.
    """
    if rho + c <= 0.0:
        raise DomainError(f"rho + c = {rho + c:g} must be positive")
    if abs(rho) < HAMILTONIAN_MARGIN or abs(rho + 2.0 * c) < HAMILTONIAN_MARGIN:
        raise ArgumentError("rho lies on a boundary locus (rho = 0 or rho = -2c)")
    if rho > max(0.0, -2.0 * c):
        return (4 * n + 4, 0, "positive_definite")
    if c < 0.0 and -c < rho < -2.0 * c:
        return (4 * n, 4, "indefinite_4n_4")
    if c > 0.0 and -c < rho < 0.0:
        return (4, 4 * n, "indefinite_4_4n")
    raise ArgumentError(f"no signature regime contains (c, rho) = ({c:g}, {rho:g})")


# ---------------------------------------------------------------------------
# the four-dimensional case (point base)


@dataclass(frozen=True)
class UHPoint:
    rho: float
    phi_tilde: float = 0.0
    zeta_tilde0: float = 0.0
    zeta0: float = 0.0

    def coords(self) -> np.ndarray:
        return np.array([self.rho, self.phi_tilde, self.zeta_tilde0, self.zeta0])

    @classmethod
    def from_coords(cls, coords: Sequence[float]) -> "UHPoint":
        rho, phit, zt, zc = np.asarray(coords, dtype=float)
        return cls(float(rho), float(phit), float(zt), float(zc))


def _check_uh(c: float, rho: float) -> None:
    if rho + c <= 0.0:
        raise DomainError(f"rho + c = {rho + c:g} must be positive")
    if abs(rho) < HAMILTONIAN_MARGIN or abs(rho + 2.0 * c) < HAMILTONIAN_MARGIN:
        raise DomainError("rho on a pole locus (rho = 0 or rho = -2c)")


def uh_metric(c: float, pt: UHPoint) -> np.ndarray:
    """One-loop four-dimensional metric in the chart (rho, phit, zt0, zc0).

    (1/4 rho^2) [ (rho+2c)/(rho+c) drho^2
                  + (rho+c)/(rho+2c) (dphit + zc0 dzt0 - zt0 dzc0)^2
                  + 2 (rho+2c) (dzt0^2 + dzc0^2) ].
    """
    rho = pt.rho
    _check_uh(c, rho)
    g = np.zeros((4, 4))
    g[0, 0] = (rho + 2.0 * c) / (rho + c)
    theta = np.array([0.0, 1.0, pt.zeta0, -pt.zeta_tilde0])
    g += (rho + c) / (rho + 2.0 * c) * outer_sym(theta)
    g[2, 2] += 2.0 * (rho + 2.0 * c)
    g[3, 3] += 2.0 * (rho + 2.0 * c)
    return g / (4.0 * rho**2)


def uh_metric_field(c: float, sign: int = 1) -> MetricField:
    def domain(coords: np.ndarray) -> bool:
        rho = coords[0]
        return rho + c > 0.0 and abs(rho) > 0.0 and abs(rho + 2.0 * c) > 0.0

    return MetricField(
        dim=4,
        func=lambda coords: float(sign) * uh_metric(c, UHPoint.from_coords(coords)),
        domain=domain,
        name=f"g_UH^c[c={c}]" if sign == 1 else f"-g_UH^c[c={c}]",
    )


def uh_half_bound_min_eig(c: float, pt: UHPoint) -> float:
    """Smallest eigenvalue of g_UH^c - (1/2) g_UH^0 (nonnegative for c>0, rho>0)."""
    diff = uh_metric(c, pt) - 0.5 * uh_metric(0.0, pt)
    return float(np.min(np.linalg.eigvalsh(sym(diff))))


def heisenberg_fields(pt: UHPoint) -> np.ndarray:
    """The three nilpotent Killing directions, one per row."""
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [0.0, pt.zeta0, 1.0, 0.0],
            [0.0, -pt.zeta_tilde0, 0.0, 1.0],
        ]
    )


def heisenberg_vector_fields() -> tuple[VectorField, VectorField, VectorField]:
    def make(i: int) -> VectorField:
        return VectorField(
            dim=4,
            func=lambda coords: heisenberg_fields(UHPoint.from_coords(coords))[i],
            name=f"heisenberg_{i}",
        )

    return make(0), make(1), make(2)


def ch1_metric(rho: float, phi_tilde: float = 0.0) -> np.ndarray:
    """Hyperbolic-line metric (drho^2 + dphit^2) / (4 rho^2), scal = -8."""
    if rho == 0.0:
        raise DomainError("rho must be nonzero")
    return np.eye(2) / (4.0 * rho**2)


def ch1_metric_field() -> MetricField:
    return MetricField(
        dim=2,
        func=lambda coords: ch1_metric(coords[0], coords[1]),
        domain=lambda coords: coords[0] > 0.0,
        name="g_CH1",
    )


# ---------------------------------------------------------------------------
# incompleteness curve lengths


_CASES = ("i-neg-branch", "ii", "iii")


def incompleteness_curve_length(
    c: float,
    case: str,
    rel_tol: float = 1e-8,
    initial_panels: int = 4,
) -> tuple[float, QuadratureRecord]:
    """Length of the boundary-reaching radial curve for the stated case.

    Cases "i-neg-branch" (c > 0) and "iii" (c < 0) use rho = t - c on
    (0, |c|/2); case "ii" (c < 0) uses rho = t - 2c on (0, 1).  Fibers and
    phit stay at zero; the t = u^2 substitution removes the sqrt(t) endpoint
    behaviour.
    """
    if case not in _CASES:
        raise ArgumentError(f"case must be one of {_CASES}")
    if c == 0.0:
        raise ArgumentError("the incompleteness cases need c != 0")
    if case == "i-neg-branch":
        if c <= 0.0:
            raise ArgumentError("case i needs c > 0")
        shift, t_hi, sign = -c, abs(c) / 2.0, 1
    elif case == "ii":
        if c >= 0.0:
            raise ArgumentError("case ii needs c < 0")
        shift, t_hi, sign = -2.0 * c, 1.0, 1
    else:
        if c >= 0.0:
            raise ArgumentError("case iii needs c < 0")
        shift, t_hi, sign = -c, abs(c) / 2.0, -1

    field = uh_metric_field(c, sign=sign)

    def curve(t: float) -> np.ndarray:
        return np.array([t + shift, 0.0, 0.0, 0.0])

    def deriv(t: float) -> np.ndarray:
        return np.array([1.0, 0.0, 0.0, 0.0])

    rec = curve_length(
        field,
        curve,
        0.0,
        t_hi,
        derivative=deriv,
        rel_tol=rel_tol,
        singular_end="left",
        initial_panels=initial_panels,
    )
    return rec.value, rec


# ---------------------------------------------------------------------------
# the hyperbolic eigenfunction behind the four-dimensional family


def cp_eigenfunction_residual(r: float, eta: float, c: float) -> float:
    """Residual of r^2 d^2F/dr^2 = (3/4) F for F(r) = (r^2 - c) / sqrt(r).

    F is independent of eta, so the half-plane Laplacian r^2 (d_r^2 + d_eta^2)
    reduces to r^2 d_r^2; the exact second derivative is used.
    """
    if r <= 0.0:
        raise DomainError("r must be positive")
    f_val = (r * r - c) / np.sqrt(r)
    f_rr = 0.75 * r ** (-0.5) - 0.75 * c * r ** (-2.5)
    return float(abs(r * r * f_rr - 0.75 * f_val))
