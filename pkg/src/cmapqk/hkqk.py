"""The HK/QK pipeline over the c-map chart, and its two-form K/K variants.

On the trivial circle bundle P = N x S^1 (chart: cotangent chart + s, with s
on the universal cover) the pipeline builds, for a Hamiltonian parameter c,

    f = r^2 - c,   f1 = -r^2 - c,
    eta = ds - (r^2/2) eta~ + eta_can,
    g_P = (2/f1) eta^2 + g_N,
    gtilde = g_P - (2/f) sum_a (theta_a)^2,

whose kernel is spanned by Z1 = Z - c d_s.  Restricting to the transversal
{arg z^0 = 0} and rescaling by 1/(2|f|) produces the quaternionic metric in
the chart (Re X, Im X, rho, phit, zt, zc) with rho = f and phit = -4 s.

Everything here is assembled exactly from prepotential jets; no finite
differences enter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError, DomainError, SingularHamiltonianError
from .prepotential import Prepotential, eval_jet
from . import rigid_cmap as rc
from . import special_kahler as sk
from .realform import outer_sym
from .tensor_calc import MetricField, VectorField

HAMILTONIAN_MARGIN = 1e-10


@dataclass(frozen=True)
class PChartPoint:
    """Point of P = N x S^1: cotangent point plus the fiber coordinate s."""

    base: rc.CotangentPoint
    s: float = 0.0

    def chart_coords(self) -> np.ndarray:
        return np.concatenate([self.base.chart_coords(), [self.s]])

    @classmethod
    def from_chart(cls, coords: Sequence[float]) -> "PChartPoint":
        coords = np.asarray(coords, dtype=float)
        return cls(rc.CotangentPoint.from_chart(coords[:-1]), float(coords[-1]))


@dataclass(frozen=True)
class QKChartPoint:
    """Point of the quaternionic base chart (X, rho, phit, zt, zc)."""

    x: np.ndarray
    rho: float
    phi_tilde: float
    zeta_tilde: np.ndarray
    zeta: np.ndarray

    @classmethod
    def make(cls, x, rho, phi_tilde=0.0, zeta_tilde=None, zeta=None) -> "QKChartPoint":
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        m = x.shape[0] + 1
        zt = np.zeros(m) if zeta_tilde is None else np.asarray(zeta_tilde, dtype=float)
        zc = np.zeros(m) if zeta is None else np.asarray(zeta, dtype=float)
        if zt.shape != (m,) or zc.shape != (m,):
            raise ArgumentError("fiber coordinates must have length n+1")
        return cls(x, float(rho), float(phi_tilde), zt, zc)

    def chart_coords(self) -> np.ndarray:
        return np.concatenate(
            [np.real(self.x), np.imag(self.x), [self.rho, self.phi_tilde], self.zeta_tilde, self.zeta]
        )

    @classmethod
    def from_chart(cls, coords: Sequence[float], n: int) -> "QKChartPoint":
        coords = np.asarray(coords, dtype=float)
        m = n + 1
        if coords.shape != (4 * m,):
            raise ArgumentError(f"qk chart point needs {4 * m} coordinates")
        x = coords[:n] + 1j * coords[n:2 * n]
        return cls(x, coords[2 * n], coords[2 * n + 1], coords[2 * n + 2:2 * n + 2 + m].copy(),
                   coords[2 * n + 2 + m:].copy())


@dataclass(frozen=True)
class PipelineData:
    """All pipeline quantities at one point of P."""

    f: float
    f1: float
    theta: np.ndarray      # (4, dim P)
    gP: np.ndarray
    gTilde: np.ndarray
    z1p: np.ndarray
    kernel_residual: float


def check_admissible(c: float, rho: float) -> None:
    """rho != 0, rho + c > 0 and rho + 2c != 0, with the pole margin."""
    if rho + c <= 0.0:
        raise DomainError(f"rho + c = {rho + c:g} must be positive (r^2 > 0)")
    if abs(rho) < HAMILTONIAN_MARGIN:
        raise SingularHamiltonianError("rho = f vanishes")
    if abs(rho + 2.0 * c) < HAMILTONIAN_MARGIN:
        raise SingularHamiltonianError("rho + 2c = -f1 vanishes")


def hamiltonians(prep: Prepotential, pt: rc.CotangentPoint, c: float) -> tuple[float, float]:
    """Moment map f = r^2 - c for -omega_1 and f1 = f - g_N(Z, Z)/2 = -r^2 - c."""
    z = sk.check_cone_point(prep, pt.z)
    r2 = sk.cone_radius_sq(prep, z)
    f = r2 - c
    f1 = -r2 - c
    if abs(f) < HAMILTONIAN_MARGIN or abs(f1) < HAMILTONIAN_MARGIN:
        raise SingularHamiltonianError(f"f = {f:g}, f1 = {f1:g} too close to zero")
    return f, f1


def _base_data(prep: Prepotential, pt: rc.CotangentPoint):
    z = sk.check_cone_point(prep, pt.z)
    nn = sk.n_matrix(prep, z)
    r2 = sk.cone_radius_sq(prep, z)
    return z, nn, r2


def eta_covector(prep: Prepotential, ppt: PChartPoint) -> np.ndarray:
    """Connection eta = ds + eta_N in the P chart (s component last)."""
    eta_n = rc.eta_n_covector(prep, ppt.base)
    return np.concatenate([eta_n, [1.0]])


def theta_forms(prep: Prepotential, ppt: PChartPoint, c: float) -> np.ndarray:
    """The four one-forms theta_0..theta_3 as rows, in the P chart."""
    pt = ppt.base
    z, nn, r2 = _base_data(prep, pt)
    m = prep.dim
    x, y = np.real(z), np.imag(z)
    dim = 4 * m + 1
    th = np.zeros((4, dim))
    # theta_0 = -(1/2) d(r^2)
    th[0, :2 * m] = -0.5 * sk.radius_differential(prep, z)
    # theta_1 = ds + (r^2/2) eta~ + eta_can
    th[1, :m] = -0.5 * (nn @ y)
    th[1, m:2 * m] = 0.5 * (nn @ x)
    th[1, 2 * m:3 * m] = -0.25 * pt.zeta
    th[1, 3 * m:4 * m] = 0.25 * pt.zeta_tilde
    th[1, -1] = 1.0
    # theta_2 = -Im sum z^I A_I, theta_3 = Re sum z^I A_I; Euler gives
    # sum z^I A_I = sum z^I dzt_I + sum F_J dzc^J
    grad = eval_jet(prep, z, order=1).grad
    th[2, 2 * m:3 * m] = -np.imag(z)
    th[2, 3 * m:4 * m] = -np.imag(grad)
    th[3, 2 * m:3 * m] = np.real(z)
    th[3, 3 * m:4 * m] = np.real(grad)
    return th


def gP_metric(prep: Prepotential, ppt: PChartPoint, c: float) -> np.ndarray:
    """g_P = (2/f1) eta^2 + g_N on the P chart."""
    _, f1 = hamiltonians(prep, ppt.base, c)
    eta = eta_covector(prep, ppt)
    g_n = rc.metric_matrix(prep, ppt.base)
    dim = g_n.shape[0] + 1
    g = np.zeros((dim, dim))
    g[:-1, :-1] = g_n
    return g + (2.0 / f1) * outer_sym(eta)


def gtilde(prep: Prepotential, ppt: PChartPoint, c: float) -> np.ndarray:
    """Degenerate tensor gtilde = g_P - (2/f) sum_a theta_a^2."""
    f, _ = hamiltonians(prep, ppt.base, c)
    g = gP_metric(prep, ppt, c)
    th = theta_forms(prep, ppt, c)
    for a in range(4):
        g -= (2.0 / f) * outer_sym(th[a])
    return g


def z1p_vector(prep: Prepotential, ppt: PChartPoint, c: float) -> np.ndarray:
    """Kernel field Z1 = Z - c d_s in the P chart."""
    zv = rc.rotating_killing_field(prep, ppt.base)
    return np.concatenate([zv, [-c]])


def pipeline_data(prep: Prepotential, ppt: PChartPoint, c: float) -> PipelineData:
    f, f1 = hamiltonians(prep, ppt.base, c)
    gt = gtilde(prep, ppt, c)
    z1 = z1p_vector(prep, ppt, c)
    return PipelineData(
        f=f,
        f1=f1,
        theta=theta_forms(prep, ppt, c),
        gP=gP_metric(prep, ppt, c),
        gTilde=gt,
        z1p=z1,
        kernel_residual=float(np.max(np.abs(gt @ z1))),
    )


# ---------------------------------------------------------------------------
# restriction to the transversal {arg z^0 = 0} and the quaternionic chart


def lift_qk_point(prep: Prepotential, qpt: QKChartPoint, c: float) -> PChartPoint:
    """Lift to P through the chart {arg z^0 = 0}: z^0 = r e^{K/2} > 0, s = -phit/4."""
    check_admissible(c, qpt.rho)
    r2 = qpt.rho + c
    kpot = sk.kahler_potential(prep, qpt.x)
    z0 = np.sqrt(r2) * np.exp(0.5 * kpot)
    z = z0 * sk.lift_projective(prep, qpt.x)
    base = rc.CotangentPoint.make(z, qpt.zeta_tilde, qpt.zeta)
    return PChartPoint(base, -0.25 * qpt.phi_tilde)


def embedding_jacobian(prep: Prepotential, qpt: QKChartPoint, c: float) -> np.ndarray:
    """Differential of the lift, as a (dim P) x (dim QK chart) matrix.

    Columns follow (Re X, Im X, rho, phit, zt, zc); rows follow the P chart.
    The base depends on the QK coordinates through
    z^I = sqrt(rho + c) e^{K(X)/2} X^I (X^0 = 1).
    """
    n = prep.n
    m = n + 1
    r2 = qpt.rho + c
    kpot = sk.kahler_potential(prep, qpt.x)
    kgrad = sk.kahler_potential_gradient(prep, qpt.x)
    z0 = np.sqrt(r2) * np.exp(0.5 * kpot)
    lift = sk.lift_projective(prep, qpt.x)
    z = z0 * lift

    dim_p = 4 * m + 1
    dim_q = 4 * m
    e = np.zeros((dim_p, dim_q))

    dz = np.zeros((m, dim_q), dtype=complex)
    for mu in range(n):
        dz0_du = z0 * np.real(kgrad[mu])
        dz0_dv = -z0 * np.imag(kgrad[mu])
        dz[:, mu] = dz0_du * lift
        dz[:, n + mu] = dz0_dv * lift
        dz[mu + 1, mu] += z0
        dz[mu + 1, n + mu] += 1j * z0
    dz[:, 2 * n] = lift * z0 / (2.0 * r2)  # d/d rho

    e[:m, :dim_q] = np.real(dz)
    e[m:2 * m, :dim_q] = np.imag(dz)
    e[2 * m:3 * m, 2 * n + 2:2 * n + 2 + m] = np.eye(m)
    e[3 * m:4 * m, 2 * n + 2 + m:] = np.eye(m)
    e[-1, 2 * n + 1] = -0.25  # s = -phit/4
    return e


@dataclass(frozen=True)
class QKPipelineResult:
    metric: np.ndarray
    sigma: int
    f: float
    f1: float
    kernel_residual: float
    chart: sk.RealChart


def qk_pipeline(prep: Prepotential, qpt: QKChartPoint, c: float) -> QKPipelineResult:
    """g' = (1/2|f|) gtilde pulled back to the transversal, plus metadata."""
    ppt = lift_qk_point(prep, qpt, c)
    data = pipeline_data(prep, ppt, c)
    emb = embedding_jacobian(prep, qpt, c)
    gprime = (emb.T @ data.gTilde @ emb) / (2.0 * abs(data.f))
    return QKPipelineResult(
        metric=0.5 * (gprime + gprime.T),
        sigma=1 if data.f > 0 else -1,
        f=data.f,
        f1=data.f1,
        kernel_residual=data.kernel_residual,
        chart=sk.quaternionic_chart(prep.n),
    )


def qk_metric_pipeline(prep: Prepotential, qpt: QKChartPoint, c: float) -> np.ndarray:
    return qk_pipeline(prep, qpt, c).metric


# ---------------------------------------------------------------------------
# callback fields over the P chart (for invariance checks)


def gtilde_eval(prep: Prepotential, c: float) -> Callable[[np.ndarray], np.ndarray]:
    def func(coords: np.ndarray) -> np.ndarray:
        return gtilde(prep, PChartPoint.from_chart(coords), c)

    return func


def z1p_field(prep: Prepotential, c: float) -> VectorField:
    dim = 4 * prep.dim + 1

    def func(coords: np.ndarray) -> np.ndarray:
        return z1p_vector(prep, PChartPoint.from_chart(coords), c)

    return VectorField(dim=dim, func=func, name="Z1")


# ---------------------------------------------------------------------------
# K/K correspondence: generic two-form variant and the conical closed form


@dataclass(frozen=True)
class KahlerHamiltonianData:
    """Kahler manifold with Hamiltonian Killing data, as exact callbacks.

    `connection` is the potential eta_0 of the principal connection
    eta = ds + eta_0, with d eta_0 = omega - d(g Z)/2; `d_hamiltonian` is the
    exact differential of the Hamiltonian (before the shift by c).
    """

    dim: int
    metric: Callable[[np.ndarray], np.ndarray]
    omega: Callable[[np.ndarray], np.ndarray]
    z_field: Callable[[np.ndarray], np.ndarray]
    hamiltonian: Callable[[np.ndarray], float]
    d_hamiltonian: Callable[[np.ndarray], np.ndarray]
    connection: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class KKGenericResult:
    f: float
    f1: float
    gTilde: np.ndarray
    zP: np.ndarray
    kernel_residual: float


def kk_metric_generic(data: KahlerHamiltonianData, base_pt: Sequence[float], c: float) -> KKGenericResult:
    """Degenerate tensor of the two-form variant on P = M x S^1 (s last)."""
    pt = np.asarray(base_pt, dtype=float)
    g = np.asarray(data.metric(pt), dtype=float)
    zv = np.asarray(data.z_field(pt), dtype=float)
    f = float(data.hamiltonian(pt)) - c
    f1 = f - 0.5 * float(zv @ g @ zv)
    if abs(f) < HAMILTONIAN_MARGIN or abs(f1) < HAMILTONIAN_MARGIN:
        raise SingularHamiltonianError(f"f = {f:g}, f1 = {f1:g} too close to zero")
    eta0 = np.asarray(data.connection(pt), dtype=float)
    eta = np.concatenate([eta0, [1.0]])
    beta = g @ zv
    theta0 = np.concatenate([-0.5 * np.asarray(data.d_hamiltonian(pt), dtype=float), [0.0]])
    theta1 = eta + 0.5 * np.concatenate([beta, [0.0]])
    dim = data.dim + 1
    gp = np.zeros((dim, dim))
    gp[:-1, :-1] = g
    gp += (2.0 / f1) * outer_sym(eta)
    gt = gp - (2.0 / f) * (outer_sym(theta0) + outer_sym(theta1))
    zp = np.concatenate([zv, [f1 - float(eta0 @ zv)]])
    return KKGenericResult(f, f1, gt, zp, float(np.max(np.abs(gt @ zp))))


def kk_reduce(gtilde_matrix: np.ndarray, f: float, embedding: np.ndarray) -> np.ndarray:
    """Reduced metric (1/2|f|) gtilde restricted along an embedding Jacobian."""
    out = (embedding.T @ gtilde_matrix @ embedding) / (2.0 * abs(f))
    return 0.5 * (out + out.T)


def conical_kahler_input(prep: Prepotential, lam: int = 1) -> KahlerHamiltonianData:
    """The special Kahler cone (lam=+1) or its negative (lam=-1) as K/K input.

    Hamiltonian f_0 = lam r^2 for Z = 2 J xi; connection eta_0 = -(1/4) g(Z, .),
    which satisfies d eta_0 = omega - d(g Z)/2 because d g(Z,.) = 4 omega on a
    cone.
    """
    if lam not in (1, -1):
        raise ArgumentError("lam must be +1 or -1")
    m = prep.dim

    def to_z(coords: np.ndarray) -> np.ndarray:
        return coords[:m] + 1j * coords[m:]

    def metric(coords):
        return float(lam) * sk.metric_affine(prep, to_z(coords))

    def omega(coords):
        z = sk.check_cone_point(prep, to_z(coords))
        nn = sk.n_matrix(prep, z)
        w = np.zeros((2 * m, 2 * m))
        w[:m, m:] = nn
        w = w - w.T
        return float(lam) * w

    def z_field(coords):
        z = to_z(coords)
        return np.concatenate([-2.0 * np.imag(z), 2.0 * np.real(z)])

    def hamiltonian(coords):
        return float(lam) * sk.cone_radius_sq(prep, to_z(coords))

    def d_hamiltonian(coords):
        return float(lam) * sk.radius_differential(prep, to_z(coords))

    def connection(coords):
        z = sk.check_cone_point(prep, to_z(coords))
        nn = sk.n_matrix(prep, z)
        return float(lam) * np.concatenate([0.5 * nn @ np.imag(z), -0.5 * nn @ np.real(z)])

    return KahlerHamiltonianData(
        dim=2 * m,
        metric=metric,
        omega=omega,
        z_field=z_field,
        hamiltonian=hamiltonian,
        d_hamiltonian=d_hamiltonian,
        connection=connection,
    )


def kk_admissible_interval(lam: int, c: float, branch: str) -> tuple[float, float]:
    """The rho-interval I_+ or I_- of the conical K/K example."""
    if branch == "+":
        if lam == 1:
            return (max(0.0, -2.0 * c), np.inf)
        return (min(-2.0 * c, 0.0), -c)
    if branch == "-":
        if lam == 1:
            return (-c, max(0.0, -2.0 * c))
        return (-np.inf, min(-2.0 * c, 0.0))
    raise ArgumentError("branch must be '+' or '-'")


def kk_metric_conical(
    breve_metric: MetricField,
    lam: int,
    c: float,
    rho: float,
    phi_tilde: float,
    base_pt: Sequence[float],
    eta_breve: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """Closed-form K/K metric of a cone, in the chart (base..., rho, phit).

    g' = (1/2|rho|) [ lam (rho+c) g_breve
                      - (1/4 rho) (rho+2c)/(rho+c) drho^2
                      - (1/4 rho) (rho+c)/(rho+2c) (dphit - 2c eta_breve)^2 ].
    """
    if lam not in (1, -1):
        raise ArgumentError("lam must be +1 or -1")
    if lam * (rho + c) <= 0.0:
        raise DomainError(f"lam (rho + c) = {lam * (rho + c):g} must be positive")
    if abs(rho) < HAMILTONIAN_MARGIN or abs(rho + 2.0 * c) < HAMILTONIAN_MARGIN:
        raise DomainError("rho on a pole locus (rho = 0 or rho = -2c)")
    base_pt = np.asarray(base_pt, dtype=float)
    k = breve_metric.dim
    dim = k + 2
    g = np.zeros((dim, dim))
    g[:k, :k] = lam * (rho + c) * breve_metric(base_pt)
    g[k, k] = -(1.0 / (4.0 * rho)) * (rho + 2.0 * c) / (rho + c)
    theta = np.zeros(dim)
    theta[k + 1] = 1.0
    if k:
        theta[:k] = -2.0 * c * np.asarray(eta_breve(base_pt), dtype=float)
    g += -(1.0 / (4.0 * rho)) * (rho + c) / (rho + 2.0 * c) * outer_sym(theta)
    return g / (2.0 * abs(rho))


def kk_conical_reduction(
    prep: Prepotential, lam: int, x: Sequence[complex], rho: float, phi_tilde: float, c: float
) -> np.ndarray:
    """Generic K/K applied to the cone input and restricted to {arg z^0 = 0}.

    Output chart (Re X, Im X, rho, phit); with r^2 = lam (rho + c) the lift is
    the same as in the quaternionic pipeline, fibers dropped.
    """
    n = prep.n
    m = n + 1
    data = conical_kahler_input(prep, lam)
    r2 = lam * (rho + c)
    if r2 <= 0.0:
        raise DomainError("lam (rho + c) must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    kpot = sk.kahler_potential(prep, x)
    kgrad = sk.kahler_potential_gradient(prep, x)
    z0 = np.sqrt(r2) * np.exp(0.5 * kpot)
    lift = sk.lift_projective(prep, x)
    z = z0 * lift
    base_coords = np.concatenate([np.real(z), np.imag(z)])
    res = kk_metric_generic(data, base_coords, c)

    dim_q = 2 * n + 2
    emb = np.zeros((2 * m + 1, dim_q))
    dz = np.zeros((m, dim_q), dtype=complex)
    for mu in range(n):
        dz[:, mu] = z0 * np.real(kgrad[mu]) * lift
        dz[:, n + mu] = -z0 * np.imag(kgrad[mu]) * lift
        dz[mu + 1, mu] += z0
        dz[mu + 1, n + mu] += 1j * z0
    dz[:, 2 * n] = lift * z0 * lam / (2.0 * r2)  # d r^2/d rho = lam
    emb[:m, :] = np.real(dz)
    emb[m:2 * m, :] = np.imag(dz)
    emb[-1, 2 * n + 1] = -0.25
    return kk_reduce(res.gTilde, res.f, emb)
