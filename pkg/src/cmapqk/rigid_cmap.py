"""Pseudo-hyper-Kahler structure on the cotangent bundle of the cone.

Chart ordering on N = T*M: (Re z^I, Im z^I, zt_I, zc^I) with zt the momentum
conjugate to the affine coordinates and zc its partner; fiber one-forms are
A_I = d zt_I + sum_J F_IJ(z) d zc^J.  All matrices below are exact in terms
of the prepotential jets; only the closedness/Killing verifications use
finite differences (in tensor_calc).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConditioningError, DomainError
from .prepotential import Prepotential, eval_jet
from .realform import hermitian_to_real_metric, sym
from . import special_kahler as sk
from .tensor_calc import FormField, MetricField, VectorField

COND_LIMIT = 1e12


@dataclass(frozen=True)
class CotangentPoint:
    """Point of N = T*M: base z plus real fiber coordinates (zt, zc)."""

    z: np.ndarray
    zeta_tilde: np.ndarray
    zeta: np.ndarray

    @classmethod
    def make(cls, z, zeta_tilde=None, zeta=None) -> "CotangentPoint":
        z = np.asarray(z, dtype=complex)
        m = z.shape[0]
        zt = np.zeros(m) if zeta_tilde is None else np.asarray(zeta_tilde, dtype=float)
        zc = np.zeros(m) if zeta is None else np.asarray(zeta, dtype=float)
        if zt.shape != (m,) or zc.shape != (m,):
            raise DomainError("fiber coordinates must match the base dimension")
        return cls(z, zt, zc)

    def chart_coords(self) -> np.ndarray:
        return np.concatenate([np.real(self.z), np.imag(self.z), self.zeta_tilde, self.zeta])

    @classmethod
    def from_chart(cls, coords: Sequence[float]) -> "CotangentPoint":
        coords = np.asarray(coords, dtype=float)
        m = coords.shape[0] // 4
        return cls(coords[:m] + 1j * coords[m:2 * m], coords[2 * m:3 * m].copy(), coords[3 * m:].copy())


@dataclass(frozen=True)
class HKFrame:
    """Metric, Kahler forms and complex structures of the rigid c-map at a point."""

    g: np.ndarray
    omega: tuple[np.ndarray, np.ndarray, np.ndarray]
    J: tuple[np.ndarray, np.ndarray, np.ndarray]
    chart: sk.RealChart
    cond_n: float

    def quaternion_residual(self) -> float:
        """Max violation of J_a^2 = -Id, J1 J2 = J3 and anticommutation."""
        j1, j2, j3 = self.J
        eye = np.eye(self.g.shape[0])
        res = max(
            np.max(np.abs(j1 @ j1 + eye)),
            np.max(np.abs(j2 @ j2 + eye)),
            np.max(np.abs(j3 @ j3 + eye)),
            np.max(np.abs(j1 @ j2 - j3)),
            np.max(np.abs(j1 @ j2 + j2 @ j1)),
            np.max(np.abs(j2 @ j3 + j3 @ j2)),
        )
        return float(res)


def fiber_metric_block(nn: np.ndarray, rr: np.ndarray) -> np.ndarray:
    """Matrix of sum A_I N^IJ Abar_J in the (zt, zc) fiber coordinates.

    Equals [[N^-1, N^-1 R / 2], [R N^-1 / 2, (N + R N^-1 R)/4]].
    """
    m = nn.shape[0]
    ninv = np.linalg.solve(nn, np.eye(m))
    ninv_r = np.linalg.solve(nn, rr)
    top = np.hstack([ninv, 0.5 * ninv_r])
    bottom = np.hstack([0.5 * ninv_r.T, 0.25 * (nn + rr @ ninv_r)])
    return sym(np.vstack([top, bottom]))


def metric_from_data(data: sk.ConeData) -> np.ndarray:
    nn, rr = data.nn, data.rr
    cond = float(np.linalg.cond(nn))
    if cond > COND_LIMIT:
        raise ConditioningError(f"cond(N) = {cond:.3e} exceeds {COND_LIMIT:g}")
    m = nn.shape[0]
    g = np.zeros((4 * m, 4 * m))
    g[: 2 * m, : 2 * m] = hermitian_to_real_metric(nn)
    g[2 * m:, 2 * m:] = fiber_metric_block(nn, rr)
    return g


def metric_matrix(prep: Prepotential, pt: CotangentPoint) -> np.ndarray:
    """g_N = sum dz N dzbar + sum A N^-1 Abar as a real (4n+4) matrix."""
    return metric_from_data(sk.cone_data(prep, pt.z))


def omega_matrices(prep: Prepotential, pt: CotangentPoint) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three Kahler forms as antisymmetric real matrices.

    omega_1 = sum N_IJ dx^I ^ dy^J + (1/2) sum dzt_I ^ dzc^I;
    omega_3 = Re W and omega_2 = -Im W with W = sum dz^I ^ A_I.
    """
    data = sk.cone_data(prep, pt.z)
    m = prep.dim
    nn, rr = data.nn, data.rr
    dim = 4 * m
    x, y, zt, zc = slice(0, m), slice(m, 2 * m), slice(2 * m, 3 * m), slice(3 * m, 4 * m)

    w1 = np.zeros((dim, dim))
    w1[x, y] = nn
    w1[zt, zc] = 0.5 * np.eye(m)
    w1 -= w1.T

    w3 = np.zeros((dim, dim))
    w3[x, zt] = np.eye(m)
    w3[x, zc] = 0.5 * rr
    w3[y, zc] = -0.5 * nn
    w3 -= w3.T

    w2 = np.zeros((dim, dim))
    w2[y, zt] = -np.eye(m)
    w2[x, zc] = -0.5 * nn
    w2[y, zc] = -0.5 * rr
    w2 -= w2.T
    return w1, w2, w3


def hk_frame(prep: Prepotential, pt: CotangentPoint) -> HKFrame:
    """Assemble (g_N, omega_a, J_a) at a point; J_a = -g^-1 omega_a.

    With the convention omega_a = g(J_a ., .) the matrix relation is
    omega_a = J_a^T g, hence J_a = -g^-1 omega_a.
    """
    cond = float(np.linalg.cond(sk.n_matrix(prep, pt.z)))
    if cond > COND_LIMIT:
        raise ConditioningError(f"cond(N) = {cond:.3e} exceeds {COND_LIMIT:g}")
    g = metric_matrix(prep, pt)
    omegas = omega_matrices(prep, pt)
    js = tuple(np.linalg.solve(g, -w) for w in omegas)
    return HKFrame(g=g, omega=omegas, J=js, chart=sk.cotangent_chart(prep.n), cond_n=cond)


def rotating_killing_field(prep: Prepotential, pt: CotangentPoint) -> np.ndarray:
    """Z = 2(J xi)^h: chart components (-2 Im z, 2 Re z, 0, 0)."""
    z = sk.check_cone_point(prep, pt.z)
    m = prep.dim
    return np.concatenate([-2.0 * np.imag(z), 2.0 * np.real(z), np.zeros(2 * m)])


def w_coordinates(prep: Prepotential, pt: CotangentPoint) -> np.ndarray:
    """Holomorphic fiber coordinates w_I = (zt_I + sum_J F_IJ zc^J) / 2."""
    if not prep.is_admissible(pt.z):
        raise DomainError("point not admissible for the prepotential family")
    jet = eval_jet(prep, pt.z, order=2)
    return 0.5 * (pt.zeta_tilde + jet.hess @ pt.zeta)


def beta_covector(prep: Prepotential, pt: CotangentPoint) -> np.ndarray:
    """g_N(Z, .) = 2 r^2 eta~ pulled back: components (-2 N y, 2 N x, 0, 0)."""
    z = sk.check_cone_point(prep, pt.z)
    nn = sk.n_matrix(prep, z)
    m = prep.dim
    return np.concatenate([-2.0 * nn @ np.imag(z), 2.0 * nn @ np.real(z), np.zeros(2 * m)])


def eta_n_covector(prep: Prepotential, pt: CotangentPoint) -> np.ndarray:
    """Connection potential eta_N = -(r^2/2) eta~ + eta_can on N.

    Components (N y / 2, -N x / 2, -zc/4, zt/4); d eta_N = omega_1 - d(g_N Z)/2.
    """
    z = sk.check_cone_point(prep, pt.z)
    nn = sk.n_matrix(prep, z)
    return np.concatenate(
        [0.5 * nn @ np.imag(z), -0.5 * nn @ np.real(z), -0.25 * pt.zeta, 0.25 * pt.zeta_tilde]
    )


# ---------------------------------------------------------------------------
# callback fields over the cotangent chart (for the FD engine)


def _cone_domain_pred(prep: Prepotential):
    def pred(coords: np.ndarray) -> bool:
        pt = CotangentPoint.from_chart(coords)
        return sk.in_cone_domain(prep, pt.z)

    return pred


def metric_field(prep: Prepotential) -> MetricField:
    dim = 4 * prep.dim
    return MetricField(
        dim=dim,
        func=lambda c: metric_matrix(prep, CotangentPoint.from_chart(c)),
        domain=_cone_domain_pred(prep),
        name=f"g_N[{prep.family} n={prep.n}]",
    )


def omega_form_fields(prep: Prepotential) -> tuple[FormField, FormField, FormField]:
    dim = 4 * prep.dim

    def make(alpha: int) -> FormField:
        return FormField(
            dim=dim,
            degree=2,
            func=lambda c: omega_matrices(prep, CotangentPoint.from_chart(c))[alpha],
            name=f"omega_{alpha + 1}",
        )

    return make(0), make(1), make(2)


def killing_vector_field(prep: Prepotential) -> VectorField:
    dim = 4 * prep.dim
    return VectorField(
        dim=dim,
        func=lambda c: rotating_killing_field(prep, CotangentPoint.from_chart(c)),
        name="Z",
    )


def beta_form_field(prep: Prepotential) -> FormField:
    dim = 4 * prep.dim
    return FormField(
        dim=dim,
        degree=1,
        func=lambda c: beta_covector(prep, CotangentPoint.from_chart(c)),
        name="g_N Z",
    )


def eta_n_form_field(prep: Prepotential) -> FormField:
    dim = 4 * prep.dim
    return FormField(
        dim=dim,
        degree=1,
        func=lambda c: eta_n_covector(prep, CotangentPoint.from_chart(c)),
        name="eta_N",
    )


# ---------------------------------------------------------------------------
# Darboux presentation in the affine coordinates (x^I, Re F_I)


def affine_frame_jacobian(prep: Prepotential, z: Sequence[complex]) -> np.ndarray:
    """Jacobian of (x, Re F_J(z), zt, zc) with respect to the standard chart.

    d Re F_I = (R/2) dx - (N/2) dy, so the base block is
    [[Id, 0], [R/2, -N/2]]; fibers are untouched.
    """
    zz = np.asarray(z, dtype=complex)
    nn = sk.n_matrix(prep, zz)
    rr = sk.r_matrix(prep, zz)
    m = prep.dim
    t = np.zeros((4 * m, 4 * m))
    t[:m, :m] = np.eye(m)
    t[m:2 * m, :m] = 0.5 * rr
    t[m:2 * m, m:2 * m] = -0.5 * nn
    t[2 * m:, 2 * m:] = np.eye(2 * m)
    return t


def darboux_omega1(n: int) -> np.ndarray:
    """omega_1 = -2 sum dx^I ^ dy_I + (1/2) sum dzt_I ^ dzc^I in the affine frame."""
    m = n + 1
    w = np.zeros((4 * m, 4 * m))
    w[:m, m:2 * m] = -2.0 * np.eye(m)
    w[2 * m:3 * m, 3 * m:] = 0.5 * np.eye(m)
    return w - w.T


def darboux_omega3(n: int) -> np.ndarray:
    """omega_3 = sum dq^a ^ dp_a in the affine frame."""
    m = n + 1
    w = np.zeros((4 * m, 4 * m))
    w[:m, 2 * m:3 * m] = np.eye(m)
    w[m:2 * m, 3 * m:] = np.eye(m)
    return w - w.T
