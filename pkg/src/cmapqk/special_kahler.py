"""Conical affine and projective special Kahler data built from a prepotential.

Real chart convention, fixed once for all modules: the affine manifold M uses
(Re z^0..Re z^n, Im z^0..Im z^n); the projective base uses
(Re X^1..Re X^n, Im X^1..Im X^n) in the affine chart X^0 = 1.

Cone-domain membership means r^2 = sum z^I N_IJ zbar^J > 0 together with N
of signature (1, n); both are checked eagerly wherever a construction needs
them.  Signatures are always reported as (positive count, negative count).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError, DomainError, SignatureError
from .prepotential import HoloJet, Prepotential, eval_jet
from .realform import (
    hermitian_to_real_metric,
    holomorphic_jacobian_to_real,
    outer_sym,
    sym,
    wirtinger_to_dc,
    wirtinger_to_real_differential,
)


@dataclass(frozen=True)
class RealChart:
    """Named real chart with coordinate labels and complex conversions."""

    name: str
    labels: tuple[str, ...]
    to_complex: Callable[[np.ndarray], tuple]
    from_complex: Callable[[tuple], np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.labels)


def affine_chart(n: int) -> RealChart:
    m = n + 1
    labels = tuple(f"x{i}" for i in range(m)) + tuple(f"y{i}" for i in range(m))

    def to_c(coords):
        coords = np.asarray(coords, dtype=float)
        return (coords[:m] + 1j * coords[m:2 * m],)

    def from_c(data):
        (z,) = data
        return np.concatenate([np.real(z), np.imag(z)])

    return RealChart(f"affine(n={n})", labels, to_c, from_c)


def cotangent_chart(n: int) -> RealChart:
    m = n + 1
    labels = (
        tuple(f"x{i}" for i in range(m))
        + tuple(f"y{i}" for i in range(m))
        + tuple(f"zt{i}" for i in range(m))
        + tuple(f"zc{i}" for i in range(m))
    )

    def to_c(coords):
        coords = np.asarray(coords, dtype=float)
        z = coords[:m] + 1j * coords[m:2 * m]
        return z, coords[2 * m:3 * m].copy(), coords[3 * m:4 * m].copy()

    def from_c(data):
        z, zt, zc = data
        return np.concatenate([np.real(z), np.imag(z), zt, zc])

    return RealChart(f"cotangent(n={n})", labels, to_c, from_c)


def circle_bundle_chart(n: int) -> RealChart:
    base = cotangent_chart(n)
    labels = base.labels + ("s",)

    def to_c(coords):
        coords = np.asarray(coords, dtype=float)
        return base.to_complex(coords[:-1]) + (float(coords[-1]),)

    def from_c(data):
        return np.concatenate([base.from_complex(data[:-1]), [data[-1]]])

    return RealChart(f"circle_bundle(n={n})", labels, to_c, from_c)


def quaternionic_chart(n: int) -> RealChart:
    m = n + 1
    labels = (
        tuple(f"u{i}" for i in range(1, n + 1))
        + tuple(f"v{i}" for i in range(1, n + 1))
        + ("rho", "phit")
        + tuple(f"zt{i}" for i in range(m))
        + tuple(f"zc{i}" for i in range(m))
    )

    def to_c(coords):
        coords = np.asarray(coords, dtype=float)
        x = coords[:n] + 1j * coords[n:2 * n]
        rho, phit = coords[2 * n], coords[2 * n + 1]
        zt = coords[2 * n + 2:2 * n + 2 + m].copy()
        zc = coords[2 * n + 2 + m:].copy()
        return x, float(rho), float(phit), zt, zc

    def from_c(data):
        x, rho, phit, zt, zc = data
        return np.concatenate([np.real(x), np.imag(x), [rho, phit], zt, zc])

    return RealChart(f"quaternionic(n={n})", labels, to_c, from_c)


# ---------------------------------------------------------------------------
# pointwise special Kahler data


@dataclass(frozen=True)
class ConeData:
    """Shared per-point data: order-2 jet, N, R and r^2 at one base point.

    The composite constructors (rigid c-map frame, pipeline, closed forms)
    route through this to evaluate the jet and the cone check exactly once.
    """

    z: np.ndarray
    jet: HoloJet
    nn: np.ndarray
    rr: np.ndarray
    r2: float


def cone_data(prep: Prepotential, z: Sequence[complex], require_cone: bool = True) -> ConeData:
    zz = np.asarray(z, dtype=complex)
    if not prep.is_admissible(zz):
        raise DomainError("point not admissible for the prepotential family")
    jet = eval_jet(prep, zz, order=2)
    nn = sym(2.0 * np.imag(jet.hess))
    rr = sym(2.0 * np.real(jet.hess))
    r2 = float(np.real(zz @ nn @ np.conj(zz)))
    if require_cone:
        eig = np.linalg.eigvalsh(nn)
        if np.sum(eig > 0.0) != 1 or np.sum(eig < 0.0) != prep.n or r2 <= 0.0:
            raise DomainError("point outside the cone domain (r^2 > 0, sig N = (1, n))")
    return ConeData(zz, jet, nn, rr, r2)


def n_matrix(prep: Prepotential, z: Sequence[complex]) -> np.ndarray:
    """N_IJ = 2 Im F_IJ(z), exactly symmetric."""
    jet = eval_jet(prep, z, order=2)
    return sym(2.0 * np.imag(jet.hess))


def r_matrix(prep: Prepotential, z: Sequence[complex]) -> np.ndarray:
    """R_IJ = 2 Re F_IJ(z)."""
    jet = eval_jet(prep, z, order=2)
    return sym(2.0 * np.real(jet.hess))


def cone_radius_sq(prep: Prepotential, z: Sequence[complex]) -> float:
    """r^2 = sum z^I N_IJ zbar^J (real by symmetry of N)."""
    return cone_data(prep, z, require_cone=False).r2


def in_cone_domain(prep: Prepotential, z: Sequence[complex]) -> bool:
    """r^2 > 0 and N of signature (1, n)."""
    if not prep.is_admissible(z):
        return False
    try:
        cone_data(prep, z, require_cone=True)
    except DomainError:
        return False
    return True


def check_cone_point(prep: Prepotential, z: Sequence[complex]) -> np.ndarray:
    return cone_data(prep, z, require_cone=True).z


def radius_differential(prep: Prepotential, z: Sequence[complex]) -> np.ndarray:
    """Exact covector d(r^2) in the (Re z, Im z) chart.

    The Euler identity kills the derivative of N, so
    d(r^2) = 2 Re sum (N zbar)_I dz^I.
    """
    zz = np.asarray(z, dtype=complex)
    nn = n_matrix(prep, zz)
    return wirtinger_to_real_differential(nn @ np.conj(zz))


def eta_tilde(prep: Prepotential, z: Sequence[complex]) -> np.ndarray:
    """Contact covector (1/r^2) g_M(J xi, .) = d^c log r, in the affine chart."""
    zz = check_cone_point(prep, z)
    nn = n_matrix(prep, zz)
    r2 = cone_radius_sq(prep, zz)
    x = np.real(zz)
    y = np.imag(zz)
    return np.concatenate([-(nn @ y), nn @ x]) / r2


def metric_affine(prep: Prepotential, z: Sequence[complex]) -> np.ndarray:
    """Real matrix of g_M = sum N_IJ dz^I dzbar^J; signature (2, 2n)."""
    zz = np.asarray(z, dtype=complex)
    if not prep.is_admissible(zz):
        raise DomainError("point not admissible for the prepotential family")
    nn = n_matrix(prep, zz)
    if cone_radius_sq(prep, zz) <= 0.0:
        raise DomainError("point outside the cone domain (r^2 <= 0)")
    g = hermitian_to_real_metric(nn)
    eig = np.linalg.eigvalsh(g)
    if np.sum(eig > 0.0) != 2 or np.sum(eig < 0.0) != 2 * prep.n:
        raise SignatureError(f"affine metric signature is not (2, {2 * prep.n})")
    return g


# ---------------------------------------------------------------------------
# projective data (chart X^0 = 1)


def lift_projective(prep: Prepotential, x: Sequence[complex]) -> np.ndarray:
    """The lift z = (1, X^1..X^n) of a projective point."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (prep.n,):
        raise ArgumentError(f"projective point must have {prep.n} complex entries")
    return np.concatenate([[1.0 + 0j], x])


def kahler_potential(prep: Prepotential, x: Sequence[complex]) -> float:
    """K = -log sum X^I N_IJ(X) Xbar^J with X^0 = 1."""
    z = lift_projective(prep, x)
    h = cone_radius_sq(prep, z)
    if h <= 0.0:
        raise DomainError("Kahler potential undefined: sum X N Xbar <= 0")
    return float(-np.log(h))


def kgrad_from_data(data: ConeData) -> np.ndarray:
    return -(data.nn @ np.conj(data.z))[1:] / data.r2


def kahler_potential_gradient(prep: Prepotential, x: Sequence[complex]) -> np.ndarray:
    """Wirtinger gradient dK/dX^mu (length n), exact."""
    return kgrad_from_data(cone_data(prep, lift_projective(prep, x)))


def dc_kahler_potential(prep: Prepotential, x: Sequence[complex]) -> np.ndarray:
    """Real components of d^c K = i(dbar - d)K in the (Re X, Im X) chart."""
    return wirtinger_to_dc(kahler_potential_gradient(prep, x))


def projective_hermitian_from_data(data: ConeData) -> np.ndarray:
    a = data.nn @ np.conj(data.z)
    b = data.nn @ data.z
    return -data.nn[1:, 1:] / data.r2 + np.outer(a[1:], b[1:]) / data.r2**2


def projective_hermitian(prep: Prepotential, x: Sequence[complex]) -> np.ndarray:
    """Hermitian matrix d^2 K / dX^mu dXbar^nu, exact.

    With h = sum z N zbar at the lift, the Euler identities reduce it to
    -N_{mu nu}/h + (N zbar)_mu (N z)_nu / h^2.
    """
    return projective_hermitian_from_data(cone_data(prep, lift_projective(prep, x)))


def metric_projective(prep: Prepotential, x: Sequence[complex]) -> np.ndarray:
    """Positive-definite real metric with potential K, in (Re X, Im X)."""
    gh = projective_hermitian(prep, x)
    g = hermitian_to_real_metric(gh)
    if prep.n > 0 and np.min(np.linalg.eigvalsh(g)) <= 0.0:
        raise SignatureError("projective metric is not positive definite here")
    return g


def projection_jacobian(prep: Prepotential, z: Sequence[complex]) -> np.ndarray:
    """Real Jacobian of the projection z -> X = (z^mu / z^0) onto the base."""
    zz = np.asarray(z, dtype=complex)
    n = prep.n
    jac = np.zeros((n, n + 1), dtype=complex)
    for mu in range(n):
        jac[mu, 0] = -zz[mu + 1] / zz[0] ** 2
        jac[mu, mu + 1] = 1.0 / zz[0]
    return holomorphic_jacobian_to_real(jac)


def cone_decomposition_residual(prep: Prepotential, z: Sequence[complex]) -> float:
    """Max-norm defect of g_M = dr^2 + r^2 (eta~ (x) eta~ - g_Mbar pulled back)."""
    zz = check_cone_point(prep, z)
    g = metric_affine(prep, zz)
    r2 = cone_radius_sq(prep, zz)
    dr2 = radius_differential(prep, zz)
    dr = dr2 / (2.0 * np.sqrt(r2))
    eta = eta_tilde(prep, zz)
    x = zz[1:] / zz[0]
    jac = projection_jacobian(prep, zz)
    gbar = jac.T @ metric_projective(prep, x) @ jac
    model = outer_sym(dr) + r2 * (outer_sym(eta) - gbar)
    return float(np.max(np.abs(g - model)))
