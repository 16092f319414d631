"""Numerical differential geometry over callback fields.

The engine differentiates only real tensor components, with 4th-order central
differences and Richardson extrapolation over {h, h/2}; exactness of the
metric entries themselves is the constructors' business.  Default step
h = 1e-3, scaled per coordinate by max(1, |coordinate|).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError, DomainError, NoiseFloorError, QuadratureError

DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class MetricField:
    """Symmetric-matrix-valued callback over a real chart."""

    dim: int
    func: Callable[[np.ndarray], np.ndarray]
    domain: Callable[[np.ndarray], bool] | None = None
    name: str = ""

    def __call__(self, pt: np.ndarray) -> np.ndarray:
        pt = np.asarray(pt, dtype=float)
        if self.domain is not None and not self.domain(pt):
            raise DomainError(f"point outside domain of metric field {self.name!r}")
        g = np.asarray(self.func(pt), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise ArgumentError(f"metric field {self.name!r} returned shape {g.shape}")
        if np.max(np.abs(g - g.T)) > 1e-13 * max(1.0, np.max(np.abs(g))):
            raise ArgumentError(f"metric field {self.name!r} returned an asymmetric matrix")
        return 0.5 * (g + g.T)


@dataclass(frozen=True)
class FormField:
    """Antisymmetric degree-k form field; degree 0 means a scalar function."""

    dim: int
    degree: int
    func: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    def __call__(self, pt: np.ndarray) -> np.ndarray:
        val = np.asarray(self.func(np.asarray(pt, dtype=float)), dtype=float)
        expect = (self.dim,) * self.degree
        if val.shape != expect:
            raise ArgumentError(f"form field {self.name!r} returned shape {val.shape}, expected {expect}")
        return val


@dataclass(frozen=True)
class VectorField:
    dim: int
    func: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    def __call__(self, pt: np.ndarray) -> np.ndarray:
        v = np.asarray(self.func(np.asarray(pt, dtype=float)), dtype=float)
        if v.shape != (self.dim,):
            raise ArgumentError(f"vector field {self.name!r} returned shape {v.shape}")
        return v


def _steps(pt: np.ndarray, h: float) -> np.ndarray:
    return h * np.maximum(1.0, np.abs(pt))


def _d1(func, pt: np.ndarray, i: int, hi: float):
    """4th-order central first derivative of an array-valued callback."""
    e = np.zeros_like(pt)
    e[i] = 1.0
    return (
        -func(pt + 2 * hi * e)
        + 8.0 * func(pt + hi * e)
        - 8.0 * func(pt - hi * e)
        + func(pt - 2 * hi * e)
    ) / (12.0 * hi)


def _grad_all(func, pt: np.ndarray, steps: np.ndarray) -> np.ndarray:
    out = [_d1(func, pt, i, steps[i]) for i in range(len(pt))]
    return np.stack(out, axis=0)


# ---------------------------------------------------------------------------
# curvature


@dataclass(frozen=True)
class CurvatureReport:
    """Levi-Civita curvature data at one point.

    christoffel[k, i, j] = Gamma^k_{ij}; riemann[l, i, j, k] is the component
    of R(d_i, d_j) d_k along d_l.
    """

    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scal: float
    einstein_lambda: float
    einstein_residual: float
    fd_step: float
    noise_floor: float
    ricci_asymmetry: float
    bianchi_residual: float


def christoffel(field: MetricField, pt: np.ndarray, steps: np.ndarray) -> np.ndarray:
    g = field(pt)
    dg = _grad_all(field, pt, steps)  # dg[i, a, b] = d_i g_ab
    # Gamma^k_{ij} = 1/2 g^{kl} (d_i g_lj + d_j g_li - d_l g_ij)
    rhs = np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg
    return 0.5 * np.einsum("kl,lij->kij", np.linalg.inv(g), rhs)


def _riemann_once(field: MetricField, pt: np.ndarray, steps: np.ndarray) -> np.ndarray:
    gam = christoffel(field, pt, steps)
    dgam = _grad_all(lambda q: christoffel(field, q, steps), pt, steps)
    r = (
        np.einsum("iljk->lijk", dgam)
        - np.einsum("jlik->lijk", dgam)
        + np.einsum("lim,mjk->lijk", gam, gam)
        - np.einsum("ljm,mik->lijk", gam, gam)
    )
    return r


def curvature(
    field: MetricField,
    pt: Sequence[float],
    h: float = DEFAULT_STEP,
    tol: float | None = None,
) -> CurvatureReport:
    """Curvature via 4th-order differences, Richardson-extrapolated over {h, h/2}."""
    pt = np.asarray(pt, dtype=float)
    steps = _steps(pt, h)
    r_full = _riemann_once(field, pt, steps)
    r_half = _riemann_once(field, pt, steps / 2.0)
    riem = (16.0 * r_half - r_full) / 15.0
    scale = max(1.0, float(np.max(np.abs(riem))))
    noise = float(np.max(np.abs(r_half - r_full)) / 15.0)
    if tol is not None and noise > tol * scale:
        raise NoiseFloorError(f"extrapolation disagreement {noise:.3e} exceeds tol {tol:g}")

    g = field(pt)
    ginv = np.linalg.inv(g)
    ricci = np.einsum("iijk->jk", riem)
    ricci_asym = float(np.max(np.abs(ricci - ricci.T)))
    ricci = 0.5 * (ricci + ricci.T)
    scal = float(np.einsum("jk,jk->", ginv, ricci))
    dim = field.dim
    lam = scal / dim
    einstein_res = float(np.max(np.abs(ricci - lam * g)) / max(1.0, np.max(np.abs(g))))
    bianchi = riem + np.einsum("ljki->lijk", riem) + np.einsum("lkij->lijk", riem)
    gam = christoffel(field, pt, steps / 2.0)
    return CurvatureReport(
        christoffel=gam,
        riemann=riem,
        ricci=ricci,
        scal=scal,
        einstein_lambda=lam,
        einstein_residual=einstein_res,
        fd_step=h,
        noise_floor=noise,
        ricci_asymmetry=ricci_asym,
        bianchi_residual=float(np.max(np.abs(bianchi))),
    )


@dataclass(frozen=True)
class EinsteinRecord:
    lambdas: list[float]
    scal_values: list[float]
    max_residual: float
    scal_spread: float
    noise_floor: float
    passed: bool
    tolerance: float


def einstein_check(
    field: MetricField,
    points: Sequence[Sequence[float]],
    tol: float = 1e-4,
    h: float = DEFAULT_STEP,
) -> EinsteinRecord:
    """Verify Ric = (scal/dim) g at each point with point-independent scal."""
    lambdas: list[float] = []
    scals: list[float] = []
    max_res = 0.0
    floor = 0.0
    for pt in points:
        rep = curvature(field, pt, h=h)
        lambdas.append(rep.einstein_lambda)
        scals.append(rep.scal)
        max_res = max(max_res, rep.einstein_residual)
        floor = max(floor, rep.noise_floor)
    spread = (max(scals) - min(scals)) / max(1.0, abs(float(np.mean(scals))))
    passed = max_res < tol and spread < tol
    return EinsteinRecord(lambdas, scals, max_res, spread, floor, passed, tol)


# ---------------------------------------------------------------------------
# derivatives of tensors along fields


def lie_derivative_2tensor(
    eval_func: Callable[[np.ndarray], np.ndarray],
    vfield: VectorField,
    pt: np.ndarray,
    h: float = DEFAULT_STEP,
) -> np.ndarray:
    """(L_V t)_ij = V^k d_k t_ij + t_kj d_i V^k + t_ik d_j V^k (any (0,2) tensor)."""
    pt = np.asarray(pt, dtype=float)
    steps = _steps(pt, h)
    t = np.asarray(eval_func(pt), dtype=float)
    dt = _grad_all(eval_func, pt, steps)
    dv = _grad_all(vfield, pt, steps)  # dv[i, k] = d_i V^k
    v = vfield(pt)
    return (
        np.einsum("k,kij->ij", v, dt)
        + np.einsum("kj,ik->ij", t, dv)
        + np.einsum("ik,jk->ij", t, dv)
    )


def lie_derivative_metric(
    field: MetricField, vfield: VectorField, pt: Sequence[float], h: float = DEFAULT_STEP
) -> np.ndarray:
    return lie_derivative_2tensor(field, vfield, np.asarray(pt, dtype=float), h)


def lie_bracket(v: VectorField, w: VectorField, pt: Sequence[float], h: float = DEFAULT_STEP) -> np.ndarray:
    """[V, W]^i = V^j d_j W^i - W^j d_j V^i."""
    pt = np.asarray(pt, dtype=float)
    steps = _steps(pt, h)
    dw = _grad_all(w, pt, steps)
    dv = _grad_all(v, pt, steps)
    return np.einsum("j,ji->i", v(pt), dw) - np.einsum("j,ji->i", w(pt), dv)


def _exterior_once(form: FormField, pt: np.ndarray, steps: np.ndarray) -> np.ndarray:
    da = _grad_all(form, pt, steps)  # da[i, ...] = d_i A_...
    k = form.degree
    if k == 0:
        return da
    if k == 1:
        return da - da.T
    if k == 2:
        return da - np.einsum("bac->abc", da) + np.einsum("cab->abc", da)
    raise ArgumentError(f"exterior derivative implemented for degree <= 2, got {k}")


def exterior_derivative(
    form: FormField,
    pt: Sequence[float],
    h: float = DEFAULT_STEP,
    richardson: bool = False,
) -> np.ndarray:
    """Antisymmetrised finite-difference exterior derivative (degree k -> k+1)."""
    pt = np.asarray(pt, dtype=float)
    steps = _steps(pt, h)
    full = _exterior_once(form, pt, steps)
    if not richardson:
        return full
    half = _exterior_once(form, pt, steps / 2.0)
    return (16.0 * half - full) / 15.0


# ---------------------------------------------------------------------------
# signature


def signature(matrix: np.ndarray, tol: float = 1e-10) -> tuple[int, int, int]:
    """(positive, negative, null) eigenvalue counts of a symmetric matrix."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError("signature needs a square matrix")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if m.size and np.max(np.abs(m - m.T)) > 1e-10 * scale:
        raise ArgumentError("signature needs a symmetric matrix")
    if m.size == 0:
        return (0, 0, 0)
    eig = np.linalg.eigvalsh(0.5 * (m + m.T))
    cut = tol * max(np.max(np.abs(eig)), np.finfo(float).tiny)
    null = int(np.sum(np.abs(eig) < cut))
    pos = int(np.sum(eig >= cut))
    neg = int(np.sum(eig <= -cut))
    return (pos, neg, null)


# ---------------------------------------------------------------------------
# curve length by adaptive Gauss panels (nodes stay interior, so integrable
# endpoint singularities survive after the t = u^2 substitution)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True)
class QuadratureRecord:
    value: float
    abs_error: float
    evaluations: int
    panels: int
    converged: bool
    substitution: str | None = None


def _gl_panel(f, a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.sum(_GL_WEIGHTS * np.array([f(mid + half * x) for x in _GL_NODES])))


class _AdaptiveState:
    def __init__(self) -> None:
        self.evals = 0
        self.panels = 0
        self.err = 0.0


def _adaptive(f, a, b, tol_abs, depth, state: _AdaptiveState) -> float:
    whole = _gl_panel(f, a, b)
    mid = 0.5 * (a + b)
    left = _gl_panel(f, a, mid)
    right = _gl_panel(f, mid, b)
    state.evals += 3 * len(_GL_NODES)
    diff = abs(left + right - whole)
    if diff <= tol_abs or depth >= 48:
        if diff > tol_abs:
            raise QuadratureError(f"quadrature failed to converge on [{a:g}, {b:g}] (gap {diff:.3e})")
        state.panels += 2
        state.err += diff
        return left + right
    return _adaptive(f, a, mid, tol_abs / 2.0, depth + 1, state) + _adaptive(
        f, mid, b, tol_abs / 2.0, depth + 1, state
    )


def adaptive_quadrature(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-8,
    initial_panels: int = 4,
) -> QuadratureRecord:
    """Adaptive interval-halving Gauss quadrature to a relative tolerance."""
    grid = np.linspace(a, b, initial_panels + 1)
    rough = sum(_gl_panel(f, grid[i], grid[i + 1]) for i in range(initial_panels))
    scale = max(abs(rough), 1e-30)
    state = _AdaptiveState()
    tol_abs = rel_tol * scale / initial_panels
    total = 0.0
    for i in range(initial_panels):
        total += _adaptive(f, grid[i], grid[i + 1], tol_abs, 0, state)
    return QuadratureRecord(total, state.err, state.evals, state.panels, True)


def curve_length(
    field: MetricField,
    curve: Callable[[float], np.ndarray],
    t0: float,
    t1: float,
    derivative: Callable[[float], np.ndarray] | None = None,
    rel_tol: float = 1e-8,
    singular_end: str | None = None,
    initial_panels: int = 4,
) -> QuadratureRecord:
    """Length of the curve in the metric: integral of sqrt|g(c', c')| dt.

    `singular_end` in {"left", "right", None} applies the substitution
    t = end -+ u^2, which turns sqrt(t)-type endpoint behaviour smooth.
    """
    if derivative is None:
        hd = 1e-6 * max(1.0, abs(t1 - t0))

        def derivative(t, _h=hd):
            return (
                -np.asarray(curve(t + 2 * _h))
                + 8.0 * np.asarray(curve(t + _h))
                - 8.0 * np.asarray(curve(t - _h))
                + np.asarray(curve(t - 2 * _h))
            ) / (12.0 * _h)

    def speed(t: float) -> float:
        v = np.asarray(derivative(t), dtype=float)
        g = field(np.asarray(curve(t), dtype=float))
        return float(np.sqrt(abs(v @ g @ v)))

    if singular_end is None:
        rec = adaptive_quadrature(speed, t0, t1, rel_tol, initial_panels)
    elif singular_end == "left":
        umax = np.sqrt(t1 - t0)
        rec = adaptive_quadrature(lambda u: 2.0 * u * speed(t0 + u * u), 0.0, umax, rel_tol, initial_panels)
    elif singular_end == "right":
        umax = np.sqrt(t1 - t0)
        rec = adaptive_quadrature(lambda u: 2.0 * u * speed(t1 - u * u), 0.0, umax, rel_tol, initial_panels)
    else:
        raise ArgumentError("singular_end must be 'left', 'right' or None")
    return QuadratureRecord(rec.value, rec.abs_error, rec.evaluations, rec.panels, rec.converged, singular_end)
