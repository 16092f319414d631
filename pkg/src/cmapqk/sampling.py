"""Deterministic seeded samplers for cone points, fibers and rho regimes.

Cone points come from rejection sampling in a family-specific box, then a
random complex rescaling to exercise generic phases; rho is uniform inside
the requested regime interval with an absolute 1e-6 margin at the poles.
"""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError
from .hkqk import QKChartPoint
from .prepotential import Prepotential
from . import special_kahler as sk

POLE_MARGIN = 1e-6
_MAX_TRIES = 2000


def builtin_prepotentials() -> dict[str, Prepotential]:
    return {"quadratic_n1": Prepotential.quadratic(1), "stu": Prepotential.stu()}


def sample_projective_point(prep: Prepotential, rng: np.random.Generator) -> np.ndarray:
    """A point X of the projective base with the lift inside the cone."""
    for _ in range(_MAX_TRIES):
        if prep.family == "quadratic":
            x = rng.uniform(-0.45, 0.45, prep.n) + 1j * rng.uniform(-0.45, 0.45, prep.n)
            if prep.n and np.sum(np.abs(x) ** 2) > 0.8:
                continue
        else:
            x = rng.uniform(-0.4, 0.4, prep.n) + 1j * rng.uniform(0.6, 1.4, prep.n)
        if sk.in_cone_domain(prep, sk.lift_projective(prep, x)):
            return x
    raise ArgumentError(f"could not sample a projective point for {prep.family} n={prep.n}")


def sample_cone_point(prep: Prepotential, rng: np.random.Generator) -> np.ndarray:
    """A generic cone point z = lambda (1, X) with a random scale and phase."""
    x = sample_projective_point(prep, rng)
    for _ in range(_MAX_TRIES):
        lam = rng.uniform(0.8, 1.25) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        z = lam * sk.lift_projective(prep, x)
        if sk.in_cone_domain(prep, z):
            return z
        x = sample_projective_point(prep, rng)
    raise ArgumentError("cone-point sampling failed")


def sample_cone_points(prep: Prepotential, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    return [sample_cone_point(prep, rng) for _ in range(count)]


def sample_fibers(m: int, rng: np.random.Generator, half_width: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    return rng.uniform(-half_width, half_width, m), rng.uniform(-half_width, half_width, m)


def regime_interval(c: float, regime: str) -> tuple[float, float]:
    lo_pd = max(0.0, -2.0 * c)
    if regime == "positive_definite":
        return (lo_pd + POLE_MARGIN, lo_pd + 3.0)
    if regime == "indefinite_4n_4":
        if c >= 0.0:
            raise ArgumentError("regime indefinite_4n_4 needs c < 0")
        return (-c + POLE_MARGIN, -2.0 * c - POLE_MARGIN)
    if regime == "indefinite_4_4n":
        if c <= 0.0:
            raise ArgumentError("regime indefinite_4_4n needs c > 0")
        return (-c + POLE_MARGIN, -POLE_MARGIN)
    raise ArgumentError(f"unknown regime {regime!r}")


def admissible_regimes(c: float) -> list[str]:
    out = ["positive_definite"]
    if c < 0.0:
        out.append("indefinite_4n_4")
    if c > 0.0:
        out.append("indefinite_4_4n")
    return out


def sample_rho(c: float, regime: str, rng: np.random.Generator) -> float:
    lo, hi = regime_interval(c, regime)
    return float(rng.uniform(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo)))


def sample_qk_point(
    prep: Prepotential,
    c: float,
    rng: np.random.Generator,
    regime: str | None = None,
    fiber_half_width: float = 2.0,
) -> QKChartPoint:
    if regime is None:
        choices = admissible_regimes(c)
        regime = choices[int(rng.integers(len(choices)))]
    x = sample_projective_point(prep, rng)
    rho = sample_rho(c, regime, rng)
    zt, zc = sample_fibers(prep.dim, rng, fiber_half_width)
    return QKChartPoint.make(x, rho, float(rng.uniform(-3.0, 3.0)), zt, zc)


def sample_qk_points(
    prep: Prepotential,
    c: float,
    count: int,
    rng: np.random.Generator,
    regime: str | None = None,
    fiber_half_width: float = 2.0,
) -> list[QKChartPoint]:
    return [sample_qk_point(prep, c, rng, regime, fiber_half_width) for _ in range(count)]
