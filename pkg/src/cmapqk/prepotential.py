"""Homogeneous degree-2 holomorphic prepotentials with exact derivative jets.

Two closed-form families are provided:

* quadratic:  F(z) = (i/2) (z^0)^2 - (i/2) sum_{mu>=1} (z^mu)^2
* cubic:      F(z) = sum C_{mu nu la} z^mu z^nu z^la / z^0   (mu, nu, la >= 1)

Both are homogeneous of degree 2, so the Euler identities

    sum_I z^I F_I = 2 F,   sum_I z^I F_IJ = F_J,   sum_I z^I F_IJK = 0

hold exactly; `homogeneity_residual` measures them numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, DomainError

_MAX_ORDER = 4


@dataclass(frozen=True)
class HoloJet:
    """Derivatives of F at a point, up to the requested order.

    Slots above `order` are None.  All tensors are totally symmetric.
    """

    order: int
    value: complex
    grad: np.ndarray | None = None
    hess: np.ndarray | None = None
    third: np.ndarray | None = None
    fourth: np.ndarray | None = None


def _symmetrize3(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for p in permutations(range(3)):
        out += np.transpose(t, p)
    return out / 6.0


@dataclass(frozen=True)
class Prepotential:
    """A member of one of the built-in prepotential families.

    Parameters
    ----------
    n : int
        Complex dimension of the projective base; F is a function of n+1
        complex variables z^0..z^n.
    family : str
        "quadratic" or "cubic".
    cubic_coeffs : ndarray, shape (n, n, n)
        Fully symmetric coefficient tensor of the cubic family (indices
        1..n of z, stored 0-based).  Unused for the quadratic family.
    symmetrized : bool
        True if constructing the symmetric tensor changed the user input.
    """

    n: int
    family: str
    cubic_coeffs: np.ndarray | None = None
    symmetrized: bool = field(default=False, compare=False)

    @classmethod
    def quadratic(cls, n: int) -> "Prepotential":
        if n < 0:
            raise ArgumentError("n must be >= 0")
        return cls(n=n, family="quadratic")

    @classmethod
    def cubic(cls, n: int, monomials: Iterable[tuple[int, int, int, float]]) -> "Prepotential":
        """Cubic family from monomial coefficients.

        Each entry (mu, nu, la, value) adds ``value * z^mu z^nu z^la`` to the
        cubic form (1-based indices, order-insensitive).  The stored tensor is
        fully symmetric, so F(z) = sum_{mu,nu,la} C z^mu z^nu z^la / z^0.
        """
        if n < 1:
            raise ArgumentError("cubic family needs n >= 1")
        raw = np.zeros((n, n, n))
        for mu, nu, la, val in monomials:
            idx = (int(mu) - 1, int(nu) - 1, int(la) - 1)
            if min(idx) < 0 or max(idx) >= n:
                raise ArgumentError(f"cubic index out of range: {(mu, nu, la)}")
            # distribute the monomial coefficient over its distinct permutations
            perms = set(permutations(idx))
            for p in perms:
                raw[p] += float(val) / len(perms)
        sym = _symmetrize3(raw)
        changed = bool(np.max(np.abs(sym - raw)) > 0.0)
        return cls(n=n, family="cubic", cubic_coeffs=sym, symmetrized=changed)

    @classmethod
    def stu(cls) -> "Prepotential":
        """The n=3 instance F = z^1 z^2 z^3 / z^0."""
        return cls.cubic(3, [(1, 2, 3, 1.0)])

    @property
    def dim(self) -> int:
        """Number of complex variables, n+1."""
        return self.n + 1

    def is_admissible(self, z: Sequence[complex]) -> bool:
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.dim,):
            return False
        if self.family == "cubic" and abs(z[0]) < 1e-300:
            return False
        return True

    def _check_point(self, z: Sequence[complex]) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.dim,):
            raise ArgumentError(f"point must have {self.dim} complex entries, got shape {z.shape}")
        if self.family == "cubic" and abs(z[0]) < 1e-300:
            raise DomainError("cubic prepotential undefined at z^0 = 0")
        return z


def _quadratic_jet(prep: Prepotential, z: np.ndarray, order: int) -> HoloJet:
    m = prep.dim
    q = np.ones(m)
    q[1:] = -1.0
    value = 0.5j * np.dot(z, q * z)
    grad = hess = third = fourth = None
    if order >= 1:
        grad = 1j * q * z
    if order >= 2:
        hess = 1j * np.diag(q)
    if order >= 3:
        third = np.zeros((m, m, m), dtype=complex)
    if order >= 4:
        fourth = np.zeros((m, m, m, m), dtype=complex)
    return HoloJet(order, complex(value), grad, hess, third, fourth)


def _cubic_jet(prep: Prepotential, z: np.ndarray, order: int) -> HoloJet:
    m = prep.dim
    n = prep.n
    c = prep.cubic_coeffs
    u = z[0]
    zp = z[1:]
    # contractions of the symmetric tensor with the base variables
    c1 = np.einsum("abc,c->ab", c, zp)          # C(., ., z')
    c2 = np.einsum("ab,b->a", c1, zp)           # C(., z', z')
    p = np.dot(c2, zp)                          # C(z', z', z')

    value = p / u
    grad = hess = third = fourth = None
    if order >= 1:
        grad = np.zeros(m, dtype=complex)
        grad[0] = -p / u**2
        grad[1:] = 3.0 * c2 / u
    if order >= 2:
        hess = np.zeros((m, m), dtype=complex)
        hess[0, 0] = 2.0 * p / u**3
        hess[0, 1:] = -3.0 * c2 / u**2
        hess[1:, 0] = hess[0, 1:]
        hess[1:, 1:] = 6.0 * c1 / u
    if order >= 3:
        # entries depend only on how many indices equal 0; c, c1, c2 are symmetric
        third = np.zeros((m, m, m), dtype=complex)
        for idx in np.ndindex(m, m, m):
            zeros = idx.count(0)
            base = tuple(i - 1 for i in idx if i != 0)
            if zeros == 3:
                third[idx] = -6.0 * p / u**4
            elif zeros == 2:
                third[idx] = 6.0 * c2[base[0]] / u**3
            elif zeros == 1:
                third[idx] = -6.0 * c1[base] / u**2
            else:
                third[idx] = 6.0 * c[base] / u
    if order >= 4:
        fourth = np.zeros((m, m, m, m), dtype=complex)
        for idx in np.ndindex(m, m, m, m):
            zeros = idx.count(0)
            base = tuple(i - 1 for i in idx if i != 0)
            if zeros == 4:
                fourth[idx] = 24.0 * p / u**5
            elif zeros == 3:
                fourth[idx] = -18.0 * c2[base[0]] / u**4
            elif zeros == 2:
                fourth[idx] = 12.0 * c1[base] / u**3
            elif zeros == 1:
                fourth[idx] = -6.0 * c[base] / u**2
            # all-base fourth derivative of a cubic form vanishes
    return HoloJet(order, complex(value), grad, hess, third, fourth)


def eval_jet(prep: Prepotential, z: Sequence[complex], order: int = 2) -> HoloJet:
    """Exact derivatives of F at z up to `order` (0..4)."""
    if not (0 <= order <= _MAX_ORDER):
        raise ArgumentError(f"order must be in 0..{_MAX_ORDER}, got {order}")
    zz = prep._check_point(z)
    if prep.family == "quadratic":
        return _quadratic_jet(prep, zz, order)
    return _cubic_jet(prep, zz, order)


def homogeneity_residual(prep: Prepotential, z: Sequence[complex]) -> float:
    """Max violation of the degree-2 Euler identities at z."""
    jet = eval_jet(prep, z, order=3)
    return homogeneity_residual_of_jet(np.asarray(z, dtype=complex), jet)


def homogeneity_residual_of_jet(z: np.ndarray, jet: HoloJet) -> float:
    """Euler-identity residual of an externally supplied jet (order >= 3)."""
    if jet.order < 3:
        raise ArgumentError("homogeneity residual needs a jet of order >= 3")
    r0 = abs(np.dot(z, jet.grad) - 2.0 * jet.value)
    r1 = float(np.max(np.abs(jet.hess @ z - jet.grad)))
    r2 = float(np.max(np.abs(np.einsum("i,ijk->jk", z, jet.third))))
    return max(r0, r1, r2)
