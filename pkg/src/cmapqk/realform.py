"""Conversions between complex tensors and their real-chart matrix forms.

All real charts in this package order coordinates as (Re z^0..Re z^n,
Im z^0..Im z^n) for a complex chart z, followed by any additional real
coordinates.  The helpers here realise Hermitian forms, holomorphic
Jacobians and complex covectors as real matrices/vectors in that ordering.
"""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError


def sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def check_symmetric(a: np.ndarray, tol: float = 1e-13, what: str = "matrix") -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > tol * scale:
        raise ArgumentError(f"{what} is not symmetric to {tol:g}")
    return sym(a)


def hermitian_to_real_metric(h: np.ndarray) -> np.ndarray:
    """Real matrix of sum h_{IJ} dz^I dzbar^J in the (Re z, Im z) chart.

    For h = S + iA (S symmetric, A antisymmetric, both real) the symmetric
    real form is [[S, A], [-A, S]].
    """
    s = np.real(h)
    a = np.imag(h)
    s = 0.5 * (s + s.T)
    a = 0.5 * (a - a.T)
    return np.block([[s, a], [-a, s]])


def hermitian_pairing_to_real(coeffs: np.ndarray) -> np.ndarray:
    """Real symmetric matrix of |sum c_a de^a|^2 = (sum c_a de^a)(sum cbar_b de^b).

    `coeffs` is a complex covector in an already-real chart; the symmetric
    product has real components Re(c_a cbar_b).
    """
    c = np.asarray(coeffs, dtype=complex)
    return np.real(np.outer(c, np.conj(c)))


def holomorphic_jacobian_to_real(dw_dz: np.ndarray) -> np.ndarray:
    """Real Jacobian of a holomorphic map w(z) between (Re, Im)-ordered charts.

    For w = u + iv and z = x + iy the block form is
    [[Re J, -Im J], [Im J, Re J]] with J = dw/dz.
    """
    re = np.real(dw_dz)
    im = np.imag(dw_dz)
    return np.block([[re, -im], [im, re]])


def wirtinger_to_real_differential(c: np.ndarray) -> np.ndarray:
    """Real components of dh for a real function h with Wirtinger gradient c.

    dh = 2 Re(sum c_I dz^I) has components (2 Re c, -2 Im c) in the
    (Re z, Im z) chart.
    """
    c = np.asarray(c, dtype=complex)
    return np.concatenate([2.0 * np.real(c), -2.0 * np.imag(c)])


def wirtinger_to_dc(c: np.ndarray) -> np.ndarray:
    """Real components of d^c h = i(dbar - d)h, given the Wirtinger gradient c.

    In the (Re z, Im z) chart the components are (2 Im c, 2 Re c).
    """
    c = np.asarray(c, dtype=complex)
    return np.concatenate([2.0 * np.imag(c), 2.0 * np.real(c)])


def outer_sym(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Symmetrised outer product a (x) b + b (x) a over 2 (= a^2 for b=None)."""
    if b is None:
        return np.outer(a, a)
    return 0.5 * (np.outer(a, b) + np.outer(b, a))


def embed_matrix(block: np.ndarray, dim: int, offset: int = 0) -> np.ndarray:
    """Place `block` into a dim x dim zero matrix at the given diagonal offset."""
    out = np.zeros((dim, dim))
    k = block.shape[0]
    out[offset:offset + k, offset:offset + k] = block
    return out
