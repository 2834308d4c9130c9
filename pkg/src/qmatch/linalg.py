"""Complex linear algebra for small Hermitian problems.

Conventions: vectors are 1-D ``complex128`` arrays, operators are square
2-D ``complex128`` arrays, and eigenvectors are returned as matrix
columns.  The eigensolver is a cyclic Jacobi iteration specialised to
Hermitian input; robustness is preferred over speed since the matrices
in this package are tiny (dimension 2 to a few hundred).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NumericError, ShapeError

# Relative Frobenius tolerance accepted when checking Hermitian symmetry.
HERMITIAN_ATOL = 1e-8

# Off-diagonal mass below this fraction of ||A||_F counts as diagonal.
JACOBI_TOL = 1e-12

# Hard cap on full Jacobi sweeps before declaring non-convergence.
JACOBI_MAX_SWEEPS = 100


def _as_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {a.shape}")
    return a


def outer_product(v: np.ndarray) -> np.ndarray:
    """Rank-one projector-style outer product |v><v|.

    Element (i, j) is ``v[i] * conj(v[j])``.  Real and imaginary parts
    are combined explicitly (rather than via complex multiply, which may
    use FMA) so that (j, i) is the conjugate of (i, j) bit-exactly and
    the diagonal is exactly real.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1:
        raise ShapeError(f"expected a vector, got shape {v.shape}")
    re, im = v.real, v.imag
    return (np.outer(re, re) + np.outer(im, im)) + 1j * (
        np.outer(im, re) - np.outer(re, im)
    )


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with an explicit inner-dimension check."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul needs 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    return a @ b


def trace(a: np.ndarray) -> complex:
    """Sum of diagonal entries of a square matrix."""
    a = _as_square(a)
    return complex(np.trace(a))


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def hermitian_deviation(a: np.ndarray) -> float:
    """Frobenius norm of the anti-Hermitian part, ||A - A^dagger||_F."""
    a = _as_square(a)
    return float(np.linalg.norm(a - a.conj().T))


def is_hermitian(a: np.ndarray, atol: float | None = None) -> bool:
    a = _as_square(a)
    if atol is None:
        atol = HERMITIAN_ATOL * max(1.0, frobenius_norm(a))
    return hermitian_deviation(a) <= atol


def hermitize(a: np.ndarray) -> np.ndarray:
    """Average away roundoff asymmetry: (A + A^dagger) / 2."""
    a = _as_square(a)
    return 0.5 * (a + a.conj().T)


@dataclass
class EigenDecomposition:
    """Eigenvalues (descending, real) and matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values) @ v.conj().T


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eig(a: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each sweep visits every upper-triangle pivot (p, q) and applies the
    two-sided unitary rotation that zeroes A[p, q].  For a complex pivot
    the rotation is a real Jacobi rotation composed with a phase so that
    the 2x2 block [[a_pp, a_pq], [conj(a_pq), a_qq]] diagonalises exactly.

    Returns eigenvalues sorted descending with eigenvectors as columns.
    Raises DomainError for non-Hermitian input and NumericError (naming
    the residual) if the off-diagonal mass has not dropped below
    JACOBI_TOL * ||A||_F after JACOBI_MAX_SWEEPS sweeps.
    """
    a = _as_square(a)
    n = a.shape[0]
    norm = frobenius_norm(a)
    if hermitian_deviation(a) > HERMITIAN_ATOL * max(1.0, norm):
        raise DomainError(
            f"matrix is not Hermitian: deviation {hermitian_deviation(a):.3e} "
            f"exceeds tolerance {HERMITIAN_ATOL * max(1.0, norm):.3e}"
        )
    if n == 1:
        return EigenDecomposition(
            values=np.array([a[0, 0].real]), vectors=np.eye(1, dtype=np.complex128)
        )

    # Work on an exactly Hermitian copy to keep roundoff symmetric.
    m = hermitize(a)
    v = np.eye(n, dtype=np.complex128)
    threshold = JACOBI_TOL * max(norm, np.finfo(np.float64).tiny)
    # Rotations cannot push a pivot below roundoff scale; skip tiny pivots.
    pivot_floor = 1e-18 * max(norm, np.finfo(np.float64).tiny)

    converged = _offdiag_norm(m) <= threshold
    for _ in range(JACOBI_MAX_SWEEPS):
        if converged:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                mag = abs(apq)
                if mag <= pivot_floor:
                    continue
                app = m[p, p].real
                aqq = m[q, q].real
                phase = apq / mag
                # Real rotation angle for the phase-stripped 2x2 block.
                tau = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                # Unitary U = [[c, s*phase], [-s*conj(phase)... columns act on (p, q).
                u_pp = c
                u_pq = s * phase
                u_qp = -s * np.conj(phase)
                u_qq = c
                # m <- U^dagger m U, applied as column then row updates.
                col_p = m[:, p].copy()
                col_q = m[:, q].copy()
                m[:, p] = col_p * u_pp + col_q * u_qp
                m[:, q] = col_p * u_pq + col_q * u_qq
                row_p = m[p, :].copy()
                row_q = m[q, :].copy()
                m[p, :] = row_p * np.conj(u_pp) + row_q * np.conj(u_qp)
                m[q, :] = row_p * np.conj(u_pq) + row_q * np.conj(u_qq)
                # Pin the algebraically-zero entries and real diagonal.
                m[p, q] = 0.0
                m[q, p] = 0.0
                m[p, p] = m[p, p].real
                m[q, q] = m[q, q].real
                col_p = v[:, p].copy()
                col_q = v[:, q].copy()
                v[:, p] = col_p * u_pp + col_q * u_qp
                v[:, q] = col_p * u_pq + col_q * u_qq
        converged = _offdiag_norm(m) <= threshold

    if not converged:
        residual = _offdiag_norm(m)
        raise NumericError(
            f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps; "
            f"off-diagonal residual {residual:.3e} (threshold {threshold:.3e})"
        )

    values = np.diag(m).real.copy()
    order = np.argsort(values)[::-1]
    return EigenDecomposition(values=values[order], vectors=v[:, order])


def matrix_function(
    a: np.ndarray, f: Callable[[np.ndarray], np.ndarray], eigen_floor: float = 0.0
) -> np.ndarray:
    """Apply a scalar function to a Hermitian PSD matrix via its spectrum.

    Eigenvalues are clamped from below at ``eigen_floor`` before f is
    applied, which regularises log/inverse-style functions on nearly
    singular input.  The result is V f(Lambda) V^dagger.
    """
    eig = hermitian_eig(a)
    norm = max(1.0, frobenius_norm(a))
    if eig.values.min() < -HERMITIAN_ATOL * norm:
        raise DomainError(
            f"matrix is not positive semidefinite: min eigenvalue {eig.values.min():.3e}"
        )
    clamped = np.maximum(eig.values, eigen_floor)
    fvals = np.asarray(f(clamped), dtype=np.float64)
    if not np.all(np.isfinite(fvals)):
        raise NumericError("matrix function produced non-finite eigenvalues")
    return (eig.vectors * fvals) @ eig.vectors.conj().T


def complex_add_polar(
    r1: float, theta1: float, r2: float, theta2: float
) -> tuple[float, float]:
    """Add two complex numbers given in polar form, returning polar form.

    Magnitude: r = sqrt(r1^2 + r2^2 + 2 r1 r2 cos(theta2 - theta1)),
    evaluated in the half-angle form (r1+r2)^2 - 4 r1 r2 sin^2(d/2) so
    that aligned phases degenerate to plain real addition without
    roundoff.  Angle: atan2 of the rectangular components; a zero-length
    result takes theta = 0 by convention.
    """
    for name, r in (("r1", r1), ("r2", r2)):
        if r < 0.0 or not math.isfinite(r):
            raise DomainError(f"{name} must be a finite non-negative magnitude, got {r}")
    if not (math.isfinite(theta1) and math.isfinite(theta2)):
        raise DomainError("phases must be finite")
    delta = theta2 - theta1
    radicand = (r1 + r2) ** 2 - 4.0 * r1 * r2 * math.sin(0.5 * delta) ** 2
    r = math.sqrt(max(radicand, 0.0))
    if r == 0.0:
        return 0.0, 0.0
    re = r1 * math.cos(theta1) + r2 * math.cos(theta2)
    im = r1 * math.sin(theta1) + r2 * math.sin(theta2)
    return r, math.atan2(im, re)
