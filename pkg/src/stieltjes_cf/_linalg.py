"""Small dense linear-algebra helpers shared by the other modules.

Everything here works on plain complex ``numpy`` arrays; a "matrix" is a
square 2-D array and a scalar function is the ``n = 1`` case.
"""
import numpy as np

TOL_PSD = 1e-9
TOL_RANK = 1e-10
TOL_HERM = 1e-9


def as_matrix(value, n=None):
    """Return ``value`` as a complex square matrix.

    Scalars become ``1x1`` matrices. ``n`` optionally enforces the size.
    """
    m = np.array(value, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise ValueError(f"expected a {n}x{n} matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def frozen(m):
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


def opnorm(m):
    """Spectral norm; zero for empty matrices."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def hermitian_part(m):
    return 0.5 * (m + m.conj().T)


def hermitian_defect(m):
    """Relative distance of ``m`` from the Hermitian matrices."""
    return opnorm(m - m.conj().T) / max(1.0, opnorm(m))


def min_eigenvalue(m):
    return float(np.linalg.eigvalsh(hermitian_part(m))[0])


def max_eigenvalue(m):
    return float(np.linalg.eigvalsh(hermitian_part(m))[-1])


def is_psd(m, tol=TOL_PSD, scale=None):
    """PSD test on the Hermitian part, scale-invariant.

    The smallest eigenvalue must be ``>= -tol * max(1, scale)`` where
    ``scale`` defaults to the spectral norm of ``m``.
    """
    if scale is None:
        scale = opnorm(m)
    return min_eigenvalue(m) >= -tol * max(1.0, scale)


def rank(m, tol=TOL_RANK):
    """Numerical rank of a PSD matrix.

    Eigenvalues ``<= tol * lambda_max`` count as zero.
    """
    if m.size == 0:
        return 0
    w = np.linalg.eigvalsh(hermitian_part(m))
    top = w[-1]
    if top <= 0:
        return 0
    return int(np.sum(w > tol * top))


def psd_factor(m, tol=TOL_RANK):
    """Return ``F`` (rank x n) with ``F^* F`` equal to the PSD part of ``m``."""
    w, v = np.linalg.eigh(hermitian_part(m))
    top = w[-1] if w.size else 0.0
    if top <= 0:
        return np.zeros((0, m.shape[0]), dtype=complex)
    keep = w > tol * top
    return (np.sqrt(w[keep])[:, None] * v[:, keep].conj().T).astype(complex)


def range_basis(m, tol=TOL_RANK):
    """Orthonormal basis (columns) of the range of a PSD matrix."""
    w, v = np.linalg.eigh(hermitian_part(m))
    top = w[-1] if w.size else 0.0
    if top <= 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    return v[:, w > tol * top].astype(complex)


def clip_psd(m):
    """Hermitize and drop negative eigenvalues."""
    w, v = np.linalg.eigh(hermitian_part(m))
    w = np.clip(w, 0.0, None)
    return (v * w) @ v.conj().T


def relative_error(a, b):
    """``||a - b|| / ||b||`` with a floor on the denominator."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    denom = max(opnorm(b), np.finfo(float).tiny)
    return opnorm(a - b) / denom
