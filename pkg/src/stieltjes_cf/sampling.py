"""Deterministic sample points and random class-G instances."""
import numpy as np

VERIFICATION_SEED = 20240611


def verification_points(count=20, seed=VERIFICATION_SEED):
    """Seeded complex points with modulus in [0.1, 10].

    Arguments stay at least 0.1 rad away from the negative real axis, where
    the poles of every class-G function live.
    """
    rng = np.random.default_rng(seed)
    radius = 10.0 ** rng.uniform(-1.0, 1.0, size=count)
    angle = rng.uniform(-np.pi + 0.1, np.pi - 0.1, size=count)
    return radius * np.exp(1j * angle)


def off_axis_points(count=40, seed=VERIFICATION_SEED, min_angle=0.1):
    """Seeded points in both half-planes, at least ``min_angle`` off the real axis."""
    rng = np.random.default_rng(seed + 1)
    radius = 10.0 ** rng.uniform(-1.0, 1.0, size=count)
    angle = rng.uniform(min_angle, np.pi - min_angle, size=count)
    sign = np.where(np.arange(count) % 2 == 0, 1.0, -1.0)
    return radius * np.exp(1j * sign * angle)


def random_psd(rng, n, rank=None, scale=1.0):
    """Random complex PSD matrix of the given rank."""
    if rank is None:
        rank = n
    f = rng.standard_normal((rank, n)) + 1j * rng.standard_normal((rank, n))
    m = f.conj().T @ f / max(rank, 1)
    return scale * 0.5 * (m + m.conj().T)


def random_class_g(rng, n, d, ranks=None, affine=True):
    """Random member of class G with ``d`` poles.

    ``f(0)`` is an independent random PSD matrix, so certification holds by
    construction: ``B = f(0) + sum C_j / lambda_j``.
    """
    from .core import PoleResidueForm

    if ranks is None:
        ranks = rng.integers(1, n + 1, size=d)
    lambdas = np.sort(10.0 ** rng.uniform(-1.0, 1.0, size=d))
    while d > 1 and np.min(np.diff(lambdas) / lambdas[1:]) < 1e-3:
        lambdas = np.sort(10.0 ** rng.uniform(-1.0, 1.0, size=d))
    residues = [random_psd(rng, n, int(r)) for r in ranks]
    if affine:
        a = random_psd(rng, n, int(rng.integers(0, n + 1)))
        f0 = random_psd(rng, n, int(rng.integers(0, n + 1)))
    else:
        a = np.zeros((n, n))
        f0 = np.zeros((n, n))
    b = f0 + sum((c / lam for lam, c in zip(lambdas, residues)), np.zeros((n, n)))
    return PoleResidueForm(a, b, list(zip(lambdas, residues)))
