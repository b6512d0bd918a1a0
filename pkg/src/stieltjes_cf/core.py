"""Rational matrix-valued Stieltjes functions of class G.

A class-G function is

    f(z) = A z + B - sum_j C_j / (z + lambda_j)

with ``A, B, C_j`` positive semidefinite, ``lambda_j > 0`` and ``f(0) >= 0``.
This module holds the pole-residue and Stieltjes-measure representations,
certification (coefficient tests and sampled Nevanlinna kernels), and the
elementary transforms that keep the class invariant.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import _linalg as la
from .errors import (NotClassGError, PoleProximityError, RealAxisPointError,
                     TranslationViolationError)
from .sampling import verification_points

TOL_POLE = 1e-9
TOL_EVAL = 1e-12

__all__ = [
    "PoleResidueForm", "StieltjesForm", "MeasureDecomposition",
    "RealizationForm", "Check", "CertificateReport", "KernelSample",
    "KernelReport", "evaluate_pole_residue", "certify_class_G",
    "require_class_G", "sample_kernel_certificates",
    "stieltjes_kernel_certificates", "reflect", "translate", "to_stieltjes",
    "from_stieltjes", "measure_decomposition", "partial_mcmillan_degree",
    "build_realization",
]


def _merge_terms(terms, n):
    """Sort (location, matrix) pairs, merge close locations, drop null matrices."""
    items = sorted(((float(lam), la.as_matrix(m, n)) for lam, m in terms),
                   key=lambda t: t[0])
    merged = []
    for lam, m in items:
        if merged:
            prev_lam, prev_m = merged[-1]
            gap = abs(lam - prev_lam)
            if gap <= TOL_POLE * max(abs(lam), abs(prev_lam)):
                merged[-1] = (prev_lam, prev_m + m)
                continue
        merged.append((lam, m))
    return tuple((lam, la.frozen(m)) for lam, m in merged if np.any(m != 0))


@dataclass(frozen=True, eq=False)
class PoleResidueForm:
    """``f(z) = A z + B - sum_j C_j / (z + lambda_j)``.

    Poles are stored sorted by ``lambda``; poles closer than ``1e-9`` in
    relative distance are merged (residues summed) and exactly zero residues
    are dropped, so the representation is canonical. Certification of the
    class-G conditions is separate (:func:`certify_class_G`).
    """

    A: np.ndarray
    B: np.ndarray
    poles: Tuple[Tuple[float, np.ndarray], ...] = ()

    def __post_init__(self):
        a = la.as_matrix(self.A)
        n = a.shape[0]
        b = la.as_matrix(self.B, n)
        object.__setattr__(self, "A", la.frozen(a))
        object.__setattr__(self, "B", la.frozen(b))
        object.__setattr__(self, "poles", _merge_terms(self.poles, n))

    @classmethod
    def scalar(cls, a=0.0, b=0.0, poles=()):
        """Scalar constructor: ``poles`` is a sequence of ``(lambda, c)``."""
        return cls([[a]], [[b]], [(lam, [[c]]) for lam, c in poles])

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def lambdas(self):
        return np.array([lam for lam, _ in self.poles], dtype=float)

    @property
    def residues(self):
        return [c for _, c in self.poles]

    @property
    def is_scalar(self):
        return self.n == 1

    def value_at_zero(self):
        """``f(0) = B - sum C_j / lambda_j``."""
        out = self.B.copy()
        for lam, c in self.poles:
            out = out - c / lam
        return out

    def derivative_at_zero(self):
        """``f'(0) = A + sum C_j / lambda_j**2`` (closed form)."""
        out = self.A.copy()
        for lam, c in self.poles:
            out = out + c / lam ** 2
        return out

    def scale(self):
        """Magnitude used to make tolerances relative."""
        total = la.opnorm(self.B) + sum(la.opnorm(c) / abs(lam)
                                        for lam, c in self.poles)
        return max(1.0, la.opnorm(self.A), total)

    def magnitude_at(self, z):
        """Upper bound on the summands of ``f(z)``, for rounding estimates."""
        total = la.opnorm(self.A) * abs(z) + la.opnorm(self.B)
        for lam, c in self.poles:
            total += la.opnorm(c) / abs(z + lam)
        return total

    def __call__(self, z):
        return evaluate_pole_residue(self, z)

    def __repr__(self):
        return (f"PoleResidueForm(n={self.n}, poles={len(self.poles)}, "
                f"lambdas={self.lambdas.tolist()})")


@dataclass(frozen=True, eq=False)
class StieltjesForm:
    """``h(z) = A + sum_j W_j / (z + lambda_j)`` with ``lambda_j >= 0``.

    This is ``f(z) / z`` for ``f`` in class G; the weights are the point
    masses of the representing measure, including a possible mass at 0.
    """

    A: np.ndarray
    terms: Tuple[Tuple[float, np.ndarray], ...] = ()

    def __post_init__(self):
        a = la.as_matrix(self.A)
        object.__setattr__(self, "A", la.frozen(a))
        object.__setattr__(self, "terms", _merge_terms(self.terms, a.shape[0]))

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def lambdas(self):
        return np.array([lam for lam, _ in self.terms], dtype=float)

    @property
    def weights(self):
        return [w for _, w in self.terms]

    def point_mass_at_zero(self):
        for lam, w in self.terms:
            if lam == 0.0:
                return w.copy()
        return np.zeros_like(self.A)

    def __call__(self, z):
        z = complex(z)
        out = self.A.copy()
        for lam, w in self.terms:
            gap = z + lam
            if abs(gap) <= TOL_EVAL * (1.0 + abs(z)):
                raise PoleProximityError(f"z={z} is at the pole {-lam}")
            out = out + w / gap
        return out


@dataclass(frozen=True, eq=False)
class MeasureDecomposition:
    """Split of the measure of ``h = f/z`` into the mass at 0 and ``t dSigma``.

    ``shifted_terms`` holds the point masses of ``dSigma_1 = t dSigma``, which
    has no mass at ``t = 0``.
    """

    A: np.ndarray
    total_mass: np.ndarray
    shifted_terms: Tuple[Tuple[float, np.ndarray], ...]
    point_mass_at_zero: np.ndarray

    def residual(self):
        """``point_mass - (total_mass - sum shifted / lambda)``, ideally zero."""
        expected = self.total_mass.copy()
        for lam, w in self.shifted_terms:
            expected = expected - w / lam
        return self.point_mass_at_zero - expected


@dataclass(frozen=True, eq=False)
class RealizationForm:
    """``f(z) = z [A + K^* (S + z I)^{-1} K]`` with ``S = diag(s) >= 0``.

    ``K`` has shape ``(m, n)`` so that ``K^* (S + zI)^{-1} K`` is ``n x n``.
    """

    A: np.ndarray
    K: np.ndarray
    s: np.ndarray

    @property
    def S(self):
        return np.diag(self.s)

    @property
    def state_dimension(self):
        return self.s.shape[0]

    def __call__(self, z):
        z = complex(z)
        inner = self.A.astype(complex)
        if self.s.size:
            inner = inner + self.K.conj().T @ (self.K / (self.s + z)[:, None])
        return z * inner


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class CertificateReport:
    """Per-condition outcome of :func:`certify_class_G`.

    ``value`` is the minimal eigenvalue of the tested matrix (or the pole
    location for the positivity-of-lambda checks); a check passes when
    ``value >= threshold``.
    """

    checks: Tuple[Check, ...]
    tol: float

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class KernelSample:
    z: complex
    kernel_min: float
    cokernel_max: float
    scale: float
    passed: bool


@dataclass(frozen=True)
class KernelReport:
    samples: Tuple[KernelSample, ...]
    tol: float

    @property
    def passed(self):
        return all(s.passed for s in self.samples)

    @property
    def worst_slack(self):
        """Most negative normalised slack over both kernels (>= -tol passes)."""
        if not self.samples:
            return 0.0
        return min(min(s.kernel_min, -s.cokernel_max) / s.scale
                   for s in self.samples)


def evaluate_pole_residue(f, z, tol_pole=TOL_EVAL):
    """Evaluate ``A z + B - sum C_j / (z + lambda_j)`` at a complex point."""
    z = complex(z)
    out = f.A * z + f.B
    for lam, c in f.poles:
        gap = z + lam
        if abs(gap) <= tol_pole * (1.0 + abs(z)):
            raise PoleProximityError(f"z={z} is within tolerance of the pole {-lam}")
        out = out - c / gap
    return out


def certify_class_G(f, tol=la.TOL_PSD):
    """Check every defining condition of class G and report each one.

    Failures are reported, never raised. Matrices must be Hermitian and
    have minimal eigenvalue ``>= -tol * max(1, ||M||)``; for ``f(0)`` the
    norm is replaced by the scale of its summands ``||B|| + sum ||C_j||/lambda_j``
    because ``f(0)`` is formed with cancellation.
    """
    checks = []

    def psd_check(name, m, scale=None):
        if scale is None:
            scale = la.opnorm(m)
        threshold = -tol * max(1.0, scale)
        hermitian = la.hermitian_defect(m) <= tol
        value = la.min_eigenvalue(m)
        checks.append(Check(name, value, threshold, hermitian and value >= threshold))

    psd_check("A>=0", f.A)
    psd_check("B>=0", f.B)
    for j, (lam, c) in enumerate(f.poles):
        psd_check(f"C[{j}]>=0", c)
        checks.append(Check(f"lambda[{j}]>0", lam, 0.0, lam > 0.0))
    if all(lam > 0 for lam in f.lambdas):
        scale = la.opnorm(f.B) + sum(la.opnorm(c) / lam for lam, c in f.poles)
        psd_check("f(0)>=0", f.value_at_zero(), scale)
    else:
        checks.append(Check("f(0)>=0", float("nan"), 0.0, False))
    return CertificateReport(tuple(checks), tol)


def require_class_G(f, tol=la.TOL_PSD):
    report = certify_class_G(f, tol)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise NotClassGError(f"function is not in class G (failed: {names})", report)
    return report


def _kernel_sample(value, z, magnitude, tol):
    value = la.as_matrix(value)
    gap = z - np.conj(z)
    kernel = (value - value.conj().T) / gap
    cokernel = (np.conj(z) * value - z * value.conj().T) / gap
    scale = max(1.0, magnitude * max(1.0, abs(z)) / abs(z.imag))
    kmin = la.min_eigenvalue(kernel)
    cmax = la.max_eigenvalue(cokernel)
    ok = kmin >= -tol * scale and cmax <= tol * scale
    return KernelSample(z, kmin, cmax, scale, ok)


def sample_kernel_certificates(f, points, tol=la.TOL_PSD):
    """Sample the two Nevanlinna kernels that characterise class G.

    At each ``z`` off the real axis, ``(f - f^*)/(z - conj z)`` must be PSD
    and ``(conj(z) f - z f^*)/(z - conj z)`` must be NSD. ``f`` may be a
    :class:`PoleResidueForm` or any callable returning a scalar/matrix.
    The slack allowed is ``tol`` times a rounding scale of the evaluation.
    """
    samples = []
    for z in np.atleast_1d(points):
        z = complex(z)
        if z.imag == 0.0:
            raise RealAxisPointError(f"kernel certificates need Im z != 0, got {z}")
        if isinstance(f, PoleResidueForm):
            value = evaluate_pole_residue(f, z)
            magnitude = f.magnitude_at(z)
        else:
            value = la.as_matrix(f(z))
            magnitude = la.opnorm(value)
        samples.append(_kernel_sample(value, z, magnitude, tol))
    return KernelReport(tuple(samples), tol)


def stieltjes_kernel_certificates(h, points, tol=la.TOL_PSD):
    """Kernel test for a Stieltjes function ``h`` given as a callable.

    ``h`` is Stieltjes exactly when ``z h(z)`` is in class G, so the class-G
    kernels are sampled on ``z -> z h(z)``.
    """
    return sample_kernel_certificates(lambda z: z * la.as_matrix(h(z)), points, tol)


def reflect(f, tol=la.TOL_PSD):
    """Return ``g(z) = z f(1/z)``.

    ``g`` has linear term ``f(0)``, constant ``A + sum C_j/lambda_j**2`` and
    poles ``1/lambda_j`` with residues ``C_j / lambda_j**3``.
    """
    require_class_G(f, tol)
    poles = [(1.0 / lam, c / lam ** 3) for lam, c in f.poles]
    return PoleResidueForm(la.hermitian_part(f.value_at_zero()),
                           f.derivative_at_zero(), poles)


def translate(f, A1, B1, tol=la.TOL_PSD):
    """Return ``f(z) + A1 z + B1``; requires ``A1 >= 0`` and ``B1 >= -f(0)``."""
    a1 = la.as_matrix(A1, f.n)
    b1 = la.as_matrix(B1, f.n)
    if la.hermitian_defect(a1) > tol or not la.is_psd(a1, tol):
        raise TranslationViolationError("A1 must be positive semidefinite")
    if la.hermitian_defect(b1) > tol:
        raise TranslationViolationError("B1 must be Hermitian")
    shifted = b1 + f.value_at_zero()
    if la.min_eigenvalue(shifted) < -tol * max(1.0, f.scale(), la.opnorm(b1)):
        raise TranslationViolationError("B1 + f(0) has a negative eigenvalue")
    return PoleResidueForm(f.A + a1, f.B + b1, f.poles)


def _negligible(m, scale):
    return la.opnorm(m) <= 64 * np.finfo(float).eps * scale


def to_stieltjes(f, tol=la.TOL_PSD):
    """Return ``h = f / z``: constant ``A``, weight ``f(0)`` at 0, ``C_j/lambda_j`` at ``lambda_j``."""
    require_class_G(f, tol)
    f0 = la.hermitian_part(f.value_at_zero())
    terms = [] if _negligible(f0, f.scale()) else [(0.0, f0)]
    terms += [(lam, c / lam) for lam, c in f.poles]
    return StieltjesForm(f.A, terms)


def from_stieltjes(h):
    """Return ``f = z h``: ``B`` is the total mass, residues ``lambda_j W_j``."""
    total = sum((w for _, w in h.terms), np.zeros_like(h.A))
    poles = [(lam, lam * w) for lam, w in h.terms if lam > 0]
    return PoleResidueForm(h.A, total, poles)


def measure_decomposition(h):
    total = sum((w for _, w in h.terms), np.zeros_like(h.A))
    shifted = tuple((lam, la.frozen(lam * w)) for lam, w in h.terms if lam > 0)
    return MeasureDecomposition(la.frozen(h.A), la.frozen(total), shifted,
                                la.frozen(h.point_mass_at_zero()))


def partial_mcmillan_degree(f, tol_rank=la.TOL_RANK):
    """``delta(f) = sum_j rank(C_j)``: McMillan degree without the pole at infinity."""
    return sum(la.rank(c, tol_rank) for _, c in f.poles)


def build_realization(f, tol=la.TOL_PSD, tol_rank=la.TOL_RANK):
    """Dilate ``f`` to ``z [A + K^* (S + zI)^{-1} K]``.

    ``S`` carries each Stieltjes pole location (0 for the point mass at the
    origin) repeated by the rank of its weight; ``K`` stacks PSD square-root
    factors of the weights.
    """
    h = to_stieltjes(f, tol)
    blocks, diag = [], []
    for lam, w in h.terms:
        factor = la.psd_factor(w, tol_rank)
        blocks.append(factor)
        diag.extend([lam] * factor.shape[0])
    if blocks:
        k = np.vstack(blocks)
    else:
        k = np.zeros((0, f.n), dtype=complex)
    return RealizationForm(la.frozen(f.A), la.frozen(k), np.array(diag, dtype=float))


def max_relative_deviation(first, second, points=None):
    """Largest relative difference between two matrix functions over ``points``."""
    if points is None:
        points = verification_points()
    return max(la.relative_error(first(z), second(z)) for z in points)
