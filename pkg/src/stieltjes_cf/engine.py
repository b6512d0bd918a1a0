"""Continued-fraction reduction for class-G functions.

Partial Moore-Penrose inversion of a negative pole part, the degree
reducing step ``f -> -[(f - f(0) - f'(0) z) / z**2]^{-1}``, matrix J-fraction
expansion and evaluation, and the scalar Stieltjes fraction machinery
(expansion with affine levels, S-fractions with free positive coefficients,
contraction, Hankel moment tests).

Inversions are done on a Hermitian state-space dilation: a negative part
``-sum C_j/(z + lambda_j)`` is ``-K^* (z + Lambda)^{-1} K`` and its inverse has
poles at the eigenvalues of ``Lambda`` compressed to the orthogonal
complement of ``range(K)``. Poles therefore come out real and residues PSD
by construction.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Tuple

import numpy as np

from . import _linalg as la
from .core import (PoleResidueForm, StieltjesForm, partial_mcmillan_degree,
                   reflect, require_class_G)
from .errors import (ComplexZeroError, DegreeZeroError, NonDecreasingDegreeError,
                     NonPositiveCoefficientError, NotMeasureTransformError,
                     NotScalarError, NullFunctionError, PoleProximityError)

TOL_CLUSTER = 1e-7

__all__ = [
    "JFraction", "AffineFraction", "SFraction", "ContractedFraction",
    "HankelReport", "ReductionStep", "range_projection",
    "pseudo_invert_negative_part", "reduction_step", "reduction_steps",
    "expand_j_fraction", "evaluate_j_fraction", "classical_form",
    "expand_scalar_cd", "build_from_s_fraction", "expand_s_fraction",
    "contract_s_fraction", "s_fraction_of", "hankel_certificates",
]


def range_projection(C_list, tol=la.TOL_RANK, n=None):
    """Orthogonal projector onto ``range(C_1 + ... + C_d)`` and a basis of it.

    Returns ``(P, U)`` with ``U`` having orthonormal columns and ``P = U U^*``.
    A zero sum gives the zero projector and an ``n x 0`` basis.
    """
    mats = [la.as_matrix(c) for c in C_list]
    if not mats:
        if n is None:
            raise ValueError("empty C_list needs the dimension n")
        return np.zeros((n, n), dtype=complex), np.zeros((n, 0), dtype=complex)
    total = sum(la.hermitian_part(c) for c in mats)
    basis = la.range_basis(total, tol)
    return basis @ basis.conj().T, basis


def _cluster(values, rel=TOL_CLUSTER):
    """Group sorted values whose relative gap is below ``rel``."""
    groups = []
    for i, v in enumerate(values):
        if groups and abs(v - values[groups[-1][-1]]) <= rel * max(abs(v), 1e-300):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _invert_stieltjes_part(factors, lambdas):
    """Invert ``H(z) = K^* (z + Lambda)^{-1} K`` with ``K^* K`` invertible.

    ``factors[j]`` is ``F_j`` with ``C_j = F_j^* F_j``. Returns the linear term,
    constant term and ``(mu, D)`` pole list of ``H^{-1}`` (poles at ``-mu``,
    ``H^{-1} = L z + B - sum D / (z + mu)``).
    """
    k = np.vstack(factors)
    diag = np.concatenate([[lam] * f.shape[0] for lam, f in zip(lambdas, factors)])
    r = k.shape[1]
    q, upper = np.linalg.qr(k, mode="complete")
    e, comp = q[:, :r], q[:, r:]
    upper = upper[:r, :]
    rinv = np.linalg.inv(upper)
    linear = rinv @ rinv.conj().T
    lam_e = (e.conj().T * diag) @ e
    constant = rinv @ lam_e @ rinv.conj().T
    poles = []
    if comp.shape[1]:
        inner = (comp.conj().T * diag) @ comp
        mu, vec = np.linalg.eigh(la.hermitian_part(inner))
        coupling = rinv @ ((e.conj().T * diag) @ comp) @ vec
        for group in _cluster(mu):
            g = coupling[:, group]
            poles.append((float(np.mean(mu[group])), g @ g.conj().T))
    return la.hermitian_part(linear), la.hermitian_part(constant), poles


def pseudo_invert_negative_part(poles, n=None, tol_rank=la.TOL_RANK):
    """Return ``-[R]^{-1}`` for ``R(z) = -sum_j C_j / (z + lambda_j)``.

    On ``V = range(sum C_j)`` the result is ``-(P R P)^{-1}``; on the
    orthogonal complement it is zero. The output is in class G: its linear
    term is ``C^{-1}`` on ``V`` and its value at 0 is ``(sum C_j/lambda_j)^{-1}``.

    Parameters
    ----------
    poles : sequence of (lambda, C)
        Pole locations ``lambda > 0`` and PSD weights.
    n : int, optional
        Dimension, needed only when ``poles`` is empty.
    """
    items = [(float(lam), la.as_matrix(c)) for lam, c in poles]
    if not items:
        raise NullFunctionError("no poles to invert")
    n = items[0][1].shape[0]
    if any(lam <= 0 for lam, _ in items):
        raise ComplexZeroError("pole locations must be strictly positive")
    _, basis = range_projection([c for _, c in items], tol_rank)
    if basis.shape[1] == 0:
        raise NullFunctionError("all residues vanish")
    factors, lambdas = [], []
    for lam, c in items:
        f = la.psd_factor(basis.conj().T @ c @ basis, tol_rank)
        if f.shape[0]:
            factors.append(f)
            lambdas.append(lam)
    linear, constant, inv_poles = _invert_stieltjes_part(factors, lambdas)
    top = max(lam for lam, _ in items)
    for mu, _ in inv_poles:
        if mu <= 1e-14 * top:
            raise ComplexZeroError(f"computed zero at {-mu} is not on the open negative axis")
    lift = lambda m: basis @ m @ basis.conj().T
    return PoleResidueForm(lift(linear), lift(constant),
                           [(mu, lift(d)) for mu, d in inv_poles])


class ReductionStep(NamedTuple):
    """One reduction: ``f = A + B z - z**2 pinv(f_next)``."""
    A: np.ndarray
    B: np.ndarray
    f_next: PoleResidueForm
    degree_in: int
    inverted_rank: int
    degree_out: int


def _reduce(f, tol_rank=la.TOL_RANK):
    degree = partial_mcmillan_degree(f, tol_rank)
    if degree == 0:
        raise DegreeZeroError("function has no finite poles")
    a_k = la.hermitian_part(f.value_at_zero())
    b_k = la.hermitian_part(f.derivative_at_zero())
    weights = [(lam, c / lam ** 2) for lam, c in f.poles]
    f_next = pseudo_invert_negative_part(weights, tol_rank=tol_rank)
    inverted = la.rank(sum(c for _, c in weights), tol_rank)
    return ReductionStep(a_k, b_k, f_next, degree, inverted,
                         partial_mcmillan_degree(f_next, tol_rank))


def reduction_step(f, tol_rank=la.TOL_RANK):
    """One step of the degree-reducing algorithm.

    Returns ``(f(0), f'(0), f_next)`` with
    ``f_next = -[(f(z) - f(0) - f'(0) z) / z**2]^{-1}``, obtained by
    pseudo-inverting ``-sum C_j / (lambda_j**2 (z + lambda_j))``.
    """
    step = _reduce(f, tol_rank)
    return step.A, step.B, step.f_next


def reduction_steps(f, tol=la.TOL_PSD, tol_rank=la.TOL_RANK):
    """Run the reduction to exhaustion and return every :class:`ReductionStep`.

    The final element of the returned pair is the affine remainder.
    """
    require_class_G(f, tol)
    steps = []
    current = f
    while current.poles and partial_mcmillan_degree(current, tol_rank) > 0:
        step = _reduce(current, tol_rank)
        if step.degree_out >= step.degree_in:
            raise NonDecreasingDegreeError(
                f"degree went from {step.degree_in} to {step.degree_out}")
        steps.append(step)
        current = step.f_next
    return steps, current


@dataclass(frozen=True, eq=False)
class JFraction:
    """Matrix continued fraction with affine levels.

    ``levels[k] = (const_k, linear_k)``. The standard kind reads

        const_0 + linear_0 z - z**2 pinv(const_1 + linear_1 z - z**2 pinv(...))

    and the classical kind (the fraction of ``z f(1/z)``) reads

        const_0 + linear_0 z - pinv(const_1 + linear_1 z - pinv(...)).

    The last level is the affine remainder of the reduction.
    """

    levels: Tuple[Tuple[np.ndarray, np.ndarray], ...]
    kind: str = "standard"

    def __post_init__(self):
        if self.kind not in ("standard", "classical"):
            raise ValueError(f"unknown J-fraction kind {self.kind!r}")
        if not self.levels:
            raise ValueError("a J-fraction needs at least one level")
        levels = tuple((la.frozen(la.as_matrix(a)), la.frozen(la.as_matrix(b)))
                       for a, b in self.levels)
        object.__setattr__(self, "levels", levels)

    @property
    def n(self):
        return self.levels[0][0].shape[0]

    @property
    def depth(self):
        return len(self.levels) - 1

    @cached_property
    def _supports(self):
        return [la.range_basis(la.hermitian_part(a + b)) for a, b in self.levels]

    def __call__(self, z):
        return evaluate_j_fraction(self, z)


def _support_pinv(m, basis, z):
    if basis.shape[1] == 0:
        return np.zeros_like(m)
    inner = basis.conj().T @ m @ basis
    sv = np.linalg.svd(inner, compute_uv=False)
    if sv[-1] <= 1e-13 * max(sv[0], np.finfo(float).tiny):
        raise PoleProximityError(f"inner level is singular at z={z}")
    return basis @ np.linalg.solve(inner, basis.conj().T)


def evaluate_j_fraction(jf, z):
    """Evaluate a :class:`JFraction` bottom-up.

    Each inner value is pseudo-inverted on the range of its level's
    coefficients (Moore-Penrose inverse restricted to that subspace).
    """
    z = complex(z)
    weight = z * z if jf.kind == "standard" else 1.0
    const, lin = jf.levels[-1]
    value = const + lin * z
    for k in range(len(jf.levels) - 2, -1, -1):
        const, lin = jf.levels[k]
        value = const + lin * z - weight * _support_pinv(value, jf._supports[k + 1], z)
    return value


def expand_j_fraction(f, tol=la.TOL_PSD, tol_rank=la.TOL_RANK):
    """Expand a class-G function into its J-fraction.

    Iterates :func:`reduction_step` until no finite poles remain; the affine
    remainder ``B + A z`` becomes the final level ``(B, A)``.
    """
    steps, tail = reduction_steps(f, tol, tol_rank)
    levels = [(s.A, s.B) for s in steps]
    levels.append((la.hermitian_part(tail.B), la.hermitian_part(tail.A)))
    return JFraction(tuple(levels))


def classical_form(jf):
    """Fraction of ``z f(1/z)`` from the fraction of ``f`` (and back).

    Reflection swaps the constant and linear coefficient of every level and
    drops the ``z**2`` weights (or restores them).
    """
    kind = "classical" if jf.kind == "standard" else "standard"
    return JFraction(tuple((b, a) for a, b in jf.levels), kind)


@dataclass(frozen=True)
class AffineFraction:
    """Scalar ``a0 z + b0 - 1/(a1 z + b1 - 1/(... - 1/(ad z + bd)))``."""

    a: Tuple[float, ...]
    b: Tuple[float, ...]

    def __call__(self, z):
        value = self.a[-1] * z + self.b[-1]
        for a, b in zip(self.a[-2::-1], self.b[-2::-1]):
            value = a * z + b - 1.0 / value
        return value


def expand_scalar_cd(f, tol=la.TOL_PSD):
    """Affine-level continued fraction of a scalar class-G function.

    All depth >= 1 coefficients are strictly positive for certified input.
    """
    if f.n != 1:
        raise NotScalarError("expand_scalar_cd needs a scalar function")
    require_class_G(f, tol)
    jf = classical_form(expand_j_fraction(reflect(f, tol), tol))
    a = tuple(float(lin[0, 0].real) for _, lin in jf.levels)
    b = tuple(float(const[0, 0].real) for const, _ in jf.levels)
    return AffineFraction(a, b)


@dataclass(frozen=True)
class SFraction:
    """``F(z) = 1/(c1 z + 1/(c2 + 1/(c3 z + ...)))``, optionally behind a head.

    With ``head = (a0, b0)`` the represented function is ``a0 z + b0 - F(z)``.
    """

    c: Tuple[float, ...]
    head: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        c = tuple(float(x) for x in self.c)
        if not all(x > 0 for x in c):
            raise NonPositiveCoefficientError(f"S-fraction coefficients must be > 0: {c}")
        object.__setattr__(self, "c", c)

    def measure_part(self, z):
        if not self.c:
            return 0.0 * z
        value = None
        for i in range(len(self.c) - 1, -1, -1):
            term = self.c[i] * z if i % 2 == 0 else self.c[i]
            value = term if value is None else term + 1.0 / value
        return 1.0 / value

    def __call__(self, z):
        out = self.measure_part(z)
        if self.head is not None:
            out = self.head[0] * z + self.head[1] - out
        return out


@dataclass(frozen=True)
class ContractedFraction:
    """``F(z) = d0/(z + d1 - d1 d2/(z + d2 + d3 - d3 d4/(z + d4 + d5 - ...)))``."""

    d: Tuple[float, ...]
    head: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        d = tuple(float(x) for x in self.d)
        if not d or not all(x > 0 for x in d):
            raise NonPositiveCoefficientError(f"contracted coefficients must be > 0: {d}")
        object.__setattr__(self, "d", d)

    def _get(self, i):
        return self.d[i] if i < len(self.d) else 0.0

    def measure_part(self, z):
        levels = (len(self.d) + 1) // 2
        value = None
        for k in range(levels - 1, -1, -1):
            diag = self._get(1) if k == 0 else self._get(2 * k) + self._get(2 * k + 1)
            value = z + diag if value is None else z + diag - \
                self._get(2 * k + 1) * self._get(2 * k + 2) / value
        return self.d[0] / value

    def __call__(self, z):
        out = self.measure_part(z)
        if self.head is not None:
            out = self.head[0] * z + self.head[1] - out
        return out


def _contracted_coefficients(c):
    d = [1.0 / c[0]]
    d += [1.0 / (c[j - 1] * c[j]) for j in range(1, len(c))]
    return d


def build_from_s_fraction(c):
    """Measure transform ``F(z) = sum w_k / (z + t_k)`` of a positive S-fraction.

    Every tuple of positive coefficients is admissible. ``F`` is assembled
    from the Jacobi matrix ``J = G G^T`` of the contracted fraction (``G``
    lower bidiagonal), so the poles ``-t_k`` are minus the squared singular
    values of ``G`` and the weights are ``d0`` times the squared first
    components of its left singular vectors. Odd length puts a mass at 0.
    """
    c = [float(x) for x in c]
    if not c:
        raise NonPositiveCoefficientError("empty S-fraction")
    if not all(x > 0 for x in c):
        raise NonPositiveCoefficientError(f"S-fraction coefficients must be > 0: {c}")
    d = _contracted_coefficients(c)
    get = lambda i: d[i] if i < len(d) else 0.0
    size = (len(d) + 1) // 2
    g = np.zeros((size, size))
    for k in range(size):
        g[k, k] = np.sqrt(get(2 * k + 1))
        if k + 1 < size:
            g[k + 1, k] = np.sqrt(get(2 * k + 2))
    u, sv, _ = np.linalg.svd(g)
    nodes = sv ** 2
    nodes[sv <= size * np.finfo(float).eps * max(sv[0], 1e-300)] = 0.0
    weights = d[0] * np.abs(u[0, :]) ** 2
    return StieltjesForm([[0.0]], [(t, [[w]]) for t, w in zip(nodes, weights)])


def _woodbury_step(b, poles):
    """Invert ``b - sum D/(z + mu)`` (scalar ``b > 0``) as ``1/b + sum w/(z + t)``."""
    mu = np.array([m for m, _ in poles])
    k = np.sqrt(np.array([max(float(np.real(d[0, 0])), 0.0) for _, d in poles]))
    inner = np.diag(mu) - np.outer(k, k) / b
    t, vec = np.linalg.eigh(inner)
    w = (k @ vec) ** 2 / b ** 2
    floor = 1e-12 * max(np.max(np.abs(t)), np.max(mu))
    if np.any(t < -floor):
        raise NotMeasureTransformError("inversion produced a pole in the right half-line")
    t[np.abs(t) <= floor] = 0.0
    return [(float(tt), float(ww)) for tt, ww in zip(t, w)]


def expand_s_fraction(F, tol=la.TOL_PSD):
    """Recover the S-fraction coefficients of a scalar measure transform.

    ``F(z) = sum w_k / (z + t_k)`` with ``t_k >= 0``, ``w_k > 0`` and no
    constant part. Alternates two exact pole-residue inversions:
    ``1/F = c1 z + (b - sum D/(z + mu))`` gives ``c1``; inverting the
    bracket gives ``c2 = 1/b`` plus a new measure transform.
    """
    if F.n != 1:
        raise NotScalarError("expand_s_fraction needs a scalar function")
    if abs(F.A[0, 0]) > tol * max(1.0, sum(abs(w[0, 0]) for w in F.weights)):
        raise NotMeasureTransformError("function has a constant part")
    terms = [(lam, float(np.real(w[0, 0]))) for lam, w in F.terms]
    if not terms:
        raise NotMeasureTransformError("zero function has no S-fraction")
    if any(w <= 0 or lam < 0 for lam, w in terms):
        raise NotMeasureTransformError("measure must be positive on [0, inf)")
    c = []
    while terms:
        factors = [np.array([[np.sqrt(w)]]) for _, w in terms]
        linear, constant, poles = _invert_stieltjes_part(factors, [lam for lam, _ in terms])
        c.append(float(linear[0, 0].real))
        b = float(constant[0, 0].real)
        if not poles:
            if b > 0.0:
                c.append(1.0 / b)
            break
        c.append(1.0 / b)
        terms = [(t, w) for t, w in _woodbury_step(b, poles) if w > 0.0]
    return SFraction(tuple(c))


def s_fraction_of(f, tol=la.TOL_PSD):
    """Head-plus-S-fraction form ``A z + B - F(z)`` of a scalar class-G function."""
    if f.n != 1:
        raise NotScalarError("s_fraction_of needs a scalar function")
    require_class_G(f, tol)
    head = (float(f.A[0, 0].real), float(f.B[0, 0].real))
    if not f.poles:
        return SFraction((), head)
    measure = StieltjesForm([[0.0]], [(lam, c) for lam, c in f.poles])
    return SFraction(expand_s_fraction(measure, tol).c, head)


def contract_s_fraction(s):
    """Contract ``1/(c1 z + 1/(c2 + ...))`` into the ``d``-parameter form.

    ``d0 = 1/c1`` and ``d_j = 1/(c_j c_{j+1})``; positivity is inherited.
    """
    if not s.c:
        raise NonPositiveCoefficientError("nothing to contract")
    return ContractedFraction(tuple(_contracted_coefficients(s.c)), s.head)


@dataclass(frozen=True)
class HankelReport:
    """Moment Hankel tests for a scalar Stieltjes measure.

    ``hankel`` is ``(m_{i+j})`` of size ``order+1``; ``shifted`` is
    ``(m_{i+j+1})`` of size ``order``. Both are PSD for a positive measure
    on ``[0, inf)``.
    """

    moments: Tuple[float, ...]
    hankel: np.ndarray
    shifted: np.ndarray
    hankel_min_eig: float
    shifted_min_eig: float
    hankel_minors: Tuple[float, ...]
    shifted_minors: Tuple[float, ...]
    hankel_psd: bool
    shifted_psd: bool

    @property
    def passed(self):
        return self.hankel_psd and self.shifted_psd


def _leading_minors(m):
    return tuple(float(np.linalg.det(m[:k, :k])) for k in range(1, m.shape[0] + 1))


def hankel_certificates(h, order, tol=la.TOL_PSD):
    """Moments ``m_k = sum w_j t_j**k`` (k = 0..2 order) and their Hankel tests.

    The constant part of ``h`` is ignored: only the measure enters.
    """
    if h.n != 1:
        raise NotScalarError("Hankel certificates need a scalar function")
    if order < 1:
        raise ValueError("order must be >= 1")
    t = np.array([lam for lam, _ in h.terms], dtype=float)
    w = np.array([float(np.real(x[0, 0])) for _, x in h.terms])
    moments = np.array([np.sum(w * t ** k) if t.size else 0.0
                        for k in range(2 * order + 1)])
    idx = np.add.outer(np.arange(order + 1), np.arange(order + 1))
    hankel = moments[idx]
    shifted = moments[idx[:order, :order] + 1]

    def psd(m):
        if m.size == 0:
            return 0.0, True
        low = float(np.linalg.eigvalsh(m)[0])
        return low, low >= -tol * max(np.abs(m).max(), np.finfo(float).tiny)

    h_min, h_ok = psd(hankel)
    s_min, s_ok = psd(shifted)
    return HankelReport(tuple(moments.tolist()), hankel, shifted, h_min, s_min,
                        _leading_minors(hankel), _leading_minors(shifted), h_ok, s_ok)
