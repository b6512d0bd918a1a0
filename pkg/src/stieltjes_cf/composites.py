"""Effective conductivity of two-phase composites.

Coated-sphere and coated-disk assemblages, their multicoated continued
fractions, phase-interchange residuals, Tartar's lamination formula,
laminate synthesis from a Stieltjes function and coating-parameter
extraction for 2-D isotropic composites.

Conductivities are complex scalars. In normalized form ``f(z) = sigma*(z, 1)``
with ``z = sigma1 / sigma2``, so ``sigma*(s1, s2) = s2 f(s1 / s2)``.
"""
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.interpolate import AAA
from scipy.optimize import least_squares

from . import _linalg as la
from .core import PoleResidueForm, to_stieltjes
from .errors import (BadM1Error, DegenerateDenominatorError,
                     NotNormalized, NotRealizableError, NotScalarError,
                     PoleProximityError, SingularCoreError,
                     ZeroDenominatorError, ZeroPhaseError)

__all__ = [
    "CoatingSpec", "LaminateSpec", "R_PERP", "hs_coated", "hs_nested",
    "multicoat_effective", "multicoat_eval", "multicoat_rational",
    "multicoat_to_pole_residue", "keller_residual",
    "matrix_phase_interchange_residual", "tartar_formula",
    "laminate_parallel", "laminate_perp", "laminate_tensor",
    "synthesize_laminate", "extract_coating_parameters",
]

R_PERP = np.array([[0.0, 1.0], [-1.0, 0.0]])

TOL_DENOM = 1e-13
TOL_M1 = 1e-12
TOL_SUM = 1e-12
TOL_NORMALIZED = 1e-10
TOL_KELLER = 1e-8
TOL_BOUNDARY = 1e-12
TOL_ROUNDTRIP = 1e-8
COND_MAX = 1e12

# fixed probe arguments for Keller and termination tests
_PROBES = (0.7 + 0.4j, 1.9 - 0.8j, 0.3 + 1.1j, 2.6 + 0.2j, 0.45 - 0.35j)


def _check_dim(dim):
    if dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dim!r}")


def _check_fraction(c, name="c1"):
    c = float(c)
    if not 0.0 < c < 1.0:
        raise ValueError(f"{name} must lie in the open interval (0, 1), got {c}")
    return c


@dataclass(frozen=True)
class CoatingSpec:
    """Volume fractions of a multicoated sphere (3-D) or disk (2-D) assemblage.

    Level ``k`` has core fraction ``fractions[k-1]``; odd levels have a
    shell of phase 2, even levels a shell of phase 1. The innermost core
    is the opposite phase of the last shell unless ``core_phase`` says
    otherwise; with no coatings it defaults to phase 1 (``f(z) = z``).
    """

    dimension: int
    fractions: Tuple[float, ...] = ()
    core_phase: Optional[int] = None

    def __post_init__(self):
        _check_dim(self.dimension)
        fr = tuple(_check_fraction(c, f"fractions[{i}]")
                   for i, c in enumerate(self.fractions))
        object.__setattr__(self, "fractions", fr)
        if self.core_phase not in (None, 1, 2):
            raise ValueError("core_phase must be None, 1 or 2")

    @property
    def depth(self):
        return len(self.fractions)

    @property
    def core(self):
        if self.core_phase is not None:
            return self.core_phase
        if self.depth == 0:
            return 1
        return 1 if self.depth % 2 else 2

    @property
    def d(self):
        """``d_j = (1 - c_j) / dimension``."""
        return tuple((1.0 - c) / self.dimension for c in self.fractions)


@dataclass(frozen=True)
class LaminateSpec:
    """Weights ``a`` and phase-1 proportions ``q`` of a parallel laminate of laminates."""

    weights: Tuple[float, ...]
    proportions: Tuple[float, ...]
    normalized: bool = True

    def __post_init__(self):
        a = tuple(float(x) for x in self.weights)
        q = tuple(float(x) for x in self.proportions)
        if len(a) != len(q):
            raise ValueError("weights and proportions differ in length")
        if any(x < 0 or not np.isfinite(x) for x in a):
            raise ValueError("weights must be finite and nonnegative")
        if any(not 0.0 <= x <= 1.0 for x in q):
            raise ValueError("proportions must lie in [0, 1]")
        if self.normalized and abs(sum(a) - 1.0) > TOL_SUM:
            raise ValueError(f"weights sum to {sum(a)!r}, not 1")
        object.__setattr__(self, "weights", a)
        object.__setattr__(self, "proportions", q)


def hs_nested(sigma_core, sigma2, c1, dim):
    """Coated sphere/disk with shell ``sigma2`` around a core of effective conductivity ``sigma_core``.

    Parameters
    ----------
    sigma_core : complex
        Conductivity of the core, occupying volume fraction ``c1``.
    sigma2 : complex
        Conductivity of the shell.
    c1 : float
        Core volume fraction in (0, 1).
    dim : {2, 3}

    Returns
    -------
    complex
        ``sigma2 + c1 sigma2 / ((1 - c1)/dim - sigma2 / (sigma2 - sigma_core))``,
        evaluated in a form without the removable singularity at
        ``sigma_core = sigma2``.
    """
    _check_dim(dim)
    c = _check_fraction(c1)
    x, s = complex(sigma_core), complex(sigma2)
    if x == s:
        return s
    q = (1.0 - c) / dim
    p = q + c
    den = q * x + (1.0 - q) * s
    if abs(den) <= TOL_DENOM * (q * abs(x) + (1.0 - q) * abs(s)):
        raise DegenerateDenominatorError(
            f"denominator vanishes at core={x}, shell={s}, c1={c}")
    return s * (p * x + (1.0 - p) * s) / den


def hs_coated(sigma1, sigma2, c1, dim):
    """Coated sphere (dim 3) or disk (dim 2) assemblage: core ``sigma1``, shell ``sigma2``."""
    return hs_nested(sigma1, sigma2, c1, dim)


def multicoat_effective(sigma1, sigma2, spec):
    """Effective conductivity of the multicoated assemblage described by ``spec``."""
    s1, s2 = complex(sigma1), complex(sigma2)
    value = s1 if spec.core == 1 else s2
    for k in range(spec.depth, 0, -1):
        shell = s2 if k % 2 else s1
        value = hs_nested(value, shell, spec.fractions[k - 1], spec.dimension)
    return value


def multicoat_eval(z, spec):
    """Normalized multicoat function ``f(z) = sigma*(z, 1)``.

    Raises
    ------
    PoleProximityError
        If ``z`` sits on a pole of one of the nested levels.
    """
    try:
        return multicoat_effective(z, 1.0, spec)
    except ZeroDivisionError as exc:
        raise PoleProximityError(str(exc)) from exc


def _trim(c, tol=0.0):
    c = np.array(c, dtype=float)
    if c.size == 0:
        return np.zeros(1)
    scale = np.max(np.abs(c))
    keep = len(c)
    while keep > 1 and abs(c[keep - 1]) <= tol * scale:
        keep -= 1
    return c[:keep]


def _level(num, den, shell_is_z, c, dim):
    """Numerator and denominator after wrapping ``num/den`` in one coating."""
    q = (1.0 - c) / dim
    p = q + c
    sden = P.polymulx(den) if shell_is_z else den
    n_new = P.polyadd(p * num, (1.0 - p) * sden)
    if shell_is_z:
        n_new = P.polymulx(n_new)
    d_new = P.polyadd(q * num, (1.0 - q) * sden)
    return _trim(n_new), _trim(d_new)


def multicoat_rational(spec):
    """Return ascending coefficient arrays ``(N, D)`` with ``f = N / D``."""
    num = np.array([0.0, 1.0]) if spec.core == 1 else np.array([1.0])
    den = np.array([1.0])
    for k in range(spec.depth, 0, -1):
        num, den = _level(num, den, k % 2 == 0, spec.fractions[k - 1],
                          spec.dimension)
    lead = den[-1]
    return num / lead, den / lead


def multicoat_to_pole_residue(spec):
    """Pole-residue form of the normalized multicoat function."""
    num, den = multicoat_rational(spec)
    quot, rem = P.polydiv(num, den)
    quot = np.concatenate([quot, np.zeros(2)])
    if np.any(np.abs(quot[2:]) > 1e-12 * np.max(np.abs(num))):
        raise NotRealizableError("numerator degree exceeds denominator degree + 1")
    roots = P.polyroots(den) if len(den) > 1 else np.array([])
    dden = P.polyder(den)
    poles = []
    for r in roots:
        lam = -float(np.real(r))
        c = -P.polyval(r, rem) / P.polyval(r, dden)
        poles.append((lam, float(np.real(c))))
    return PoleResidueForm.scalar(float(quot[1]), float(quot[0]), poles)


def keller_residual(effective, sigma1, sigma2):
    """``sigma*(s1, s2) sigma*(s2, s1) - s1 s2`` for a two-argument callable."""
    s1, s2 = complex(sigma1), complex(sigma2)
    return effective(s1, s2) * effective(s2, s1) - s1 * s2


def matrix_phase_interchange_residual(S12, S21, sigma1, sigma2):
    """``S12 R S21 R^T - s1 s2 I`` with ``R`` the 90 degree rotation."""
    a = np.asarray(S12, dtype=complex)
    b = np.asarray(S21, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError("tensors must be 2x2")
    return a @ R_PERP @ b @ R_PERP.T - complex(sigma1) * complex(sigma2) * np.eye(2)


def _check_m1(m1):
    m = np.asarray(m1)
    if m.shape != (2, 2):
        raise BadM1Error(f"M1 must be 2x2, got shape {m.shape}")
    if np.iscomplexobj(m) and np.any(np.abs(m.imag) > TOL_M1):
        raise BadM1Error("M1 must be real")
    m = np.real(m).astype(float)
    if np.max(np.abs(m - m.T)) > TOL_M1:
        raise BadM1Error("M1 must be symmetric")
    if abs(np.trace(m) - 1.0) > TOL_M1:
        raise BadM1Error(f"M1 must have trace 1, got {np.trace(m)!r}")
    if np.linalg.eigvalsh(m)[0] < -TOL_M1:
        raise BadM1Error("M1 must be positive semidefinite")
    return 0.5 * (m + m.T)


def tartar_formula(sigma_star_1, sigma2, c1, M1):
    """Hierarchical laminate of phase 2 inserted into a material with tensor ``sigma_star_1``.

    Returns ``s2 I + c1 s2 [(1 - c1) M1 - s2 (s2 I - S1)^{-1}]^{-1}``.
    """
    c = _check_fraction(c1)
    m1 = _check_m1(M1)
    s1 = np.asarray(sigma_star_1, dtype=complex)
    if s1.shape != (2, 2):
        raise ValueError("sigma_star_1 must be 2x2")
    s2 = complex(sigma2)
    eye = np.eye(2)
    core = s2 * eye - s1
    if np.linalg.cond(core) > COND_MAX:
        raise SingularCoreError("sigma2 I - sigma_star_1 is singular")
    inner = (1.0 - c) * m1 - s2 * np.linalg.inv(core)
    if np.linalg.cond(inner) > COND_MAX:
        raise DegenerateDenominatorError("bracket in Tartar's formula is singular")
    return s2 * eye + c * s2 * np.linalg.inv(inner)


def _harmonic(s1, s2, q):
    if q == 1.0:
        return s1
    if q == 0.0:
        return s2
    den = q * s2 + (1.0 - q) * s1
    if den == 0:
        raise ZeroPhaseError(f"harmonic average diverges at q={q}")
    return s1 * s2 / den


def laminate_parallel(sigma1, sigma2, spec):
    """``sum_a a [q/s1 + (1-q)/s2]^{-1}``, the arithmetic average of layered harmonic averages."""
    s1, s2 = complex(sigma1), complex(sigma2)
    out = 0j
    for a, q in zip(spec.weights, spec.proportions):
        if a == 0.0:
            continue
        out += a * _harmonic(s1, s2, q)
    return out


def laminate_perp(sigma1, sigma2, spec):
    """Perpendicular conductivity ``s1 s2 / laminate_parallel(s2, s1)``."""
    s1, s2 = complex(sigma1), complex(sigma2)
    den = laminate_parallel(s2, s1, spec)
    if den == 0:
        raise ZeroDenominatorError("swapped parallel conductivity vanishes")
    return s1 * s2 / den


def laminate_tensor(sigma1, sigma2, spec):
    """``diag(parallel, perp)``."""
    return np.diag([laminate_parallel(sigma1, sigma2, spec),
                    laminate_perp(sigma1, sigma2, spec)])


def synthesize_laminate(f, tol=la.TOL_PSD):
    """Laminate whose parallel conductivity ``laminate_parallel(z, 1)`` equals ``f(z)``.

    Each Stieltjes term ``r/(z + mu)`` of ``f(z)/z`` becomes a layer with
    ``q = mu/(1 + mu)`` and weight ``r/(1 + mu)``; the linear term becomes
    a pure phase-1 layer and the point mass at zero a pure phase-2 layer.

    Warns
    -----
    NotNormalized
        If ``f(1) != 1``. The weights then sum to ``f(1)``.
    """
    if not f.is_scalar:
        raise NotScalarError("laminate synthesis needs a scalar function")
    h = to_stieltjes(f, tol)
    weights, props = [], []
    a_lin = float(np.real(h.A[0, 0]))
    if a_lin != 0.0:
        weights.append(a_lin)
        props.append(1.0)
    for mu, w in h.terms:
        r = max(float(np.real(w[0, 0])), 0.0)
        weights.append(r / (1.0 + mu))
        props.append(mu / (1.0 + mu))
    total = sum(weights)
    normalized = abs(total - 1.0) <= TOL_NORMALIZED
    if not normalized:
        warnings.warn(f"f(1) = {total!r} is not 1", NotNormalized, stacklevel=2)
    elif total != 1.0:
        weights = [w / total for w in weights]
    return LaminateSpec(tuple(weights), tuple(props), normalized)


def _polynomials_of(f):
    if isinstance(f, PoleResidueForm):
        if not f.is_scalar:
            raise NotScalarError("extraction needs a scalar function")
        den = np.array([1.0])
        for lam in f.lambdas:
            den = P.polymul(den, [lam, 1.0])
        a = float(np.real(f.A[0, 0]))
        b = float(np.real(f.B[0, 0]))
        num = P.polymul([b, a], den)
        for j, (lam, c) in enumerate(f.poles):
            other = np.array([1.0])
            for i, mu in enumerate(f.lambdas):
                if i != j:
                    other = P.polymul(other, [mu, 1.0])
            num = P.polysub(num, float(np.real(c[0, 0])) * other)
        return _trim(num, 1e-15), den
    return _polynomials_of(_fit_stieltjes(f))


def _projected_fit(zs, hs, mus):
    """Linear least-squares weights of ``A + r0/z + sum r_j/(z + mu_j)``, relative residual."""
    wts = 1.0 / np.abs(hs)
    cols = [np.ones_like(zs), 1.0 / zs] + [1.0 / (zs + mu) for mu in mus]
    basis = np.stack(cols, axis=1) * wts[:, None]
    rhs = hs * wts
    m = np.vstack([basis.real, basis.imag])
    b = np.concatenate([rhs.real, rhs.imag])
    coef = np.linalg.lstsq(m, b, rcond=None)[0]
    return coef, m @ coef - b


def _fit_stieltjes(f, tol=1e-12):
    """Pole-residue form of a black-box ``f`` from samples of ``h = f(z)/z``.

    AAA supplies the number and rough location of the poles; the locations
    are then polished by variable projection (nonlinear in the poles,
    linear in the weights). Samples cover radii ``1e-4 .. 1e4`` away from
    the negative axis.
    """
    radii = np.logspace(-4, 4, 81)
    angles = np.linspace(0.3, np.pi - 0.3, 6)
    upper = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    zs = np.concatenate([upper, upper.conj()])
    hs = np.array([complex(f(z)) for z in zs]) / zs
    fit = AAA(zs, hs, rtol=tol)
    scale = float(np.max(np.abs(hs * zs)))
    guesses = []
    for pole, res in zip(fit.poles(), fit.residues()):
        # spurious pole/zero pairs and off-axis poles are dropped here; the
        # residual check after polishing decides whether the fit is valid
        if abs(res) <= 1e-8 * scale * max(1.0, abs(pole)):
            continue
        if abs(pole.imag) > 5e-2 * max(abs(pole), 1e-6) or pole.real > 1e-8:
            continue
        if -pole.real > 1e-8:
            guesses.append(-pole.real)
    logs = np.log(sorted(guesses))
    if logs.size:
        sol = least_squares(lambda t: _projected_fit(zs, hs, np.exp(t))[1], logs,
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        logs = sol.x
    mus = np.exp(logs)
    coef, resid = _projected_fit(zs, hs, mus)
    if np.max(np.abs(resid)) > 1e-9:
        raise NotRealizableError("no accurate Stieltjes fit of f(z)/z")
    a_lin, mass0, weights = coef[0], coef[1], coef[2:]
    small = 1e-11 * max(1.0, scale)
    a_lin = 0.0 if abs(a_lin) <= small else a_lin
    mass0 = 0.0 if abs(mass0) <= small else mass0
    if a_lin < 0 or mass0 < 0 or np.any(weights <= 0):
        raise NotRealizableError("fitted Stieltjes weights are not positive")
    b = mass0 + float(np.sum(weights))
    return PoleResidueForm.scalar(a_lin, b, [(mu, r * mu) for mu, r in zip(mus, weights)])


def _ratio(num, den, z):
    return P.polyval(z, num) / P.polyval(z, den)


def _matches(num, den, target):
    return all(abs(_ratio(num, den, z) - target(z)) <= TOL_KELLER * max(1.0, abs(target(z)))
               for z in _PROBES)


def _small(value, scale, what, tol=1e-6):
    if abs(value) > tol * scale:
        raise NotRealizableError(f"{what} does not cancel ({value!r})")


def extract_coating_parameters(f, dim=2, max_depth=8):
    """Recover the coating fractions of a 2-D multicoated-disk function.

    Parameters
    ----------
    f : PoleResidueForm or callable
        Normalized effective conductivity ``f(z) = sigma*(z, 1)``. Callables
        are sampled and fitted by a rational function first.
    dim : int
        Only ``2`` is supported.
    max_depth : int
        Maximal number of coatings to peel.

    Returns
    -------
    CoatingSpec

    Raises
    ------
    NotRealizableError
        If Keller's relation or ``f(1) = 1`` fails at the probe points, a
        level cannot be peeled, or no trivial remainder is reached.
    """
    if dim != 2:
        raise ValueError("coating extraction is only available in two dimensions")
    if isinstance(f, PoleResidueForm):
        if not f.is_scalar:
            raise NotScalarError("extraction needs a scalar function")
        func = lambda z: complex(f(z)[0, 0])  # noqa: E731
    else:
        func = f
    for z in _PROBES:
        if abs(func(z) * func(1.0 / z) - 1.0) > TOL_KELLER:
            raise NotRealizableError(f"Keller's relation fails at z={z}")
    if abs(complex(func(1.0)) - 1.0) > TOL_KELLER:
        raise NotRealizableError("f(1) differs from 1")
    num, den = _polynomials_of(f)
    fractions = []
    core = None
    for k in range(1, max_depth + 2):
        if _matches(num, den, lambda z: z):
            core = 1
            break
        if _matches(num, den, lambda z: 1.0):
            core = 2
            break
        if k > max_depth:
            raise NotRealizableError(f"no trivial remainder after {max_depth} levels")
        scale = max(np.max(np.abs(num)), np.max(np.abs(den)))
        odd = k % 2 == 1
        if not odd:
            # an even-level remainder vanishes at zero: work with f(z)/z
            _small(num[0], scale, "constant numerator term")
            num = num[1:]
        if len(num) != len(den):
            raise NotRealizableError(f"unexpected degrees at level {k}")
        v = num[0] / den[0] if odd else num[-1] / den[-1]
        if not np.isfinite(v) or v <= 0:
            raise NotRealizableError(f"shielded value {v!r} is not positive")
        c = (1.0 - v) / (1.0 + v)
        if not TOL_BOUNDARY < c < 1.0 - TOL_BOUNDARY:
            raise NotRealizableError(f"recovered fraction {c!r} is outside (0, 1)")
        fractions.append(float(c))
        q = (1.0 - c) / dim
        p = q + c
        bracket = (q - 1.0) * num + (1.0 - p) * den
        rest = q * num - p * den
        if odd:
            # inner function vanishes at zero and grows linearly
            _small(bracket[0], scale, "constant numerator term")
            bracket[0] = 0.0
            _small(rest[-1], scale, "leading denominator term")
            num, den = bracket, rest[:-1]
        else:
            # inner function is finite and nonzero at zero and at infinity
            _small(bracket[-1], scale, "leading numerator term")
            _small(rest[0], scale, "constant denominator term")
            num, den = bracket[:-1], rest[1:]
        if den.size == 0:
            raise NotRealizableError(f"degree exhausted at level {k}")
        lead = den[-1]
        num, den = num / lead, den / lead
    natural = CoatingSpec(2, tuple(fractions))
    spec = natural if (fractions and natural.core == core) else CoatingSpec(
        2, tuple(fractions), core)
    for z in _PROBES:
        ref = complex(func(z))
        if abs(multicoat_eval(z, spec) - ref) > TOL_ROUNDTRIP * max(1.0, abs(ref)):
            raise NotRealizableError("extracted coating does not reproduce f")
    return spec
