"""Independent reference computations used by the tests.

None of these share code with the package: scalar cases go through sympy
rational arithmetic, matrix zeros through a companion linearization, and
pseudo-inverses through ``numpy.linalg.pinv`` of the evaluated function.
"""
from fractions import Fraction

import numpy as np
import sympy as sp

Z = sp.Symbol("z")


def scalar_expr(a, b, poles):
    """Sympy expression of ``a z + b - sum c/(z + lam)`` (exact rationals)."""
    expr = sp.nsimplify(a) * Z + sp.nsimplify(b)
    for lam, c in poles:
        expr -= sp.nsimplify(c) / (Z + sp.nsimplify(lam))
    return sp.together(expr)


def split_pole_residue(expr):
    """Return ``(a, b, [(lam, c)])`` with ``expr = a z + b - sum c/(z + lam)``."""
    num, den = sp.fraction(sp.cancel(sp.together(expr)))
    quot, rem = sp.div(sp.Poly(num, Z), sp.Poly(den, Z))
    coeffs = quot.all_coeffs()[::-1] + [0, 0]
    poles = []
    dden = sp.diff(den, Z)
    poly = sp.Poly(den, Z)
    exact = sp.roots(poly)
    roots = exact if all(r.is_rational for r in exact) else poly.nroots(n=40)
    for root in roots:
        res = rem.as_expr().subs(Z, root) / dden.subs(Z, root)
        res = sp.nsimplify(res) if root.is_rational else sp.re(sp.N(res, 40))
        poles.append((-sp.re(root), -res))
    return coeffs[1], coeffs[0], sorted(poles, key=lambda t: float(t[0]))


def scalar_pinv_negative(poles):
    """Exact ``-1/R`` for scalar ``R(z) = -sum c/(z + lam)``."""
    r = sum((-sp.nsimplify(c) / (Z + sp.nsimplify(lam)) for lam, c in poles), sp.Integer(0))
    return split_pole_residue(-1 / r)


def scalar_j_levels(expr, max_levels=10):
    """Exact J-fraction levels ``(f(0), f'(0))`` of a scalar rational function."""
    levels = []
    f = sp.cancel(expr)
    for _ in range(max_levels):
        num, den = sp.fraction(sp.cancel(f))
        if sp.degree(den, Z) == 0:
            poly = sp.Poly(sp.cancel(f), Z).all_coeffs()[::-1] + [0, 0]
            levels.append((poly[0], poly[1]))
            return levels
        f0 = sp.cancel(f.subs(Z, 0))
        f1 = sp.cancel(sp.diff(f, Z).subs(Z, 0))
        levels.append((f0, f1))
        f = sp.cancel(-1 / ((f - f0 - f1 * Z) / Z ** 2))
    raise RuntimeError("expansion did not terminate")


def s_fraction_value(c, z):
    """``1/(c1 z + 1/(c2 + 1/(c3 z + ...)))`` in exact arithmetic for rational input."""
    value = None
    for i in range(len(c) - 1, -1, -1):
        term = c[i] * z if i % 2 == 0 else c[i]
        value = term if value is None else term + Fraction(1) / value
    return Fraction(1) / value


def companion_zeros(poles, tol=1e-10):
    """Zeros of ``det M`` on ``V = range(sum C)`` with ``R(z) = -M(z)/prod(z + lam)``.

    ``M`` is a matrix polynomial of degree ``d - 1`` whose leading coefficient
    is ``sum C`` (invertible on ``V``); its block companion matrix carries the
    zeros as eigenvalues.
    """
    lams = [lam for lam, _ in poles]
    mats = [np.asarray(c, dtype=complex) for _, c in poles]
    total = sum(mats)
    w, v = np.linalg.eigh(0.5 * (total + total.conj().T))
    u = v[:, w > tol * w[-1]]
    r = u.shape[1]
    d = len(poles)
    if d == 1:
        return np.array([])
    coeffs = [np.zeros((r, r), dtype=complex) for _ in range(d)]
    for j, c in enumerate(mats):
        others = np.poly([-lam for i, lam in enumerate(lams) if i != j])[::-1]
        cu = u.conj().T @ c @ u
        for k, a in enumerate(others):
            coeffs[k] += a * cu
    lead_inv = np.linalg.inv(coeffs[-1])
    size = r * (d - 1)
    comp = np.zeros((size, size), dtype=complex)
    comp[:-r, r:] = np.eye(size - r)
    for k in range(d - 1):
        comp[-r:, k * r:(k + 1) * r] = -lead_inv @ coeffs[k]
    zeros = list(np.linalg.eigvals(comp))
    # det M also vanishes at -lam_j where C_j is rank deficient on V; those
    # cancel against the pole factor and are not zeros of R
    for lam, c in zip(lams, mats):
        extra = r - np.linalg.matrix_rank(u.conj().T @ c @ u, tol=tol * np.abs(w).max())
        for _ in range(extra):
            k = int(np.argmin([abs(x + lam) for x in zeros]))
            zeros.pop(k)
    return np.array(zeros)


def direct_pinv_negative(poles, z):
    """``-pinv(R(z))`` from the evaluated matrix."""
    r = -sum(np.asarray(c, dtype=complex) / (z + lam) for lam, c in poles)
    return -np.linalg.pinv(r, rcond=1e-10, hermitian=False)


def hs_formula(s1, s2, c1, dim):
    """The coated-sphere formula exactly as displayed (with the ``s2 - s1`` division)."""
    return s2 + c1 * s2 / ((1 - c1) / dim - s2 / (s2 - s1))


def doubly_coated(s1, s2, c1, c2, dim):
    """Doubly coated sphere formula written out as one nested expression."""
    return s2 + c1 * s2 / ((1 - c1) / dim - s2 / (
        s2 - s1 - c2 * s1 / ((1 - c2) / dim - s1 / (s1 - s2))))
