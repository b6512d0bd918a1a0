"""Acceptance suite: one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from stieltjes_cf import (CoatingSpec, LaminateSpec, PoleResidueForm, SFraction,
                          StieltjesForm, build_from_s_fraction, build_realization,
                          certify_class_G, contract_s_fraction, expand_j_fraction,
                          expand_s_fraction, extract_coating_parameters, hs_coated,
                          keller_residual, laminate_parallel, multicoat_effective,
                          multicoat_eval, multicoat_to_pole_residue,
                          partial_mcmillan_degree, reduction_steps, reflect,
                          sample_kernel_certificates, stieltjes_kernel_certificates,
                          synthesize_laminate, tartar_formula)
from stieltjes_cf import _linalg as la
from stieltjes_cf.core import max_relative_deviation
from stieltjes_cf.sampling import off_axis_points, verification_points

sys.path.insert(0, str(Path(__file__).parent))
from conftest import make_suite  # noqa: E402

ACCEPT_SEED = 2024


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return emit


def _right_half(rng, size):
    return rng.uniform(0.05, 5, size) + 1j * rng.uniform(-5, 5, size)


def _random_spec(rng, dim=2):
    return CoatingSpec(dim, tuple(rng.uniform(0.05, 0.95, int(rng.integers(1, 5)))))


def test_golden_scalar_chain(report):
    start = time.perf_counter()
    f = PoleResidueForm.scalar(0.0, 1.0, [(1.0, 1.0)])
    certified = certify_class_G(f).passed
    levels = [(a[0, 0], b[0, 0]) for a, b in expand_j_fraction(f).levels]
    level_err = max(abs(a - ea) + abs(b - eb)
                    for (a, b), (ea, eb) in zip(levels, [(0, 1), (1, 1)]))
    g = reflect(f)
    fixed = (len(g.poles) == 1 and abs(g.A[0, 0] - f.A[0, 0]) <= 1e-12
             and abs(g.B[0, 0] - f.B[0, 0]) <= 1e-12
             and abs(g.lambdas[0] - 1.0) <= 1e-12
             and abs(g.residues[0][0, 0] - 1.0) <= 1e-12)
    s = expand_s_fraction(StieltjesForm([[0.0]], [(1.0, [[1.0]])]))
    s_err = max(abs(np.array(s.c) - 1.0))
    d_err = max(abs(np.array(contract_s_fraction(s).d) - 1.0))
    elapsed = time.perf_counter() - start
    ok = (certified and len(levels) == 2 and level_err <= 1e-12 and fixed
          and len(s.c) == 2 and s_err <= 1e-12 and d_err <= 1e-12 and elapsed < 1.0)
    report(1, ok, f"levels err {level_err:.1e}, S-fraction err {s_err:.1e}, "
                  f"contraction err {d_err:.1e}, reflection fixed={fixed}, {elapsed:.3f} s")


def test_round_trip_suite(report):
    start = time.perf_counter()
    suite = make_suite()
    points = verification_points(50)
    worst, bad_cert = 0.0, 0
    for f in suite:
        steps, tail = reduction_steps(f)
        for step in steps:
            bad_cert += not certify_class_G(step.f_next, 1e-8).passed
        worst = max(worst, max_relative_deviation(expand_j_fraction(f), f, points))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and bad_cert == 0 and elapsed < 60
    report(2, ok, f"{len(suite)} instances, max rel err {worst:.2e}, "
                  f"{bad_cert} uncertified intermediates, {elapsed:.1f} s")


def test_degree_law(report):
    violations, steps_seen = 0, 0
    for f in make_suite():
        current = f
        steps, _ = reduction_steps(f)
        for step in steps:
            d_in = partial_mcmillan_degree(current)
            inverted = la.rank(sum(c for _, c in current.poles))
            d_out = partial_mcmillan_degree(step.f_next)
            violations += d_in != inverted + d_out or not d_out < d_in
            steps_seen += 1
            current = step.f_next
    report(3, violations == 0, f"{steps_seen} inversions, {violations} violations")


def test_kernel_certificates(report):
    points = off_axis_points(40)
    failures, worst = 0, np.inf
    for f in make_suite():
        rep = sample_kernel_certificates(f, points)
        worst = min(worst, rep.worst_slack)
        failures += not (rep.passed and rep.worst_slack >= -1e-9)
    report(4, failures == 0, f"worst normalised slack {worst:.2e}, {failures} failures")


def test_s_fraction_freeness(report):
    rng = np.random.default_rng(ACCEPT_SEED)
    worst, wrong_length = 0.0, 0
    for _ in range(100):
        c = 10.0 ** rng.uniform(-1, 1, int(rng.integers(1, 9)))
        back = np.array(expand_s_fraction(build_from_s_fraction(c)).c)
        if back.shape != c.shape:
            wrong_length += 1
            continue
        worst = max(worst, float(np.max(np.abs(back - c) / c)))
    ok = worst <= 1e-8 and wrong_length == 0
    report(5, ok, f"100 tuples, max rel err {worst:.2e}, {wrong_length} length mismatches")


def test_composites(report):
    rng = np.random.default_rng(ACCEPT_SEED)
    worst = 0.0
    for a, b in zip(_right_half(rng, 100), _right_half(rng, 100)):
        c = rng.uniform(0.05, 0.95)
        spec = _random_spec(rng)
        for eff in (lambda x, y: hs_coated(x, y, c, 2),
                    lambda x, y: multicoat_effective(x, y, spec)):
            worst = max(worst, abs(keller_residual(eff, a, b)) / abs(a * b))
    goldens = [(hs_coated(0, 1, 0.5, 3), 0.4), (hs_coated(0, 1, 0.5, 2), 1 / 3),
               (hs_coated(2, 1, 0.5, 2), 1.4), (hs_coated(1, 2, 0.5, 2), 10 / 7)]
    golden_err = max(abs(v - e) for v, e in goldens)
    ok = worst <= 1e-10 and golden_err <= 1e-12
    report(6, ok, f"Keller max rel residual {worst:.2e}, golden err {golden_err:.1e}")


def test_synthesis_round_trips(report):
    rng = np.random.default_rng(ACCEPT_SEED)
    extract_err, laminate_err = 0.0, 0.0
    points = verification_points()
    for _ in range(50):
        src = _random_spec(rng)
        f = multicoat_to_pole_residue(src)
        for source in (f, lambda z, s=src: multicoat_eval(z, s)):
            out = extract_coating_parameters(source)
            if out.depth != src.depth:
                extract_err = np.inf
                break
            extract_err = max(extract_err, max(abs(np.subtract(out.fractions, src.fractions))))
        lam = synthesize_laminate(f)
        laminate_err = max(laminate_err, max(
            abs(laminate_parallel(z, 1, lam) - f(z)[0, 0]) / abs(f(z)[0, 0]) for z in points))
    ok = extract_err <= 1e-8 and laminate_err <= 1e-10
    report(7, ok, f"coating extraction err {extract_err:.2e} (exact and sampled), "
                  f"laminate synthesis rel err {laminate_err:.2e}")


def test_bridge(report):
    rng = np.random.default_rng(ACCEPT_SEED)
    points = off_axis_points(40)
    failures = 0
    for _ in range(50):
        spec = _random_spec(rng)
        rep = stieltjes_kernel_certificates(lambda z: multicoat_eval(z, spec) / z, points)
        failures += not rep.passed
    tartar_err = 0.0
    for a, b in zip(_right_half(rng, 50), _right_half(rng, 50)):
        c = rng.uniform(0.05, 0.95)
        out = tartar_formula(a * np.eye(2), b, c, np.eye(2) / 2)
        ref = hs_coated(a, b, c, 2)
        tartar_err = max(tartar_err, np.max(np.abs(out - ref * np.eye(2))) / abs(ref))
    ok = failures == 0 and tartar_err <= 1e-10
    report(8, ok, f"{failures} Stieltjes kernel failures over 50 multicoats, "
                  f"Tartar rel err {tartar_err:.2e}")


def test_realization(report):
    points = verification_points(50)
    worst = 0.0
    for f in make_suite():
        worst = max(worst, max_relative_deviation(build_realization(f), f, points))
    report(9, worst <= 1e-10, f"max rel err {worst:.2e}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
