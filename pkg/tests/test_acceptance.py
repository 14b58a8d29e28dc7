"""Acceptance criteria, one test per criterion.

Each test records a single ``ACCEPTANCE <n> PASS|FAIL`` line with the
measured quantities; the lines are printed as they happen (visible with
``-s``) and repeated in the pytest terminal summary.  ``python3
tests/test_acceptance.py`` runs the file directly.
"""
import math
import warnings

import numpy as np
import pytest

from bosonrpa.bogoliubov import a_matrix, build_factorization, diagonalize_mode
from bosonrpa.config import make_config
from bosonrpa.continuum import (
    DISPERSION_COEFF,
    continuum_lhs,
    fit_dispersion,
    lattice_modes,
    plasmon_continuum,
    plasmon_energy,
    profile_integral,
    rpa_bracket,
)
from bosonrpa.lattice import KAPPA, build_fermi_ball, count_pairs_exact
from bosonrpa.mode import assemble_blocks, build_mode, coulomb_potential, indicator_potential, zero_potential
from bosonrpa.patches import partition_sphere, patch_membership
from bosonrpa.runs import run_spectrum
from bosonrpa.secular import SecularProblem, interlacing_counts, secular_roots

RESULTS = []
SEED = 7


def record(n, title, ok, detail, status=None):
    status = status or ("PASS" if ok else "FAIL")
    line = f"ACCEPTANCE {n:>3} {status}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def decreasing(xs):
    return all(a > b for a, b in zip(xs, xs[1:]))


def random_coulomb_modes(count=100, seed=SEED):
    """Coulomb modes with random k (|k| in [0.05, 2]) and random even M <= 100, so I_k <= 50."""
    rng = np.random.default_rng(seed)
    coulomb = coulomb_potential()
    modes = []
    while len(modes) < count:
        m = 2 * int(rng.integers(2, 51))
        d = rng.normal(size=3)
        k = rng.uniform(0.05, 2.0) * d / np.linalg.norm(d)
        mode = build_mode(k, partition_sphere(m), coulomb)
        if 0 < mode.i_k <= 50:
            modes.append(mode)
    return modes


@pytest.fixture(scope="module")
def modes():
    return random_coulomb_modes()


def test_1_free_theory():
    worst = 0.0
    zero = zero_potential()
    rng = np.random.default_rng(SEED)
    for m in (2, 8, 50, 200, 1000):
        ps = partition_sphere(m)
        for _ in range(10):
            k = rng.normal(size=3) * rng.uniform(0.1, 3)
            mode = build_mode(k, ps, zero)
            spec = diagonalize_mode(mode)
            if mode.i_k:
                worst = max(worst, float(np.abs(spec.frequencies - np.sort(mode.u**2)).max()))
            worst = max(worst, abs(spec.shift))
    ok = worst <= 1e-12
    assert record(1, "free theory exact", ok, f"max |e - u^2|, |shift| = {worst:.2e} (bound 1e-12)")


def test_2_oracle_equivalence(modes):
    sec, iso = 0.0, 0.0
    for mode in modes:
        dense = np.linalg.eigvalsh(a_matrix(mode))
        roots = secular_roots(SecularProblem.from_mode(mode))
        sec = max(sec, float(np.max(np.abs(roots - dense) / np.abs(dense))))
        iso = max(iso, build_factorization(assemble_blocks(mode)).isospectral_residual())
    ok = sec <= 1e-9 and iso <= 1e-9
    assert record(
        2, "secular roots = dense eig(A); spec(A) = spec(B)", ok,
        f"{len(modes)} modes, max rel {sec:.2e}, spec gap {iso:.2e} (bound 1e-9)",
    )


def test_3_symplectic_validity(modes):
    sym, diag = 0.0, 0.0
    for mode in modes:
        fac = build_factorization(assemble_blocks(mode))
        sym = max(sym, fac.symplectic_residual())
        diag = max(diag, fac.diagonalization_residual())
    ok = sym <= 1e-9 and diag <= 1e-9
    assert record(3, "S^T J S = J and S^T M S = 1/2 diag(E~, E~)", ok, f"{sym:.2e}, {diag:.2e} (bound 1e-9)")


def test_4_interlacing(modes):
    violations = 0
    for mode in modes:
        prob = SecularProblem.from_mode(mode)
        between, above = interlacing_counts(prob, secular_roots(prob))
        violations += int(np.count_nonzero(between != 1)) + int(above != 1)
    ok = violations == 0
    assert record(4, "one root per pole gap and one above", ok, f"{violations} violations over {len(modes)} modes")


def test_5_continuum_identity():
    khat = np.array([0.36, 0.48, 0.8])
    exact = continuum_lhs(2.0)
    errs = []
    for m in (100, 1000, 10000):
        c2 = (partition_sphere(m).centers @ khat) ** 2
        errs.append(abs(float(np.mean(c2 / (2.0 - c2))) - exact))
    ok = errs[-1] < 1e-3 and decreasing(errs)
    assert record(5, "patch Riemann sum -> -1 + sqrt(l) arcoth sqrt(l) at l=2", ok,
                  "errors " + ", ".join(f"{e:.2e}" for e in errs) + " for M = 1e2, 1e3, 1e4")


def test_6_plasmon_dispersion():
    ks = np.linspace(0.05, 0.3, 26)
    energies = [plasmon_energy(k) for k in ks]
    a, c = fit_dispersion(ks, energies)
    target_c = 0.3 * math.sqrt(3 * KAPPA / math.pi)
    assert target_c == pytest.approx(DISPERSION_COEFF, rel=1e-15)
    ok = abs(a - 2) / 2 < 1e-3 and abs(c - target_c) / target_c < 0.01
    assert record(6, "fit of hbar 2 kappa |k| sqrt(lambda) on [0.05, 0.3]", ok,
                  f"intercept {a:.6f} (rel {abs(a - 2) / 2:.1e}), quadratic {c:.6f} vs {target_c:.6f} "
                  f"(rel {abs(c - target_c) / target_c:.1e})")


def test_7_rpa_consistency():
    worst = 0.0
    for n in (10**3, 10**6, 10**12):
        hbar = n ** (-1 / 3)
        k_fermi = KAPPA * n ** (1 / 3)
        e_fermi = hbar**2 * k_fermi**2
        mass = 0.5
        lam0 = 2 * hbar
        alpha = 0.6 * e_fermi / lam0
        # (hbar^2 / m) alpha |k|^2 against hbar c |k|^2, coefficient of |k|^2 in units of hbar
        rhs = (hbar**2 / mass) * alpha / hbar
        lhs = 0.3 * math.sqrt(3 * (3 / (4 * math.pi)) ** (1 / 3) / math.pi)
        worst = max(worst, abs(lhs - rhs))
    ok = worst <= 1e-12
    assert record(7, "(3/10) sqrt(3 kappa/pi) = (hbar^2/m) alpha_RPA / hbar", ok, f"max |difference| {worst:.1e} over N")


def test_8_first_order_cancellation():
    q = abs(profile_integral() - math.pi / 4)
    vs = (1e-2, 1e-3, 1e-4)
    ratios = [abs(rpa_bracket(v) / v) for v in vs]
    slopes = [r / v for r, v in zip(ratios, vs)]
    linear = max(slopes) / min(slopes) < 1.1
    ok = q < 1e-8 and decreasing(ratios) and linear
    assert record(8, "int F = pi/4 and bracket/V -> 0 linearly", ok,
                  f"|int - pi/4| = {q:.1e}; |bracket/V| = " + ", ".join(f"{r:.2e}" for r in ratios)
                  + f"; |bracket|/V^2 = " + ", ".join(f"{s:.4f}" for s in slopes))


def test_9_finite_m_energy():
    # N and delta chosen so the cutoff N^-delta = 1e-3 keeps nearly the whole hemisphere
    pot = indicator_potential(radius=2.0, strength=1.0)
    ks = lattice_modes(2.0)
    table = []
    for m in (100, 1000, 10000):
        ps = partition_sphere(m)
        gaps = []
        for k in ks:
            shift = diagonalize_mode(build_mode(k, ps, pot, n_ref=10**12, delta=0.25)).shift
            br = rpa_bracket(pot(k))
            gaps.append(abs(shift - br) / abs(br))
        table.append(max(gaps))
    ok = decreasing(table) and table[-1] < 0.02
    assert record(9, "per-mode 1/2 tr(E - D - W) -> bracket, V = 1 on |k| <= 2", ok,
                  f"max gap over {len(ks)} modes: " + ", ".join(f"{g:.2e}" for g in table) + " for M = 1e2, 1e3, 1e4")


def _pair_errors(corridor, m=20):
    lit, fer, counts = [], [], []
    for n in (10**3, 10**4, 10**5):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ball = build_fermi_ball(n_particles=n)
        ps = partition_sphere(m, corridor, radius=ball.k_fermi)
        k = (0, 0, 1)
        alpha = int(np.argmax(ps.centers @ k))
        dot = float(ps.centers[alpha] @ k)
        assert dot > 0.8
        exact = count_pairs_exact(ball, patch_membership(ps, alpha, ball.k_fermi, max(corridor, 1.0)), k)
        counts.append(exact)
        lit.append(abs(exact / (4 * math.pi * ball.n_particles ** (2 / 3) / m * dot) - 1))
        fer.append(abs(exact / (4 * math.pi * ball.k_fermi**2 / m * dot) - 1))
    return lit, fer, counts


def test_10_pair_counts():
    lines, ok = [], True
    for corridor in (1.0, 0.0):
        lit, fer, counts = _pair_errors(corridor)
        ok &= decreasing(lit) and decreasing(fer)
        lines.append(
            f"corridor {corridor:g}: counts {counts}; rel err vs 4 pi N^(2/3)/M: "
            + ", ".join(f"{e:.3f}" for e in lit)
            + "; vs 4 pi k_F^2/M: " + ", ".join(f"{e:.3f}" for e in fer)
        )
    record(10, "exact n^2 vs flat-box estimate, N = 1e3, 1e4, 1e5", ok, " | ".join(lines))
    # the N^(2/3) form tends to a kappa^2 mismatch, not to zero
    lit, _, _ = _pair_errors(0.0)
    record("10i", "note", True, status="INFO", detail=f"N^(2/3) form error approaches 1 - kappa^2 = {1 - KAPPA**2:.3f} (last {lit[-1]:.3f})")
    assert ok


def test_11_figure_structure():
    cfg = make_config(m_patches=2000, n_particles=10**12, delta=0.25, k_min=0.01, k_max=1.0, k_steps=12,
                      rank_one="joint")
    table = run_spectrum(cfg)
    ok, details = True, []
    ks = sorted(set(table.column("k_abs")))
    plasmons = []
    for k in ks:
        rows = [r for r in table.rows if r[0] == k]
        flagged = [r for r in rows if r[4]]
        edge = 2 * KAPPA * k
        ok &= len(flagged) == 1 and flagged[0][3] > edge
        ok &= all(r[3] <= edge * (1 + 1e-12) for r in rows if not r[4])
        plasmons.append(flagged[0][3])
    approach = [abs(p - 2.0) for p in plasmons]
    ok &= decreasing(approach[::-1][-4:]) and approach[0] < 1e-3
    details.append(f"{len(ks)} |k| values, plasmon at |k|={ks[0]:g}: {plasmons[0]:.5f} hbar, at |k|={ks[-1]:g}: "
                   f"{plasmons[-1]:.4f} hbar")
    record(11, "one flagged branch above 2 kappa |k|, -> 2 hbar (joint rank-one)", ok, "; ".join(details))

    # cross-check on the mode Hamiltonian's own (paired) spectrum
    paired = run_spectrum(make_config(m_patches=2000, n_particles=10**12, delta=0.25, k_min=0.01, k_max=1.0,
                                      k_steps=12, rank_one="paired"))
    pl = [r[3] for r in paired.rows if r[4]]
    ref = plasmon_energy(0.01, variant="paired")
    record("11i", "note", True, status="INFO", detail=f"paired spectrum plasmon at |k|=0.01: {pl[0]:.5f} hbar "
                                f"(its continuum limit {ref:.5f} = sqrt(2))")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
