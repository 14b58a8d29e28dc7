"""Orchestration behind the CLI subcommands."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .bogoliubov import a_matrix, build_factorization, diagonalize_mode
from .config import RunConfig
from .continuum import (
    DISPERSION_COEFF,
    fit_dispersion,
    plasmon_continuum,
    plasmon_series,
    profile_integral,
    continuum_lhs,
    total_energy,
)
from .errors import BosonRPAError
from .lattice import KAPPA, build_fermi_ball, count_pairs_exact
from .mode import ModeHamiltonian, assemble_blocks, build_mode, coulomb_potential, mode_from_u, parse_potential
from .patches import partition_sphere, patch_membership
from .report import Table
from .secular import SecularProblem, interlacing_counts, plasmon_root, secular_roots


def _meta(config: RunConfig, **extra) -> dict:
    meta = {
        "mode": config.mode,
        "config_hash": config.config_hash(),
        "n_ref": config.n_ref,
        "hbar": config.hbar,
        "m_patches": config.m_patches,
        "delta": config.delta,
        "potential": config.potential,
    }
    meta.update(extra)
    return meta


def _modes(config: RunConfig, potential=None) -> List[ModeHamiltonian]:
    ps = partition_sphere(config.m_patches)
    v = potential if potential is not None else parse_potential(config.potential)
    modes = []
    for k in config.k_grid():
        try:
            modes.append(build_mode(k, ps, v, config.n_ref, config.delta))
        except BosonRPAError as exc:
            raise type(exc)(f"mode k={tuple(k)}: {exc}") from exc
    return modes


def mode_branches(mode: ModeHamiltonian, variant: str = "paired"):
    """(lambda values, plasmon index or None, multiplicity) for one mode."""
    if mode.degenerate:
        return np.zeros(0), None, 2 if variant == "paired" else 1
    if variant == "paired":
        spec = diagonalize_mode(mode)
        return spec.frequencies**2, spec.plasmon_index, spec.multiplicity
    roots = secular_roots(SecularProblem.from_mode(mode, "joint"))
    return roots, (roots.size - 1 if mode.g > 0 else None), 1


def run_spectrum(config: RunConfig) -> Table:
    """Single-boson excitation energies 2 kappa |k| e for every branch of every mode."""
    columns = ["k_abs", "branch", "lambda", "energy_hbar_units", "is_plasmon", "multiplicity", "energy_raw"]
    rows = []
    empty = 0
    for mode in _modes(config):
        lam, plasmon, mult = mode_branches(mode, config.rank_one)
        if lam.size == 0:
            empty += 1
        scale = 2.0 * KAPPA * mode.abs_k
        for i, x in enumerate(lam):
            e = scale * math.sqrt(max(x, 0.0))
            rows.append((mode.abs_k, i, float(x), e, i == plasmon, mult, e * config.hbar))
    meta = _meta(
        config,
        rank_one=config.rank_one,
        k_direction=list(config.k_direction) if not config.k_list else None,
        degenerate_modes=empty,
        units={"lambda": "dimensionless eigenvalue of A", "energy_hbar_units": "hbar", "energy_raw": "hbar=N^(-1/3) applied"},
        continuum_edge="2 kappa |k| (lambda = 1)",
    )
    return Table(columns, rows, meta)


def run_plasmon(config: RunConfig) -> Table:
    """Continuum plasmon curve, its small-|k| series, and the finite-M top root."""
    ps = partition_sphere(config.m_patches)
    coul = coulomb_potential()
    columns = ["k_abs", "lambda_continuum", "energy_hbar_units", "series_hbar_units", "lambda_finite_m", "energy_finite_m_hbar_units", "energy_raw"]
    rows = []
    for k in config.k_grid():
        abs_k = float(np.linalg.norm(k))
        lam = plasmon_continuum(abs_k, config.rank_one)
        e = 2.0 * KAPPA * abs_k * math.sqrt(lam)
        mode = build_mode(k, ps, coul, config.n_ref, config.delta)
        if mode.degenerate:
            lam_m = e_m = float("nan")
        else:
            lam_m = plasmon_root(SecularProblem.from_mode(mode, config.rank_one))
            e_m = 2.0 * KAPPA * abs_k * math.sqrt(lam_m)
        rows.append((abs_k, lam, e, plasmon_series(abs_k), lam_m, e_m, e * config.hbar))
    fit = None
    if len(rows) >= 2:
        a, c = fit_dispersion([r[0] for r in rows], [r[2] for r in rows])
        fit = {"intercept_hbar_units": a, "quadratic_hbar_units": c}
    meta = _meta(
        config,
        potential="coulomb",
        rank_one=config.rank_one,
        fit=fit,
        series_coefficient=DISPERSION_COEFF,
        units={"lambda": "dimensionless", "energy": "hbar"},
    )
    return Table(columns, rows, meta)


def run_energy(config: RunConfig):
    """Correlation energy report (dict) with totals in hbar units and raw."""
    pot = parse_potential(config.potential)
    ps = partition_sphere(config.m_patches)
    rep = total_energy(pot, config.k_cutoff, ps, config.n_ref, config.delta)
    out = rep.to_dict()
    out["total_continuum_raw"] = rep.total_continuum * config.hbar
    out["total_finite_m_raw"] = None if rep.total_finite_m is None else rep.total_finite_m * config.hbar
    meta = _meta(config, units={"total_*": "hbar", "total_*_raw": "hbar=N^(-1/3) applied"})
    return rep, out, meta


def energy_table(rep, meta) -> Table:
    columns = ["kx", "ky", "kz", "k_abs", "v_hat", "shift_finite_m", "shift_continuum"]
    rows = [
        (*m.k, math.sqrt(sum(x * x for x in m.k)), m.v_hat, m.shift_finite_m, m.shift_continuum) for m in rep.per_mode
    ]
    meta = dict(meta, total_continuum=rep.total_continuum, total_finite_m=rep.total_finite_m, relative_gap=rep.relative_gap, max_mode_gap=rep.max_mode_gap, formal=rep.formal)
    return Table(columns, rows, meta)


def run_paircount(config: RunConfig) -> Table:
    """Exact lattice pair counts against the flat-box estimates for each patch facing k."""
    if config.n_particles is None and config.k_fermi is None:
        ball = build_fermi_ball(n_particles=10**4)
    elif config.k_fermi is not None:
        ball = build_fermi_ball(k_fermi=config.k_fermi)
    else:
        ball = build_fermi_ball(n_particles=config.n_particles)
    ps = partition_sphere(config.m_patches, config.corridor, radius=max(ball.k_fermi, 1e-12))
    ks = [tuple(int(round(x)) for x in k) for k in config.k_list] or [(0, 0, 1)]
    n = ball.n_particles
    columns = ["kx", "ky", "kz", "alpha", "khat_dot_omega", "n2_exact", "n2_approx", "n2_fermi"]
    rows = []
    for k in ks:
        kv = np.array(k, dtype=float)
        dots = ps.centers @ kv
        ext = max(config.corridor, float(np.linalg.norm(kv)))
        for alpha in np.flatnonzero(dots > 0):
            member = patch_membership(ps, int(alpha), ball.k_fermi, ext)
            exact = count_pairs_exact(ball, member, k)
            approx = 4.0 * math.pi * n ** (2.0 / 3.0) / ps.m_patches * dots[alpha]
            fermi = 4.0 * math.pi * ball.k_fermi**2 / ps.m_patches * dots[alpha]
            rows.append((*k, int(alpha), float(dots[alpha] / np.linalg.norm(kv)), exact, approx, fermi))
    meta = _meta(config, n_particles=n, k_fermi=ball.k_fermi, corridor=config.corridor)
    return Table(columns, rows, meta)


# --- validation ------------------------------------------------------------

DEFAULT_BOUNDS = {
    "free_theory": 1e-12,
    "oracle_equivalence": 1e-9,
    "isospectral": 1e-9,
    "symplectic": 1e-9,
    "block_diagonalization": 1e-9,
    "interlacing": 0.0,
    "shift_sign": 1e-12,
    "continuum_identity": 1e-3,
    "quadrature_identity": 1e-8,
}


@dataclass
class Check:
    name: str
    measured: float
    bound: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.bound)


def _synthetic_modes(config: RunConfig, rng: np.random.Generator, coupled: bool = True) -> List[ModeHamiltonian]:
    floor = config.n_ref ** (-config.delta)
    out = []
    for _ in range(config.n_random):
        n = int(rng.integers(1, 51))
        u = np.sqrt(rng.uniform(floor, 1.0, n))
        g = float(rng.uniform(0.0, 3.0)) if coupled else 0.0
        out.append(mode_from_u(u, g))
    return out


def run_validate(config: RunConfig) -> Table:
    rng = np.random.default_rng(config.seed)
    bounds = dict(DEFAULT_BOUNDS, **config.tolerances)
    synthetic = _synthetic_modes(config, rng)
    free = _synthetic_modes(config, rng, coupled=False)
    config_modes = [m for m in _modes(config) if not m.degenerate]
    warnings_out = []
    if not config_modes:
        msg = "configured k grid has no non-degenerate modes; per-mode checks are vacuous for it"
        warnings.warn(msg)
        warnings_out.append(msg)

    small = [m for m in synthetic + config_modes if m.i_k <= 50]
    worst = {key: 0.0 for key in DEFAULT_BOUNDS}
    for m in free:
        sp = diagonalize_mode(m)
        worst["free_theory"] = max(worst["free_theory"], float(np.abs(np.sort(sp.frequencies) - np.sort(m.u**2)).max()), abs(sp.shift))
    for m in small:
        dense = np.linalg.eigvalsh(a_matrix(m))
        roots = secular_roots(SecularProblem.from_mode(m))
        rel = np.abs(roots - dense) / np.maximum(np.abs(dense), np.finfo(float).tiny)
        worst["oracle_equivalence"] = max(worst["oracle_equivalence"], float(rel.max()))
        fac = build_factorization(assemble_blocks(m))
        worst["isospectral"] = max(worst["isospectral"], fac.isospectral_residual())
        worst["symplectic"] = max(worst["symplectic"], fac.symplectic_residual())
        worst["block_diagonalization"] = max(worst["block_diagonalization"], fac.diagonalization_residual())
    for m in synthetic + config_modes:
        if m.g > 0:
            prob = SecularProblem.from_mode(m)
            between, above = interlacing_counts(prob, secular_roots(prob))
            worst["interlacing"] += float(np.count_nonzero(between != 1) + (above != 1))
        worst["shift_sign"] = max(worst["shift_sign"], diagonalize_mode(m).shift)

    ps = partition_sphere(10_000)
    khat = np.asarray(config.k_direction, float) / np.linalg.norm(config.k_direction)
    c2 = (ps.centers @ khat) ** 2
    worst["continuum_identity"] = abs(float(np.mean(c2 / (2.0 - c2))) - continuum_lhs(2.0))
    worst["quadrature_identity"] = abs(profile_integral() - math.pi / 4)

    notes = {
        "oracle_equivalence": f"{len(small)} modes",
        "interlacing": "violating intervals",
        "shift_sign": "max shift (must be <= 0)",
        "continuum_identity": "M=10000, lambda=2",
    }
    checks = [Check(name, worst[name], bounds[name], notes.get(name, "")) for name in DEFAULT_BOUNDS]
    rows = [(c.name, c.measured, c.bound, c.passed, c.note) for c in checks]
    meta = _meta(config, n_random=config.n_random, seed=config.seed, config_modes=len(config_modes), warnings=warnings_out)
    return Table(["check", "measured", "bound", "passed", "note"], rows, meta)
