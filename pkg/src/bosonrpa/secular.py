"""Secular equation for diagonal-plus-rank-one matrices.

``A = diag(p) + 2 g q q^T`` with ``p = u^4`` and ``q = u^2`` has
characteristic function ``prod(p - lam) * w(lam)`` with
``w(lam) = 1 + 2 g sum_a p_a / (p_a - lam)``.  Roots of ``w`` interlace the
distinct poles, with one extra root above the largest pole when g > 0.

Two rank-one problems can be attached to a mode:

``paired``
    one update per antipodal half, i.e. the matrix A of the mode
    Hamiltonian (I_k weights); its roots are the squared oscillator
    frequencies.
``joint``
    a single update over both halves together (2 I_k weights).  This is the
    problem whose Coulomb form is the full-sphere relation
    ``(1/M) sum_{2 I_k} c^2/(lam - c^2) = |k|^2 / (4 pi kappa)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgument, NoPlasmonError, NumericalFailure, PoleEvaluationError
from .lattice import KAPPA
from .mode import ModeHamiltonian

POLE_GROUP_TOL = 1e-12
BISECT_WIDTH = 1e-13
MAX_ITER = 400
VARIANTS = ("paired", "joint")


@dataclass(frozen=True, eq=False)
class SecularProblem:
    poles: np.ndarray           # distinct, ascending
    multiplicities: np.ndarray
    pole_weights: np.ndarray    # summed u^4 per distinct pole
    u4_weights: np.ndarray      # one entry per mode
    g: float
    m_total: Optional[int] = None

    @property
    def size(self) -> int:
        return int(self.u4_weights.size)

    @classmethod
    def from_weights(cls, u4, g: float, m_total: Optional[int] = None) -> "SecularProblem":
        u4 = np.sort(np.asarray(u4, dtype=float).reshape(-1))
        if u4.size and u4[0] <= 0:
            raise InvalidArgument("secular weights must be positive")
        if g < 0:
            raise InvalidArgument("coupling must be non-negative")
        poles, mult, wsum = [], [], []
        for x in u4:
            if poles and x - poles[-1] <= POLE_GROUP_TOL * max(1.0, abs(x)):
                mult[-1] += 1
                wsum[-1] += x
            else:
                poles.append(x)
                mult.append(1)
                wsum.append(x)
        mult_arr = np.array(mult, dtype=np.int64)
        wsum_arr = np.array(wsum)
        return cls(
            poles=wsum_arr / np.maximum(mult_arr, 1),
            multiplicities=mult_arr,
            pole_weights=wsum_arr,
            u4_weights=u4,
            g=float(g),
            m_total=m_total,
        )

    @classmethod
    def from_mode(cls, mode: ModeHamiltonian, variant: str = "paired") -> "SecularProblem":
        if variant == "paired":
            u = mode.u
        elif variant == "joint":
            u = mode.u_full
        else:
            raise InvalidArgument(f"variant must be one of {VARIANTS}, got {variant!r}")
        return cls.from_weights(u**4, mode.g, mode.m_patches)


def _w(lam: np.ndarray, problem: SecularProblem, chunk: int = 256) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    flat = lam.reshape(-1)
    out = np.empty_like(flat)
    p, wt = problem.poles, problem.pole_weights
    for s in range(0, flat.size, chunk):
        diff = p[None, :] - flat[s : s + chunk, None]
        out[s : s + chunk] = 1.0 + 2.0 * problem.g * (wt[None, :] / diff).sum(axis=1)
    return out.reshape(lam.shape)


def _dw(lam: np.ndarray, problem: SecularProblem, chunk: int = 256) -> np.ndarray:
    flat = np.asarray(lam, dtype=float).reshape(-1)
    out = np.empty_like(flat)
    p, wt = problem.poles, problem.pole_weights
    for s in range(0, flat.size, chunk):
        diff = p[None, :] - flat[s : s + chunk, None]
        out[s : s + chunk] = 2.0 * problem.g * (wt[None, :] / diff**2).sum(axis=1)
    return out


def secular_value(lam: float, problem: SecularProblem) -> float:
    lam = float(lam)
    if np.any(problem.poles == lam):
        raise PoleEvaluationError(f"w is singular at the pole lambda={lam!r}")
    return float(_w(np.array([lam]), problem)[0])


def _bracketed_roots(lo: np.ndarray, hi: np.ndarray, problem: SecularProblem) -> np.ndarray:
    """Roots of the increasing function w on each open interval (lo, hi)."""
    lo, hi = lo.astype(float).copy(), hi.astype(float).copy()
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        active = (hi - lo > BISECT_WIDTH) & (mid > lo) & (mid < hi)
        if not active.any():
            break
        val = _w(mid[active], problem)
        idx = np.flatnonzero(active)
        neg = val < 0
        lo[idx[neg]] = mid[idx[neg]]
        hi[idx[~neg]] = mid[idx[~neg]]
    else:
        raise NumericalFailure("secular bisection did not converge", max_width=float((hi - lo).max()))

    root = 0.5 * (lo + hi)
    for _ in range(2):
        f = _w(root, problem)
        step = f / _dw(root, problem)
        cand = root - step
        ok = (cand > lo) & (cand < hi) & (np.abs(_w(cand, problem)) <= np.abs(f))
        root = np.where(ok, cand, root)
    return root


def secular_roots(problem: SecularProblem) -> np.ndarray:
    """All eigenvalues of diag(p) + 2 g q q^T, ascending, with multiplicity."""
    p, m = problem.poles, problem.multiplicities
    if p.size == 0:
        return np.zeros(0)
    if problem.g == 0:
        return np.repeat(p, m)
    at_poles = np.repeat(p, m - 1)
    top_hi = p[-1] + 2.0 * problem.g * problem.pole_weights.sum() + 1.0
    lo = p
    hi = np.append(p[1:], top_hi)
    inner = _bracketed_roots(lo, hi, problem)
    return np.sort(np.concatenate([at_poles, inner]))


def plasmon_root(problem: SecularProblem) -> float:
    """The root above the largest pole."""
    if problem.g <= 0 or problem.poles.size == 0:
        raise NoPlasmonError("no root above the poles without coupling")
    p = problem.poles[-1]
    hi = p + 2.0 * problem.g * problem.pole_weights.sum() + 1.0
    return float(_bracketed_roots(np.array([p]), np.array([hi]), problem)[0])


def interlacing_counts(problem: SecularProblem, roots: np.ndarray, tol: float = 1e-12):
    """Roots per open interval between consecutive distinct poles, and above the top pole."""
    p = problem.poles
    roots = np.asarray(roots)
    off = roots[np.min(np.abs(roots[:, None] - p[None, :]), axis=1) > tol * np.maximum(1.0, p.max())]
    between = np.array([np.count_nonzero((off > a) & (off < b)) for a, b in zip(p[:-1], p[1:])], dtype=int)
    above = int(np.count_nonzero(off > p[-1]))
    return between, above


def coulomb_secular_residual(lam: float, mode: ModeHamiltonian, variant: str = "paired") -> float:
    """Full-sphere form of the secular condition for mode ``mode``.

    ``(1/M) sum_{a=1}^{2 I_k} u_a^4 / (lam - u_a^4) - R`` where the sum runs
    over both antipodal halves.  With ``variant="paired"`` the offset is
    ``R = 1 / (2 pi kappa V(k))`` and the zeros are the eigenvalues of A; with
    ``variant="joint"`` it is ``R = 1 / (4 pi kappa V(k))``.  For the Coulomb
    potential ``V(k) = |k|^-2`` these are ``|k|^2/(2 pi kappa)`` and
    ``|k|^2/(4 pi kappa)``.
    """
    if variant not in VARIANTS:
        raise InvalidArgument(f"variant must be one of {VARIANTS}, got {variant!r}")
    if mode.v_hat_k <= 0:
        raise InvalidArgument("residual form needs V(k) > 0")
    u4 = mode.u_full**4
    lam = float(lam)
    if np.any(u4 == lam):
        raise PoleEvaluationError(f"residual is singular at the pole lambda={lam!r}")
    factor = 2.0 if variant == "paired" else 4.0
    return float((u4 / (lam - u4)).sum() / mode.m_patches - 1.0 / (factor * math.pi * KAPPA * mode.v_hat_k))
