"""Independent brute-force / high-precision reference implementations.

Nothing here imports the package: each oracle takes a different route to the
same quantity (loops instead of vectorized masks, the ladder-operator matrix
instead of the rank-one reduction, mpmath instead of double-precision
quadrature) so agreement is evidence rather than tautology.
"""
from __future__ import annotations

import itertools
import math

import mpmath as mp
import numpy as np

mp.mp.dps = 40
KAPPA_MP = mp.cbrt(mp.mpf(3) / (4 * mp.pi))


def ball_points(radius_sq: int):
    r = int(math.isqrt(radius_sq))
    return [
        p
        for p in itertools.product(range(-r, r + 1), repeat=3)
        if p[0] ** 2 + p[1] ** 2 + p[2] ** 2 <= radius_sq
    ]


def pair_count(radius_sq: int, k, member=lambda p: True) -> int:
    """Number of holes h in the ball with h + k outside, both in the patch."""
    count = 0
    for h in ball_points(radius_sq):
        p = tuple(a + b for a, b in zip(h, k))
        if sum(x * x for x in p) > radius_sq and member(h) and member(p):
            count += 1
    return count


def bogoliubov_ladder(u, g):
    """Symplectic eigenvalues and ground-state shift from the ladder matrix.

    The Hamiltonian ``sum (D+W)_{ab} c_a^* c_b + 1/2 sum W~_{ab}(c_a^* c_b^* + h.c.)``
    on ``2n`` modes is diagonalized through the eigenvalues of ``Sigma H``
    with ``Sigma = diag(1, -1)``; the shift is ``1/2 (sum omega - tr(D+W))``.
    """
    u = np.asarray(u, dtype=float)
    n = u.size
    d = np.diag(u**2)
    b = g * np.outer(u, u)
    z = np.zeros((n, n))
    dw = np.block([[d + b, z], [z, d + b]])
    wt = np.block([[z, b], [b, z]])
    h = np.block([[dw, wt], [wt, dw]])
    sigma = np.diag(np.r_[np.ones(2 * n), -np.ones(2 * n)])
    ev = np.linalg.eigvals(sigma @ h)
    pos = np.sort(ev.real[ev.real > 0])
    return pos, 0.5 * (pos.sum() - np.trace(dw))


def continuum_lhs(lam) -> mp.mpf:
    x = mp.sqrt(mp.mpf(lam))
    return -1 + x * mp.acoth(x)


def continuum_sphere_average(lam) -> mp.mpf:
    """(1/4 pi) int cos^2 / (lam - cos^2) dOmega, by direct mpmath quadrature."""
    lam = mp.mpf(lam)
    return mp.quad(lambda t: mp.sin(t) * mp.cos(t) ** 2 / (lam - mp.cos(t) ** 2), [0, mp.pi]) / 2


def plasmon_lambda(rhs) -> mp.mpf:
    """Root lam > 1 of continuum_lhs(lam) = rhs by bisection."""
    rhs = mp.mpf(rhs)
    lo, hi = mp.mpf(1) + mp.mpf(10) ** -30, mp.mpf(2)
    while continuum_lhs(hi) > rhs:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if continuum_lhs(mid) > rhs:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def profile(lam):
    lam = mp.mpf(lam)
    if not lam:
        return mp.mpf(1)
    # 1 - lam*atan(1/lam) cancels catastrophically for large lam; raise the
    # working precision with the magnitude of lam instead of using a series
    with mp.workdps(mp.mp.dps + 2 * max(0, int(mp.log10(lam)))):
        return +(1 - lam * mp.atan(1 / lam))


def profile_integral() -> mp.mpf:
    return mp.quad(profile, [0, 1, 10, 100, mp.inf])


def rpa_bracket(v) -> mp.mpf:
    v = mp.mpf(v)
    c = 2 * mp.pi * KAPPA_MP * v
    body = mp.quad(lambda x: mp.log(1 + c * profile(x)), [0, 1, 10, 100, 1000, mp.inf])
    return body / mp.pi - v * KAPPA_MP * mp.pi / 2
