"""Integer-lattice Fermi ball and exact particle-hole pair counting.

Everything here works with squared integer norms so that shell boundaries
are decided exactly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument

KAPPA = (3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)

# Predicate over an (n, 3) integer array, returning an (n,) boolean mask.
Membership = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class FermiBall:
    """Closed ball of integer momenta ``{k in Z^3 : |k|^2 <= radius_sq}``."""

    radius_sq: int
    momenta: np.ndarray = field(repr=False)

    @property
    def k_fermi(self) -> float:
        return math.sqrt(self.radius_sq)

    @property
    def n_particles(self) -> int:
        return int(self.momenta.shape[0])

    @property
    def kappa(self) -> float:
        return KAPPA

    @property
    def hbar(self) -> float:
        return self.n_particles ** (-1.0 / 3.0)

    def contains(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=np.int64)
        return np.einsum("...i,...i->...", q, q) <= self.radius_sq


def _cube(half: int) -> np.ndarray:
    r = np.arange(-half, half + 1, dtype=np.int64)
    g = np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1)
    return g.reshape(-1, 3)


def _ball_from_radius_sq(radius_sq: int) -> FermiBall:
    pts = _cube(math.isqrt(radius_sq))
    norms = np.einsum("ij,ij->i", pts, pts)
    return FermiBall(radius_sq=radius_sq, momenta=pts[norms <= radius_sq])


def shell_counts(max_radius_sq: int) -> np.ndarray:
    """Cumulative lattice counts ``N(m) = #{k : |k|^2 <= m}`` for m = 0..max_radius_sq."""
    pts = _cube(math.isqrt(max_radius_sq))
    norms = np.einsum("ij,ij->i", pts, pts)
    per_shell = np.bincount(norms[norms <= max_radius_sq], minlength=max_radius_sq + 1)
    return np.cumsum(per_shell)


def build_fermi_ball(k_fermi: Optional[float] = None, n_particles: Optional[int] = None) -> FermiBall:
    """Build the Fermi ball from either a radius or a target particle number.

    A target ``n_particles`` that falls inside a shell is rounded up to the
    next complete shell, with a warning; the ball always contains whole shells.
    """
    if (k_fermi is None) == (n_particles is None):
        raise InvalidArgument("give exactly one of k_fermi or n_particles")
    if k_fermi is not None:
        if not k_fermi >= 0:
            raise InvalidArgument(f"k_fermi must be non-negative, got {k_fermi}")
        # 1e-9 guards radii such as sqrt(5) whose square rounds just below 5
        return _ball_from_radius_sq(int(math.floor(k_fermi * k_fermi + 1e-9)))

    n_particles = int(n_particles)
    if n_particles < 1:
        raise InvalidArgument(f"n_particles must be >= 1, got {n_particles}")
    guess = int(math.ceil((n_particles / (4.0 * math.pi / 3.0)) ** (2.0 / 3.0))) + 8
    while True:
        counts = shell_counts(guess)
        if counts[-1] >= n_particles:
            break
        guess *= 2
    m = int(np.searchsorted(counts, n_particles))
    if counts[m] != n_particles:
        warnings.warn(
            f"requested N={n_particles} splits a shell; using the complete ball N={counts[m]}",
            stacklevel=2,
        )
    return _ball_from_radius_sq(m)


def count_pairs_exact(ball: FermiBall, patch_membership: Optional[Membership], k) -> int:
    """Number of pairs (p, h) with h in the ball, p = h + k outside, both in the patch.

    ``patch_membership=None`` means the whole lattice.
    """
    k = np.asarray(k, dtype=np.int64).reshape(3)
    if not k.any():
        raise InvalidArgument("k = 0 creates no particle-hole pair")
    holes = ball.momenta
    particles = holes + k
    mask = ~ball.contains(particles)
    if patch_membership is not None:
        mask &= np.asarray(patch_membership(holes), dtype=bool)
        mask &= np.asarray(patch_membership(particles), dtype=bool)
    return int(np.count_nonzero(mask))
