"""Equal-area patch decomposition of the Fermi surface.

The northern hemisphere is cut into ``M/2`` regions by a zonal scheme (a
polar cap followed by iso-latitude collars split evenly in longitude) and
the southern patches are the antipodal images, so patch ``j + M/2`` is the
antipode of patch ``j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, TextIO

import numpy as np
from scipy import integrate

from .errors import InvalidArgument
from .lattice import KAPPA, FermiBall, Membership

TWO_PI = 2.0 * math.pi
DEFAULT_DELTA = 0.05


@dataclass(frozen=True, eq=False)
class PatchSet:
    m_patches: int
    centers: np.ndarray = field(repr=False)
    areas: np.ndarray = field(repr=False)
    corridor_half_width: float = 0.0
    radius: float = 1.0
    # northern regions, one entry per patch 0..M/2-1
    theta_lo: np.ndarray = field(default=None, repr=False)
    theta_hi: np.ndarray = field(default=None, repr=False)
    phi_lo: np.ndarray = field(default=None, repr=False)
    phi_hi: np.ndarray = field(default=None, repr=False)
    # ring structure for lookup
    ring_edges: np.ndarray = field(default=None, repr=False)
    ring_start: np.ndarray = field(default=None, repr=False)
    ring_count: np.ndarray = field(default=None, repr=False)

    @property
    def n_north(self) -> int:
        return self.m_patches // 2

    @property
    def corridor_angle(self) -> float:
        return self.corridor_half_width / self.radius

    def antipode(self, alpha):
        return (np.asarray(alpha) + self.n_north) % self.m_patches

    def locate(self, directions) -> np.ndarray:
        """Patch index of each direction, or -1 where it falls in a corridor."""
        v = np.atleast_2d(np.asarray(directions, dtype=float))
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        south = ~_half_space_mask(v)
        v = np.where(south[:, None], -v, v)
        theta = np.arccos(np.clip(v[:, 2], -1.0, 1.0))
        phi = np.mod(np.arctan2(v[:, 1], v[:, 0]), TWO_PI)

        ring = np.searchsorted(self.ring_edges, theta, side="right") - 1
        ring = np.clip(ring, 0, len(self.ring_count) - 1)
        count = self.ring_count[ring]
        slot = np.minimum((phi / (TWO_PI / count)).astype(np.int64), count - 1)
        idx = self.ring_start[ring] + slot

        w = self.corridor_angle
        if w > 0:
            ok = theta <= self.theta_hi[idx] - w
            has_lo = self.theta_lo[idx] > 0
            ok &= ~has_lo | (theta >= self.theta_lo[idx] + w)
            split = count > 1
            sin_t = np.sin(theta)
            d_lo = np.arcsin(np.clip(sin_t * np.abs(np.sin(phi - self.phi_lo[idx])), 0, 1))
            d_hi = np.arcsin(np.clip(sin_t * np.abs(np.sin(self.phi_hi[idx] - phi)), 0, 1))
            ok &= ~split | ((d_lo >= w) & (d_hi >= w))
            idx = np.where(ok, idx, -1)
        return np.where(south & (idx >= 0), idx + self.n_north, idx)

    def to_text(self) -> str:
        lines = ["# index x y z area_sr"]
        for a, (c, s) in enumerate(zip(self.centers, self.areas)):
            lines.append(f"{a} {c[0]:.17g} {c[1]:.17g} {c[2]:.17g} {s:.17g}")
        return "\n".join(lines) + "\n"


def _half_space_mask(v: np.ndarray) -> np.ndarray:
    x, y, z = v[:, 0], v[:, 1], v[:, 2]
    return (z > 0) | ((z == 0) & (y > 0)) | ((z == 0) & (y == 0) & (x > 0))


def in_half_space(k) -> bool:
    """Lexicographic half space: z > 0, else y > 0, else x > 0."""
    k = np.asarray(k, dtype=float).reshape(3)
    if not k.any():
        raise InvalidArgument("k = 0 is in neither half space")
    return bool(_half_space_mask(k[None, :])[0])


def _collar_counts(n: int) -> List[int]:
    """Region counts per ring (cap first) for n >= 3 hemisphere regions."""
    area = TWO_PI / n
    theta_cap = math.acos(1.0 - 1.0 / n)
    n_collars = max(1, round((math.pi / 2 - theta_cap) / math.sqrt(area)))
    while True:
        step = (math.pi / 2 - theta_cap) / n_collars
        counts, carry = [], 0.0
        for i in range(n_collars):
            t0, t1 = theta_cap + i * step, theta_cap + (i + 1) * step
            ideal = TWO_PI * (math.cos(t0) - math.cos(t1)) / area
            r = int(round(ideal + carry))
            carry += ideal - r
            counts.append(r)
        counts[-1] += (n - 1) - sum(counts)
        # a single-region collar is an annulus whose centroid sits on the axis
        if min(counts) >= 2 or n_collars == 1:
            return [1] + counts
        n_collars -= 1


def _centroid(t0, t1, p0, p1):
    s2 = (t1 / 2 - math.sin(2 * t1) / 4) - (t0 / 2 - math.sin(2 * t0) / 4)
    if p1 - p0 >= TWO_PI:
        x = y = 0.0
    else:
        x = s2 * (math.sin(p1) - math.sin(p0))
        y = s2 * (math.cos(p0) - math.cos(p1))
    z = 0.5 * (math.sin(t1) ** 2 - math.sin(t0) ** 2) * (p1 - p0)
    c = np.array([x, y, z])
    return c / np.linalg.norm(c)


def _region_area(t0, t1, p0, p1, w) -> float:
    full_ring = p1 - p0 >= TWO_PI
    if w == 0:
        return (math.cos(t0) - math.cos(t1)) * (p1 - p0)
    a = t0 + w if t0 > 0 else 0.0
    b = t1 - w
    if b <= a:
        return 0.0
    if full_ring:
        return (math.cos(a) - math.cos(b)) * (p1 - p0)

    def width(t):
        s = math.sin(t)
        if s <= math.sin(w):
            return 0.0
        return s * max(0.0, (p1 - p0) - 2 * math.asin(math.sin(w) / s))

    val, _ = integrate.quad(width, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def partition_sphere(m_patches: int, corridor_half_width: float = 0.0, radius: float = 1.0) -> PatchSet:
    """Equal-area antipodally symmetric partition of the unit sphere into M patches.

    ``corridor_half_width`` is measured on a sphere of the given ``radius``
    (the Fermi radius for lattice work), i.e. it removes an angular strip of
    half-width ``corridor_half_width / radius`` along every patch boundary.
    """
    if m_patches < 2 or m_patches % 2:
        raise InvalidArgument(f"M must be even and >= 2, got {m_patches}")
    if corridor_half_width < 0 or radius <= 0:
        raise InvalidArgument("corridor_half_width must be >= 0 and radius > 0")
    n = m_patches // 2

    if n <= 2:
        counts = [n]
        edges = [0.0, math.pi / 2]
    else:
        counts = _collar_counts(n)
        area = TWO_PI / n
        edges = [0.0]
        cos_t = 1.0
        for c in counts[:-1]:
            cos_t -= c * area / TWO_PI
            edges.append(math.acos(cos_t))
        edges.append(math.pi / 2)

    t_lo, t_hi, p_lo, p_hi = [], [], [], []
    for r, c in enumerate(counts):
        dphi = TWO_PI / c
        for j in range(c):
            t_lo.append(edges[r])
            t_hi.append(edges[r + 1])
            p_lo.append(j * dphi)
            p_hi.append(TWO_PI if j == c - 1 else (j + 1) * dphi)

    w = corridor_half_width / radius
    north = np.array([_centroid(*reg) for reg in zip(t_lo, t_hi, p_lo, p_hi)])
    north_area = np.array([_region_area(*reg, w) for reg in zip(t_lo, t_hi, p_lo, p_hi)])

    return PatchSet(
        m_patches=m_patches,
        centers=np.vstack([north, -north]),
        areas=np.concatenate([north_area, north_area]),
        corridor_half_width=float(corridor_half_width),
        radius=float(radius),
        theta_lo=np.array(t_lo),
        theta_hi=np.array(t_hi),
        phi_lo=np.array(p_lo),
        phi_hi=np.array(p_hi),
        ring_edges=np.array(edges),
        ring_start=np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(np.int64),
        ring_count=np.array(counts, dtype=np.int64),
    )


def write_patchset(patchset: PatchSet, fh: TextIO) -> None:
    fh.write(patchset.to_text())


def read_patch_table(fh: Iterable[str]) -> tuple:
    """Parse the text table written by ``write_patchset`` into (centers, areas)."""
    rows = [line.split() for line in fh if line.strip() and not line.startswith("#")]
    data = np.array([[float(x) for x in r[1:]] for r in rows])
    return data[:, :3], data[:, 3]


@dataclass(frozen=True, eq=False)
class ModeIndexSets:
    k: np.ndarray
    i_plus: np.ndarray
    i_minus: np.ndarray
    delta: float
    n_ref: int

    @property
    def cutoff(self) -> float:
        return self.n_ref ** (-self.delta)


def index_sets(patchset: PatchSet, k, delta: float = DEFAULT_DELTA, n_ref: int = 10**6) -> ModeIndexSets:
    """Patches with ``k_hat . omega_alpha >= n_ref**-delta`` and their antipodes.

    ``i_minus[j]`` is the antipode of ``i_plus[j]``.
    """
    k = np.asarray(k, dtype=float).reshape(3)
    norm = np.linalg.norm(k)
    if norm == 0:
        raise InvalidArgument("k = 0 has no direction")
    if delta <= 0:
        raise InvalidArgument(f"delta must be positive, got {delta}")
    khat = k / norm
    thr = float(n_ref) ** (-delta)
    dots = patchset.centers @ khat
    i_plus = np.flatnonzero(dots >= thr)
    i_minus = patchset.antipode(i_plus)
    assert np.array_equal(np.sort(i_minus), np.flatnonzero(-dots >= thr))
    return ModeIndexSets(k=k, i_plus=i_plus, i_minus=i_minus, delta=float(delta), n_ref=int(n_ref))


def patch_membership(
    patchset: PatchSet, alpha: int, k_fermi: float, radial_extension: float
) -> Membership:
    """Predicate for B_alpha: the patch extended radially by ``radial_extension`` about the Fermi sphere."""
    lo2 = max(k_fermi - radial_extension, 0.0) ** 2
    hi2 = (k_fermi + radial_extension) ** 2

    def member(q: np.ndarray) -> np.ndarray:
        q = np.asarray(q)
        r2 = np.einsum("ij,ij->i", q, q).astype(float)
        out = (r2 > 0) & (r2 >= lo2) & (r2 <= hi2)
        if out.any():
            out[out] = patchset.locate(q[out]) == alpha
        return out

    return member


def normalization(
    patchset: PatchSet,
    alpha: int,
    k,
    n_ref: int,
    mode: str = "approx",
    ball: Optional[FermiBall] = None,
) -> float:
    """Pair-count normalization n_{alpha,k}.

    ``approx`` is the flat-box estimate ``n^2 = (4 pi N^(2/3) / M) |k . omega_alpha|``;
    ``fermi`` uses the Fermi radius instead, ``n^2 = (4 pi k_F^2 / M) |k . omega_alpha|``
    with ``k_F = kappa N^(1/3)`` (smaller by ``kappa^2``); ``exact`` counts lattice
    pairs inside the radially extended patch of ``ball`` (built from ``n_ref`` if
    omitted).
    """
    k = np.asarray(k, dtype=float).reshape(3)
    if not k.any():
        raise InvalidArgument("k = 0 has no pairs")
    proj = abs(float(k @ patchset.centers[alpha]))
    if mode == "approx":
        return math.sqrt(4.0 * math.pi * n_ref ** (2.0 / 3.0) / patchset.m_patches * proj)
    if mode == "fermi":
        k_fermi = KAPPA * n_ref ** (1.0 / 3.0)
        return math.sqrt(4.0 * math.pi * k_fermi**2 / patchset.m_patches * proj)
    if mode == "exact":
        from .lattice import build_fermi_ball, count_pairs_exact

        if ball is None:
            ball = build_fermi_ball(n_particles=n_ref)
        ext = max(patchset.corridor_half_width, float(np.abs(k).max()), float(np.linalg.norm(k)))
        member = patch_membership(patchset, alpha, ball.k_fermi, ext)
        return math.sqrt(count_pairs_exact(ball, member, k.astype(np.int64)))
    raise InvalidArgument(f"unknown normalization mode {mode!r}")
