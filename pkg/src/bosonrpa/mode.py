"""Per-mode effective Hamiltonian data and its coefficient matrices.

For a mode k the bosonic modes are ordered as ``i_plus`` followed by
``i_minus``; index ``j + I_k`` is the antipodal partner of index ``j`` and
carries the same ``u`` value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np

from .errors import InvalidArgument
from .lattice import KAPPA
from .patches import DEFAULT_DELTA, ModeIndexSets, PatchSet, index_sets


@dataclass(frozen=True)
class Potential:
    """Fourier coefficients V(k) of a pair potential, with an optional support radius."""

    name: str
    func: Callable[[np.ndarray], float] = field(compare=False, repr=False)
    support_radius: Optional[float] = None
    params: Tuple[Tuple[str, float], ...] = ()

    def __call__(self, k) -> float:
        return float(self.func(np.asarray(k, dtype=float)))

    @property
    def spec(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v:g}" for k, v in self.params)


def zero_potential() -> Potential:
    return Potential("zero", lambda k: 0.0, support_radius=0.0)


def indicator_potential(radius: float = 2.0, strength: float = 1.0) -> Potential:
    if radius < 0 or strength < 0:
        raise InvalidArgument("indicator potential needs radius >= 0 and strength >= 0")
    r2 = radius * radius + 1e-9

    def f(k):
        return strength if float(k @ k) <= r2 else 0.0

    return Potential("indicator", f, support_radius=radius, params=(("radius", radius), ("strength", strength)))


def coulomb_potential(scale: float = 1.0) -> Potential:
    def f(k):
        return scale / float(k @ k)

    return Potential("coulomb", f, support_radius=None, params=(("scale", scale),) if scale != 1.0 else ())


def tabulated_potential(table: Dict[Tuple[int, int, int], float], name: str = "table") -> Potential:
    """Potential given on lattice points; zero elsewhere."""
    table = {tuple(int(x) for x in key): float(v) for key, v in table.items()}
    if any(v < 0 for v in table.values()):
        raise InvalidArgument("tabulated potential must be non-negative")
    support = max((math.sqrt(sum(x * x for x in key)) for key, v in table.items() if v), default=0.0)

    def f(k):
        key = tuple(int(round(x)) for x in k)
        return table.get(key, 0.0) if np.allclose(key, k) else 0.0

    return Potential(name, f, support_radius=support)


def parse_potential(text: str) -> Potential:
    """Parse ``name`` or ``name:key=value,...``; ``table:<path>`` reads ``kx ky kz V`` rows."""
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    if name == "table":
        table = {}
        with open(rest) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line:
                    kx, ky, kz, v = line.split()
                    table[(int(kx), int(ky), int(kz))] = float(v)
        return tabulated_potential(table, name=f"table:{rest}")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, _, val = item.partition("=")
        params[key.strip()] = float(val)
    if name == "zero":
        return zero_potential()
    if name == "coulomb":
        return coulomb_potential(**params)
    if name == "indicator":
        return indicator_potential(**params)
    raise InvalidArgument(f"unknown potential {text!r}")


@dataclass(frozen=True, eq=False)
class ModeHamiltonian:
    k: np.ndarray
    index_sets: ModeIndexSets
    u: np.ndarray
    g: float
    v_hat_k: float
    m_patches: int

    @property
    def i_k(self) -> int:
        return int(self.u.size)

    @property
    def degenerate(self) -> bool:
        return self.i_k == 0

    @property
    def abs_k(self) -> float:
        return float(np.linalg.norm(self.k))

    @property
    def u_full(self) -> np.ndarray:
        """u over all 2 I_k modes (both antipodal halves)."""
        return np.concatenate([self.u, self.u])


def coupling(v_hat_k: float, m_patches: int) -> float:
    return KAPPA * v_hat_k * 2.0 * math.pi / m_patches


def build_mode(
    k,
    patchset: PatchSet,
    v_hat: Union[Potential, Callable, float],
    n_ref: int = 10**6,
    delta: float = DEFAULT_DELTA,
) -> ModeHamiltonian:
    k = np.asarray(k, dtype=float).reshape(3)
    sets = index_sets(patchset, k, delta, n_ref)
    v = float(v_hat) if isinstance(v_hat, (int, float)) else float(v_hat(k))
    if v < 0:
        raise InvalidArgument(f"V(k) must be non-negative, got {v} at k={k}")
    khat = k / np.linalg.norm(k)
    u = np.sqrt(np.abs(patchset.centers[sets.i_plus] @ khat))
    return ModeHamiltonian(
        k=k, index_sets=sets, u=u, g=coupling(v, patchset.m_patches), v_hat_k=v, m_patches=patchset.m_patches
    )


def mode_from_u(u, g: float, k=(0.0, 0.0, 1.0), m_patches: Optional[int] = None) -> ModeHamiltonian:
    """A mode given directly by its u-vector and coupling, bypassing the patch geometry."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if g < 0:
        raise InvalidArgument("coupling g must be non-negative")
    m = m_patches if m_patches is not None else 2 * max(u.size, 1)
    idx = np.arange(u.size)
    sets = ModeIndexSets(k=np.asarray(k, float), i_plus=idx, i_minus=idx + u.size, delta=np.inf, n_ref=1)
    v = g * m / (KAPPA * 2.0 * math.pi)
    return ModeHamiltonian(k=np.asarray(k, float), index_sets=sets, u=u, g=float(g), v_hat_k=v, m_patches=m)


@dataclass(frozen=True, eq=False)
class QuadraticBlocks:
    d: np.ndarray
    b: np.ndarray

    @property
    def i_k(self) -> int:
        return self.d.shape[0]

    @property
    def D(self) -> np.ndarray:
        z = np.zeros_like(self.d)
        return np.block([[self.d, z], [z, self.d]])

    @property
    def W(self) -> np.ndarray:
        z = np.zeros_like(self.b)
        return np.block([[self.b, z], [z, self.b]])

    @property
    def W_tilde(self) -> np.ndarray:
        z = np.zeros_like(self.b)
        return np.block([[z, self.b], [self.b, z]])

    @property
    def plus(self) -> np.ndarray:
        """D + W + W~"""
        return self.D + self.W + self.W_tilde

    @property
    def minus(self) -> np.ndarray:
        """D + W - W~"""
        return self.D + self.W - self.W_tilde


def assemble_blocks(mode: ModeHamiltonian) -> QuadraticBlocks:
    u = mode.u
    return QuadraticBlocks(d=np.diag(u**2), b=mode.g * np.outer(u, u))


def assemble_grand_matrix(blocks: QuadraticBlocks) -> np.ndarray:
    """Coefficient matrix of the Hamiltonian in the (phi, pi) field basis."""
    p, m = blocks.plus, blocks.minus
    z = np.zeros_like(p)
    return 0.5 * np.block([[p, z], [z, m]])


def ladder_matrix(blocks: QuadraticBlocks) -> np.ndarray:
    """Coefficient matrix [[D+W, W~], [W~, D+W]] in the (c, c*) basis."""
    dw = blocks.D + blocks.W
    wt = blocks.W_tilde
    return np.block([[dw, wt], [wt, dw]])


def segal_theta(n: int) -> np.ndarray:
    """Change of basis (c, c*) = Theta (phi, pi) for n bosonic modes."""
    eye = np.eye(n)
    return np.block([[eye, 1j * eye], [eye, -1j * eye]]) / math.sqrt(2.0)
