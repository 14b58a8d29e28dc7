"""Dense symplectic diagonalization of a single mode.

Frequencies come from the I_k x I_k matrix ``A = d^(1/2) (d + 2b) d^(1/2)``;
the full 4 I_k x 4 I_k symplectic matrix is only assembled by
:func:`build_factorization` for validation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from .errors import IllConditionedError, NotPSDError
from .lattice import KAPPA
from .mode import ModeHamiltonian, QuadraticBlocks, assemble_blocks, assemble_grand_matrix, segal_theta

PSD_TOL = 1e-10
MAX_COND = 1e14
SECULAR_SWITCH = 1500


def _eigh_psd(matrix: np.ndarray, name: str = "matrix") -> Tuple[np.ndarray, np.ndarray]:
    m = np.asarray(matrix, dtype=float)
    if m.size == 0:
        return np.zeros(0), np.zeros((0, 0))
    w, v = np.linalg.eigh(0.5 * (m + m.T))
    scale = max(np.abs(w).max(), np.finfo(float).tiny)
    if w.min() < -PSD_TOL * scale:
        raise NotPSDError(f"{name} has eigenvalue {w.min():.3e} (norm {scale:.3e})")
    return np.clip(w, 0.0, None), v


def psd_power(matrix: np.ndarray, power: float, name: str = "matrix") -> np.ndarray:
    w, v = _eigh_psd(matrix, name)
    if power < 0 and w.size:
        if w.min() <= 0 or w.max() / w.min() > MAX_COND:
            raise IllConditionedError(f"{name} is singular or ill-conditioned", block=name)
    return (v * w**power) @ v.T


def sqrt_psd(matrix: np.ndarray) -> np.ndarray:
    """Symmetric square root of a symmetric positive semidefinite matrix.

    Eigenvalues down to ``-1e-10 * ||matrix||`` are treated as rounding and
    clamped to zero; anything more negative raises :class:`NotPSDError`.
    """
    return psd_power(matrix, 0.5)


def block_hadamard(n: int) -> np.ndarray:
    eye = np.eye(n)
    return np.block([[eye, eye], [eye, -eye]]) / math.sqrt(2.0)


def symplectic_form(n: int) -> np.ndarray:
    """J = [[0, 1], [-1, 0]] acting on (phi, pi) with n modes each."""
    eye, z = np.eye(n), np.zeros((n, n))
    return np.block([[z, eye], [-eye, z]])


@dataclass(frozen=True, eq=False)
class SymplecticFactorization:
    E: np.ndarray
    S: np.ndarray
    U: np.ndarray
    theta: np.ndarray
    a_matrix: np.ndarray
    b_matrix: np.ndarray
    grand: np.ndarray = field(repr=False)

    @property
    def E_tilde(self) -> np.ndarray:
        """diag(A^(1/2), B^(1/2))"""
        ra, rb = sqrt_psd(self.a_matrix), sqrt_psd(self.b_matrix)
        z = np.zeros_like(ra)
        return np.block([[ra, z], [z, rb]])

    def symplectic_residual(self) -> float:
        n = self.S.shape[0] // 2
        J = symplectic_form(n)
        return float(np.abs(self.S.T @ J @ self.S - J).max()) if n else 0.0

    def diagonalization_residual(self) -> float:
        if not self.S.size:
            return 0.0
        et = self.E_tilde
        z = np.zeros_like(et)
        target = 0.5 * np.block([[et, z], [z, et]])
        return float(np.abs(self.S.T @ self.grand @ self.S - target).max())

    def isospectral_residual(self) -> float:
        """Max relative gap between the sorted spectra of A and B."""
        if not self.a_matrix.size:
            return 0.0
        wa = np.linalg.eigvalsh(self.a_matrix)
        wb = np.linalg.eigvalsh(self.b_matrix)
        return float(np.max(np.abs(wa - wb) / np.maximum(np.abs(wa), np.finfo(float).tiny)))


def _check_conditioning(m: np.ndarray, name: str) -> None:
    if not m.size:
        return
    w = np.linalg.eigvalsh(m)
    if w.min() <= 0 or w.max() / w.min() > MAX_COND:
        raise IllConditionedError(
            f"{name} lost positive definiteness", block=name, min_eig=float(w.min()), max_eig=float(w.max())
        )


def build_factorization(blocks: QuadraticBlocks) -> SymplecticFactorization:
    n = blocks.i_k
    minus, plus = blocks.minus, blocks.plus
    _check_conditioning(minus, "D+W-W~")
    _check_conditioning(plus, "D+W+W~")

    m_half = psd_power(minus, 0.5, "D+W-W~")
    m_mhalf = psd_power(minus, -0.5, "D+W-W~")
    E = sqrt_psd(m_half @ plus @ m_half)
    E_half = psd_power(E, 0.5, "E")
    E_mhalf = psd_power(E, -0.5, "E")
    U = block_hadamard(n)

    z = np.zeros((2 * n, 2 * n))
    S = np.block([[m_half @ E_mhalf @ U, z], [z, m_mhalf @ E_half @ U]])

    d_half = psd_power(blocks.d, 0.5, "d")
    dp = blocks.d + 2.0 * blocks.b
    dp_half = psd_power(dp, 0.5, "d+2b")
    A = d_half @ dp @ d_half
    B = dp_half @ blocks.d @ dp_half
    return SymplecticFactorization(
        E=E, S=S, U=U, theta=segal_theta(2 * n), a_matrix=0.5 * (A + A.T), b_matrix=0.5 * (B + B.T),
        grand=assemble_grand_matrix(blocks),
    )


@dataclass(frozen=True, eq=False)
class BosonSpectrum:
    k: np.ndarray
    frequencies: np.ndarray
    shift: float
    g: float
    plasmon_index: Optional[int] = None
    multiplicity: int = 2

    @property
    def all_frequencies(self) -> np.ndarray:
        """Each frequency repeated ``multiplicity`` times (2 I_k values)."""
        return np.sort(np.repeat(self.frequencies, self.multiplicity))

    @property
    def plasmon(self) -> Optional[float]:
        return None if self.plasmon_index is None else float(self.frequencies[self.plasmon_index])


def a_matrix(mode: ModeHamiltonian) -> np.ndarray:
    """A = diag(u^4) + 2 g (u^2)(u^2)^T"""
    u2 = mode.u**2
    return np.diag(u2**2) + 2.0 * mode.g * np.outer(u2, u2)


def diagonalize_mode(
    mode: Union[ModeHamiltonian, QuadraticBlocks], k=None, method: str = "auto"
) -> BosonSpectrum:
    """Oscillator frequencies (sqrt of eig A) and ground-state shift 1/2 tr(E - D - W).

    Parameters
    ----------
    mode
        The mode, or its blocks ``(d, b)`` (then ``k`` labels the result).
    method
        ``"dense"`` diagonalizes A with LAPACK; ``"secular"`` uses the
        rank-one roots (O(I_k^2), only for a ``ModeHamiltonian``); ``"auto"``
        picks ``secular`` above ``SECULAR_SWITCH`` patches.
    """
    if method not in ("auto", "dense", "secular"):
        raise InvalidArgument(f"unknown method {method!r}")
    if isinstance(mode, QuadraticBlocks):
        blocks = mode
        u2 = np.diag(blocks.d).copy()
        b_diag = np.diag(blocks.b)
        g = float(b_diag.sum() / u2.sum()) if u2.size and u2.sum() > 0 else 0.0
        A = np.diag(u2**2) + 2.0 * np.sqrt(np.outer(u2, u2)) * blocks.b
        tr_b = float(b_diag.sum())
        kvec = np.asarray(k if k is not None else (0.0, 0.0, 1.0), float)
    else:
        u2 = mode.u**2
        g = mode.g
        A = None
        tr_b = g * float(u2.sum())
        kvec = mode.k

    if u2.size == 0:
        return BosonSpectrum(k=kvec, frequencies=np.zeros(0), shift=0.0, g=g)
    if g == 0:
        return BosonSpectrum(k=kvec, frequencies=np.sort(u2), shift=0.0, g=g)

    use_secular = method == "secular" or (method == "auto" and u2.size > SECULAR_SWITCH)
    if use_secular and not isinstance(mode, QuadraticBlocks):
        from .secular import SecularProblem, secular_roots

        lam = np.clip(secular_roots(SecularProblem.from_mode(mode, "paired")), 0.0, None)
    else:
        lam = np.clip(np.linalg.eigvalsh(a_matrix(mode) if A is None else A), 0.0, None)
    freqs = np.sqrt(lam)
    shift = float(freqs.sum() - u2.sum() - tr_b)
    return BosonSpectrum(k=kvec, frequencies=freqs, shift=shift, g=g, plasmon_index=freqs.size - 1)


def excitation_energies(spectrum: BosonSpectrum, mode: ModeHamiltonian, hbar: float = 1.0):
    """Physical single-boson energies 2 kappa hbar |k| e and the shift energy.

    With the default ``hbar=1`` the values are in units of hbar.
    """
    scale = 2.0 * KAPPA * hbar * mode.abs_k
    return scale * spectrum.frequencies, scale * spectrum.shift
