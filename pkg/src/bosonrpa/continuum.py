"""Continuum (M -> infinity) limit: plasmon relation and RPA correlation energy."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, InvalidArgument, NumericalFailure
from .lattice import KAPPA
from .mode import Potential

SERIES_SWITCH = 4.0
DISPERSION_COEFF = 0.3 * math.sqrt(3.0 * KAPPA / math.pi)


def continuum_lhs(lam: float) -> float:
    """-1 + sqrt(lam) arcoth(sqrt(lam)) for lam > 1."""
    lam = float(lam)
    if not lam > 1.0:
        raise DomainError(f"arcoth needs lambda > 1, got {lam}")
    if lam >= SERIES_SWITCH:
        # sum_{n>=1} lam^-n / (2n+1); 60 terms reach 4^-60
        n = np.arange(1, 61)
        return float(np.sum(lam ** (-n.astype(float)) / (2 * n + 1))[()])
    x = math.sqrt(lam)
    return -1.0 + x * 0.5 * math.log1p(2.0 / (x - 1.0))


def solve_continuum(rhs: float) -> float:
    """The unique lam > 1 with continuum_lhs(lam) = rhs."""
    if not rhs > 0:
        raise DomainError(f"right-hand side must be positive, got {rhs}")
    # continuum_lhs(1 + e^t) is decreasing in t; bracket from L(lam) <= 1/(3(lam-1))
    # and L(1+e) ~ log(4/e)/2 - 1 near lam = 1
    t_hi = math.log(1.0 / (3.0 * rhs))
    t_lo = min(t_hi - 1.0, math.log(4.0) - 2.0 * (rhs + 2.0))
    f = lambda t: continuum_lhs(1.0 + math.exp(t)) - rhs
    try:
        t, info = optimize.brentq(f, t_lo, t_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, full_output=True)
    except ValueError as exc:
        raise NumericalFailure("continuum root not bracketed", rhs=rhs) from exc
    if not info.converged:
        raise NumericalFailure("continuum root did not converge", rhs=rhs, iterations=info.iterations)
    return 1.0 + math.exp(t)


def plasmon_continuum(abs_k: float, variant: str = "joint") -> float:
    """Plasmon eigenvalue lam(|k|) of the Coulomb problem in the continuum.

    ``joint`` solves ``L(lam) = |k|^2 / (4 pi kappa)`` (small-|k| energy 2 hbar);
    ``paired`` solves ``L(lam) = |k|^2 / (2 pi kappa)``, the M -> infinity
    limit of the mode Hamiltonian's own rank-one problem (energy sqrt(2) hbar).
    """
    if not abs_k > 0:
        raise InvalidArgument(f"|k| must be positive, got {abs_k}")
    factor = {"joint": 4.0, "paired": 2.0}.get(variant)
    if factor is None:
        raise InvalidArgument(f"unknown variant {variant!r}")
    return solve_continuum(abs_k**2 / (factor * math.pi * KAPPA))


def plasmon_energy(abs_k: float, hbar: float = 1.0, variant: str = "joint") -> float:
    return 2.0 * KAPPA * hbar * abs_k * math.sqrt(plasmon_continuum(abs_k, variant))


def plasmon_series(abs_k: float, hbar: float = 1.0) -> float:
    """Two-term small-|k| plasmon energy hbar (2 + c |k|^2)."""
    if abs_k < 0:
        raise InvalidArgument("|k| must be non-negative")
    return hbar * (2.0 + DISPERSION_COEFF * abs_k**2)


@dataclass
class PlasmonCurve:
    samples: List[Tuple[float, float, float]]
    intercept: float
    quadratic: float


def fit_dispersion(k_values: Sequence[float], energies: Sequence[float]) -> Tuple[float, float]:
    """Least squares of energy against (1, |k|^2); returns (intercept, quadratic)."""
    k = np.asarray(k_values, dtype=float)
    design = np.column_stack([np.ones_like(k), k**2])
    coef, *_ = np.linalg.lstsq(design, np.asarray(energies, dtype=float), rcond=None)
    return float(coef[0]), float(coef[1])


def plasmon_curve(k_values: Sequence[float], hbar: float = 1.0, variant: str = "joint") -> PlasmonCurve:
    samples = []
    for k in k_values:
        lam = plasmon_continuum(k, variant)
        samples.append((float(k), lam, 2.0 * KAPPA * hbar * k * math.sqrt(lam)))
    a, c = fit_dispersion([s[0] for s in samples], [s[2] for s in samples])
    return PlasmonCurve(samples=samples, intercept=a, quadratic=c)


# --- RPA correlation energy -------------------------------------------------

def response_profile(lam) -> np.ndarray:
    """F(lam) = 1 - lam arctan(1/lam), with F(0) = 1."""
    lam = np.asarray(lam, dtype=float)
    out = np.empty_like(lam)
    big = lam >= 8.0
    small = ~big
    ls = lam[small]
    with np.errstate(divide="ignore"):
        out[small] = np.where(ls > 0, 1.0 - ls * np.arctan(1.0 / np.where(ls > 0, ls, 1.0)), 1.0)
    if big.any():
        x = lam[big][:, None] ** -2.0
        n = np.arange(1, 21)
        out[big] = np.sum((-1.0) ** (n + 1) * x**n / (2 * n + 1), axis=1)
    return out


def _f_scalar(lam: float) -> float:
    return float(response_profile(np.array([lam]))[0])


def _log_tail(c: float, cut: float) -> float:
    """Closed-form integral of log(1 + c F) over (cut, inf) from its 1/lam^2 expansion."""
    coeffs = [
        c / 3.0,
        -c / 5.0 - c**2 / 18.0,
        c / 7.0 + c**2 / 15.0 + c**3 / 81.0,
        -c / 9.0 - 71.0 * c**2 / 1050.0 - c**3 / 45.0 - c**4 / 324.0,
    ]
    return sum(a * cut ** (1 - 2 * n) / (2 * n - 1) for n, a in enumerate(coeffs, start=1))


def _tail_cut(c: float) -> float:
    return 100.0 * (1.0 + c)


def _quad(f, a: float, b: float) -> float:
    total = 0.0
    edges = [a] + [x for x in (1.0, 10.0) if a < x < b] + [b]
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=400)
        if err > 1e-10:
            raise NumericalFailure("quadrature missed tolerance", interval=(lo, hi), error=err)
        total += val
    return total


def profile_integral() -> float:
    """Integral of F over (0, inf); equals pi/4."""
    cut = 100.0
    tail = 1.0 / (3 * cut) - 1.0 / (15 * cut**3) + 1.0 / (35 * cut**5) - 1.0 / (63 * cut**7)
    return _quad(_f_scalar, 0.0, cut) + tail


def rpa_bracket(v_hat_k: float) -> float:
    """Per-mode RPA bracket (1/pi) int_0^inf log(1 + 2 pi kappa V F(lam)) dlam - pi kappa V / 2."""
    v = float(v_hat_k)
    if v < 0:
        raise InvalidArgument(f"V(k) must be non-negative, got {v}")
    if v == 0:
        return 0.0
    c = 2.0 * math.pi * KAPPA * v
    cut = _tail_cut(c)
    body = _quad(lambda lam: math.log1p(c * _f_scalar(lam)), 0.0, cut)
    return (body + _log_tail(c, cut)) / math.pi - v * KAPPA * math.pi / 2.0


# --- total energies ---------------------------------------------------------

@dataclass
class ModeEnergy:
    k: Tuple[int, int, int]
    v_hat: float
    shift_finite_m: Optional[float]
    shift_continuum: float


@dataclass
class CorrelationEnergyReport:
    """Correlation energy in units of hbar.

    ``total_continuum = kappa * sum_{k in Z^3} |k| bracket(V(k))``;
    ``total_finite_m = 2 kappa * sum_{k in half space} |k| shift(k)``.
    """

    per_mode: List[ModeEnergy]
    total_continuum: float
    total_finite_m: Optional[float]
    m_patches: Optional[int]
    potential_id: str
    k_cutoff: float
    formal: bool = False
    n_ref: Optional[int] = None
    delta: Optional[float] = None

    @property
    def relative_gap(self) -> Optional[float]:
        if self.total_finite_m is None:
            return None
        if self.total_continuum == 0:
            return 0.0 if self.total_finite_m == 0 else math.inf
        return abs(self.total_finite_m - self.total_continuum) / abs(self.total_continuum)

    @property
    def max_mode_gap(self) -> Optional[float]:
        """Largest per-mode relative gap; unlike ``relative_gap`` it cannot
        benefit from cancellation between modes of opposite error sign."""
        if self.total_finite_m is None:
            return None
        gaps = [
            abs(m.shift_finite_m - m.shift_continuum) / abs(m.shift_continuum)
            for m in self.per_mode
            if m.shift_continuum != 0
        ]
        return max(gaps, default=0.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["relative_gap"] = self.relative_gap
        d["max_mode_gap"] = self.max_mode_gap
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CorrelationEnergyReport":
        d = dict(d)
        d.pop("relative_gap", None)
        d.pop("max_mode_gap", None)
        d["per_mode"] = [ModeEnergy(**dict(m, k=tuple(m["k"]))) for m in d["per_mode"]]
        return cls(**d)


def lattice_modes(radius: float, half_space: bool = True) -> np.ndarray:
    """Nonzero integer k with |k| <= radius (restricted to the half space if asked)."""
    from .patches import _half_space_mask

    r = int(math.floor(radius + 1e-12))
    ax = np.arange(-r, r + 1)
    pts = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), -1).reshape(-1, 3)
    n2 = np.einsum("ij,ij->i", pts, pts)
    keep = (n2 > 0) & (n2 <= radius * radius + 1e-9)
    if half_space:
        keep &= _half_space_mask(pts.astype(float))
    pts = pts[keep]
    order = np.lexsort((pts[:, 0], pts[:, 1], pts[:, 2], n2[keep]))
    return pts[order]


def total_energy(
    v_hat: Potential,
    k_cutoff: Optional[float] = None,
    patchset=None,
    n_ref: int = 10**6,
    delta: float = 0.05,
) -> CorrelationEnergyReport:
    from .bogoliubov import diagonalize_mode
    from .mode import build_mode

    if k_cutoff is None:
        if v_hat.support_radius is None:
            raise InvalidArgument(f"potential {v_hat.spec!r} has unbounded support; give k_cutoff")
        k_cutoff = v_hat.support_radius
    formal = v_hat.support_radius is None

    per_mode: List[ModeEnergy] = []
    total_c = 0.0
    total_f = 0.0 if patchset is not None else None
    for k in lattice_modes(k_cutoff):
        v = v_hat(k)
        v_minus = v_hat(-k)
        abs_k = float(np.linalg.norm(k))
        br = rpa_bracket(v)
        total_c += KAPPA * abs_k * (br + (br if v_minus == v else rpa_bracket(v_minus)))
        shift = None
        if patchset is not None:
            shift = diagonalize_mode(build_mode(k, patchset, v, n_ref, delta)).shift if v else 0.0
            total_f += 2.0 * KAPPA * abs_k * shift
        per_mode.append(ModeEnergy(k=tuple(int(x) for x in k), v_hat=v, shift_finite_m=shift, shift_continuum=br))
    return CorrelationEnergyReport(
        per_mode=per_mode,
        total_continuum=total_c,
        total_finite_m=total_f,
        m_patches=None if patchset is None else patchset.m_patches,
        potential_id=v_hat.spec,
        k_cutoff=float(k_cutoff),
        formal=formal,
        n_ref=n_ref if patchset is not None else None,
        delta=delta if patchset is not None else None,
    )
