"""Run configuration: flat ``key = value`` files plus command-line overrides."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import InvalidArgument
from .mode import parse_potential

MODES = ("spectrum", "plasmon", "energy", "paircount", "validate")
DEFAULT_DIRECTION = (0.36, 0.48, 0.8)


@dataclass
class RunConfig:
    mode: str = "spectrum"
    n_particles: Optional[int] = None
    k_fermi: Optional[float] = None
    m_patches: int = 200
    delta: float = 0.05
    potential: str = "coulomb"
    k_list: List[Tuple[float, float, float]] = field(default_factory=list)
    k_min: float = 0.05
    k_max: float = 1.0
    k_steps: int = 20
    k_direction: Tuple[float, float, float] = DEFAULT_DIRECTION
    k_cutoff: Optional[float] = None
    corridor: float = 0.0
    rank_one: str = "paired"
    out: Optional[str] = None
    format: str = "csv"
    seed: int = 0
    n_random: int = 100
    tolerances: Dict[str, float] = field(default_factory=dict)

    @property
    def n_ref(self) -> int:
        if self.n_particles is not None:
            return int(self.n_particles)
        if self.k_fermi is not None:
            from .lattice import build_fermi_ball

            return build_fermi_ball(k_fermi=self.k_fermi).n_particles
        return 10**6

    @property
    def hbar(self) -> float:
        return self.n_ref ** (-1.0 / 3.0)

    def k_grid(self) -> np.ndarray:
        """Mode momenta: the explicit list, or |k| samples along ``k_direction``."""
        if self.k_list:
            return np.array(self.k_list, dtype=float).reshape(-1, 3)
        if self.k_steps == 0:
            return np.zeros((0, 3))
        d = np.asarray(self.k_direction, dtype=float)
        d = d / np.linalg.norm(d)
        mags = np.linspace(self.k_min, self.k_max, self.k_steps) if self.k_steps > 1 else np.array([self.k_min])
        return mags[:, None] * d[None, :]

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise InvalidArgument(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n_particles is not None and self.n_particles < 1:
            raise InvalidArgument("n_particles must be >= 1")
        if self.k_fermi is not None and self.k_fermi < 0:
            raise InvalidArgument("k_fermi must be >= 0")
        if self.m_patches < 2 or self.m_patches % 2:
            raise InvalidArgument("m_patches must be even and >= 2")
        if not self.delta > 0:
            raise InvalidArgument("delta must be positive")
        if self.k_steps < 0 or not (0 < self.k_min <= self.k_max):
            raise InvalidArgument("need 0 < k_min <= k_max and k_steps >= 0")
        if any(not any(k) for k in self.k_list):
            raise InvalidArgument("k_list contains k = 0")
        if not np.linalg.norm(self.k_direction) > 0:
            raise InvalidArgument("k_direction must be nonzero")
        if self.k_cutoff is not None and not self.k_cutoff > 0:
            raise InvalidArgument("k_cutoff must be positive")
        if self.corridor < 0:
            raise InvalidArgument("corridor must be >= 0")
        if self.rank_one not in ("paired", "joint"):
            raise InvalidArgument("rank_one must be 'paired' or 'joint'")
        if self.format not in ("csv", "json"):
            raise InvalidArgument("format must be csv or json")
        if self.n_random < 0:
            raise InvalidArgument("n_random must be >= 0")
        parse_potential(self.potential)
        return self

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d["k_list"] = [list(map(float, k)) for k in self.k_list]
        d["k_direction"] = list(map(float, self.k_direction))
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _parse_vec_list(text: str) -> List[Tuple[float, float, float]]:
    out = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        parts = [float(x) for x in chunk.replace(",", " ").split()]
        if len(parts) != 3:
            raise InvalidArgument(f"bad 3-vector {chunk!r}")
        out.append(tuple(parts))
    return out


def _parse_tolerances(text: str) -> Dict[str, float]:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, _, val = item.partition("=")
        out[key.strip()] = float(val)
    return out


_CONVERTERS = {
    "n_particles": lambda s: int(float(s)),
    "k_fermi": float,
    "m_patches": int,
    "delta": float,
    "k_min": float,
    "k_max": float,
    "k_steps": int,
    "k_cutoff": float,
    "corridor": float,
    "seed": int,
    "n_random": int,
    "k_list": _parse_vec_list,
    "k_direction": lambda s: _parse_vec_list(s)[0],
    "tolerances": _parse_tolerances,
}


def coerce(key: str, value):
    key = key.strip().replace("-", "_")
    names = {f.name for f in fields(RunConfig)}
    if key not in names:
        raise InvalidArgument(f"unknown config key {key!r}")
    if value is None or not isinstance(value, str):
        return key, value
    value = value.strip()
    if value.lower() in ("", "none"):
        return key, None if key not in ("k_list", "tolerances") else _CONVERTERS[key]("")
    return key, _CONVERTERS.get(key, str)(value)


def load_config_file(path) -> Dict[str, object]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"{path}:{lineno}: expected key = value")
        key, val = line.split("=", 1)
        k, v = coerce(key, val)
        values[k] = v
    return values


def make_config(file_values: Optional[dict] = None, **overrides) -> RunConfig:
    values = dict(file_values or {})
    for key, val in overrides.items():
        if val is not None:
            k, v = coerce(key, val)
            values[k] = v
    return RunConfig(**values).validate()
