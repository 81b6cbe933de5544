"""Core parameter types for the two-tier cache-enabled network."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParam

__all__ = [
    "NetworkParams",
    "ContentConfig",
    "CachingPolicy",
    "AnalyticReport",
    "zipf_popularity",
]


def zipf_popularity(n_files: int, gamma: float) -> np.ndarray:
    """Zipf popularity vector a_n ∝ n^-gamma, normalized to 1."""
    if n_files < 1:
        raise InvalidParam(f"n_files must be >= 1, got {n_files}")
    if gamma <= 0:
        raise InvalidParam(f"zipf exponent must be > 0, got {gamma}")
    a = np.arange(1, n_files + 1, dtype=float) ** (-gamma)
    return a / a.sum()


@dataclass(frozen=True)
class NetworkParams:
    """Densities, antenna budget, and radio parameters of the two tiers.

    Powers are informational only: the tiers use disjoint spectrum and the
    interference-limited SIR within a tier is power-independent.
    """

    lambda1: float          # MBS density (m^-2)
    lambda2: float          # SBS density (m^-2)
    lambda_u: float         # user density (m^-2)
    M1: int                 # MBS antennas
    M2: int                 # SBS antennas
    U1: int                 # users served per resource block, MBS tier
    U2: int                 # users served per resource block, SBS tier
    alpha1: float           # path-loss exponent, MBS tier
    alpha2: float           # path-loss exponent, SBS tier
    tau: float              # SIR threshold (linear)
    P1_dbm: float = 46.0
    P2_dbm: float = 23.0

    def __post_init__(self):
        if not (self.lambda1 > 0 and self.lambda2 > 0 and self.lambda_u > 0):
            raise InvalidParam("densities must be positive")
        if self.lambda1 >= self.lambda2:
            raise InvalidParam("lambda1 must be < lambda2 (macro tier sparser)")
        for name, U, M in (("1", self.U1, self.M1), ("2", self.U2, self.M2)):
            if not (1 <= U <= M):
                raise InvalidParam(f"need 1 <= U{name} <= M{name}, got U={U}, M={M}")
        if self.U1 != self.M1:
            raise InvalidParam("MBS tier uses all antennas for multiplexing (U1 = M1)")
        if self.alpha1 <= 2 or self.alpha2 <= 2:
            raise InvalidParam("path-loss exponents must be > 2")
        if not self.tau > 0:
            raise InvalidParam(f"tau must be > 0, got {self.tau}")

    @property
    def load_ratio(self) -> float:
        """Diagnostic rho = lambda_u / (lambda2 * U2) (SBS-tier load)."""
        return self.lambda_u / (self.lambda2 * self.U2)


@dataclass(frozen=True)
class ContentConfig:
    """Content library, popularity, cache sizes, and backhaul capacity.

    File indices are 1-based: files 1..N1 are cached at every MBS, files
    N1+1..N form the candidate set for the SBS tier.
    """

    n_files: int            # N
    popularity: np.ndarray  # a_n, strictly decreasing, sums to 1
    n1: int                 # most-popular set size (= MBS cache size C1)
    c2: int                 # SBS cache size
    cb: int                 # backhaul capacity (distinct files per MBS)
    zipf_gamma: float | None = None

    def __post_init__(self):
        a = np.asarray(self.popularity, dtype=float)
        object.__setattr__(self, "popularity", a)
        if a.shape != (self.n_files,):
            raise InvalidParam(f"popularity must have length {self.n_files}")
        if abs(a.sum() - 1.0) > 1e-12:
            raise InvalidParam(f"popularity must sum to 1, got {a.sum()!r}")
        if not np.all(np.diff(a) < 0):
            raise InvalidParam("popularity must be strictly decreasing")
        if self.n1 < 0 or self.c2 < 1 or self.cb < 0:
            raise InvalidParam("need n1 >= 0, c2 >= 1, cb >= 0")
        if self.n1 + self.c2 > self.n_files:
            raise InvalidParam("n1 + c2 must not exceed n_files")

    @classmethod
    def from_zipf(cls, n_files: int, zipf_gamma: float, n1: int, c2: int,
                  cb: int) -> "ContentConfig":
        return cls(n_files, zipf_popularity(n_files, zipf_gamma), n1, c2, cb,
                   zipf_gamma)

    @property
    def n2_set(self) -> tuple[int, ...]:
        """File indices not cached at MBSs (1-based)."""
        return tuple(range(self.n1 + 1, self.n_files + 1))

    def pop(self, n: int) -> float:
        """Popularity of 1-based file index n."""
        return float(self.popularity[n - 1])


@dataclass(frozen=True)
class CachingPolicy:
    """SBS caching marginals over the cached set, plus the nulling range ratio."""

    nc_set: tuple[int, ...]   # cached file indices (1-based, sorted)
    T: np.ndarray             # caching probabilities aligned with nc_set
    mu: float                 # nulling-range / serving-distance ratio

    def __post_init__(self):
        nc = tuple(int(n) for n in self.nc_set)
        object.__setattr__(self, "nc_set", nc)
        t = np.asarray(self.T, dtype=float)
        object.__setattr__(self, "T", t)
        if len(nc) == 0:
            raise InvalidParam("nc_set must be nonempty")
        if list(nc) != sorted(set(nc)):
            raise InvalidParam("nc_set must be sorted and duplicate-free")
        if t.shape != (len(nc),):
            raise InvalidParam("T must align with nc_set")
        if np.any(t <= 0) or np.any(t > 1 + 1e-12):
            raise InvalidParam("need 0 < T_n <= 1 for every cached file")
        if self.mu < 0:
            raise InvalidParam(f"mu must be >= 0, got {self.mu}")

    def validate(self, content: ContentConfig) -> None:
        """Checks that depend on the content configuration."""
        if len(self.nc_set) < content.c2:
            raise InvalidParam("cached set smaller than the per-SBS cache")
        if abs(float(self.T.sum()) - content.c2) > 1e-8:
            raise InvalidParam(
                f"sum(T) must equal c2={content.c2}, got {self.T.sum()!r}")
        lo, hi = content.n1 + 1, content.n_files
        if any(n < lo or n > hi for n in self.nc_set):
            raise InvalidParam("nc_set must lie in the SBS candidate range")

    @property
    def n_cached(self) -> int:
        return len(self.nc_set)


@dataclass(frozen=True)
class AnalyticReport:
    """Closed-form outputs for one (net, content, policy) triple."""

    q1: float
    q2: float
    ase: float
    ase_lower: float
    ase_upper: float
    theta_bar: float
    epsilon: float
    psi1: float
