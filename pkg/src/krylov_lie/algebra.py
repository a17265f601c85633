"""Rank-one sectors, closed-form Lanczos coefficients and Cartan-phase dressing."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .drives import DriveEnvelope
from .errors import DomainError

DEFAULT_TRUNCATION = 64

#: Sector signs: compact su(2), non-compact su(1,1), Heisenberg-Weyl.
SU2, SU11, HW = 1, -1, 0

CARTAN_A3 = np.array([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
CARTAN_B3 = np.array([[2, -1, 0], [-1, 2, -2], [0, -1, 2]])


@dataclass(frozen=True)
class SectorSignature:
    """A rank-one sector.

    Attributes:
        sigma: +1 (su(2)), -1 (su(1,1)) or 0 (Heisenberg-Weyl).
        lowest_weight: L0 eigenvalue of the lowest-weight state; ``-j`` for
            su(2), ``kappa > 0`` for su(1,1), unused for Heisenberg-Weyl.
        dim: chain length; ``2j + 1`` for su(2), a truncation otherwise.
    """

    sigma: int
    lowest_weight: float = 0.0
    dim: int | None = None

    def __post_init__(self):
        if self.sigma not in (SU2, SU11, HW):
            raise DomainError(f"sigma must be +1, -1 or 0, got {self.sigma!r}")
        lw = float(self.lowest_weight)
        if not math.isfinite(lw):
            raise DomainError("lowest_weight must be finite")
        if self.sigma == SU2:
            two_j = -2.0 * lw
            snapped = round(two_j)
            if abs(two_j - snapped) > 1e-9 or snapped < 0:
                raise DomainError(f"su(2) lowest weight must be -j with 2j a nonnegative integer, got {lw}")
            lw = -snapped / 2.0
            dim = snapped + 1
            if self.dim is not None and self.dim != dim:
                raise DomainError(f"su(2) sector with j={snapped / 2} has dim {dim}, got {self.dim}")
        else:
            if self.sigma == SU11 and lw <= 0:
                raise DomainError(f"su(1,1) lowest weight must be positive, got {lw}")
            if self.sigma == HW:
                lw = 0.0
            dim = DEFAULT_TRUNCATION if self.dim is None else int(self.dim)
        if dim < 1:
            raise DomainError("dim must be >= 1")
        object.__setattr__(self, "lowest_weight", lw)
        object.__setattr__(self, "dim", dim)

    @classmethod
    def su2(cls, j: float) -> "SectorSignature":
        return cls(SU2, -j)

    @classmethod
    def su11(cls, kappa: float, dim: int = DEFAULT_TRUNCATION) -> "SectorSignature":
        return cls(SU11, kappa, dim)

    @classmethod
    def heisenberg_weyl(cls, dim: int = DEFAULT_TRUNCATION) -> "SectorSignature":
        return cls(HW, 0.0, dim)

    @property
    def j(self) -> float:
        if self.sigma != SU2:
            raise AttributeError("j is defined for su(2) sectors only")
        return -self.lowest_weight

    @property
    def is_truncated(self) -> bool:
        return self.sigma != SU2

    def with_dim(self, dim: int) -> "SectorSignature":
        if self.sigma == SU2:
            return self
        return SectorSignature(self.sigma, self.lowest_weight, dim)

    @property
    def complexity_algebra(self) -> tuple[float, float]:
        """Constants ``(A, G)`` in ``[L, B] = A K + G`` for ``L = L+ + L-``, ``B = L+ - L-``."""
        if self.sigma == HW:
            raise DomainError("complexity algebra constants are defined for sigma = +-1")
        return -4.0 * self.sigma, -4.0 * self.sigma * self.lowest_weight

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "lowest_weight": self.lowest_weight, "dim": self.dim}


def lanczos_coefficients(sector: SectorSignature, n_max: int) -> np.ndarray:
    """Return ``[b_1, ..., b_{n_max}]`` for the lowest-weight chain.

    ``b_n^2 = -sigma n (2 lambda + n - 1)`` for su(2)/su(1,1) and ``b_n^2 = n``
    for Heisenberg-Weyl. For su(2), ``b_{2j+1}`` may be requested and is 0.
    """
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    if sector.sigma == SU2 and n_max > sector.dim:
        raise DomainError(f"su(2) chain of dim {sector.dim} has no b_{n_max}")
    n = np.arange(1, n_max + 1, dtype=float)
    if sector.sigma == HW:
        return np.sqrt(n)
    sq = -sector.sigma * n * (2.0 * sector.lowest_weight + n - 1.0)
    if np.any(sq < -1e-12):
        bad = int(n[np.argmax(sq < -1e-12)])
        raise DomainError(f"negative b_{bad}^2: inconsistent lowest weight for sigma={sector.sigma}")
    return np.sqrt(np.clip(sq, 0.0, None))


def lanczos_coefficient(sector: SectorSignature, n: int) -> float:
    """Single ``b_n`` with the recursion seed ``b_0 = 0``."""
    if n == 0:
        return 0.0
    return float(lanczos_coefficients(sector, n)[-1])


# --- Cartan phases ---------------------------------------------------------

def _check_row(drive: DriveEnvelope, cartan_row: Sequence[float]) -> None:
    if len(cartan_row) != len(drive.cartan_drives):
        raise DomainError(
            f"cartan_row has {len(cartan_row)} entries but drive has "
            f"{len(drive.cartan_drives)} Cartan drives")


def cartan_phase(drive: DriveEnvelope, cartan_row: Sequence[float], t):
    """``phi(t) = sum_l row_l int_0^t g_l``."""
    _check_row(drive, cartan_row)
    t = np.asarray(t, dtype=float)
    phi = np.zeros_like(t)
    for w, g in zip(cartan_row, drive.cartan_drives):
        if w != 0:
            phi = phi + w * np.real(g.integral(t))
    return phi


def cartan_phase_rate(drive: DriveEnvelope, cartan_row: Sequence[float], t):
    """Time derivative of :func:`cartan_phase`."""
    _check_row(drive, cartan_row)
    t = np.asarray(t, dtype=float)
    rate = np.zeros_like(t)
    for w, g in zip(cartan_row, drive.cartan_drives):
        if w != 0:
            rate = rate + w * np.real(g.value(t))
    return rate


def effective_coupling(drive: DriveEnvelope, cartan_row: Sequence[float], t):
    """Interaction-picture coupling ``gamma(t) = e^{i phi(t)} f(t)``."""
    return np.exp(1j * cartan_phase(drive, cartan_row, t)) * drive.coupling.value(t)


def coupling_function(drive: DriveEnvelope, cartan_row: Sequence[float] = ()) -> Callable:
    """Bind ``drive`` and ``cartan_row`` into a callable ``gamma(t)``.

    The callable carries a ``breakpoints`` attribute for piecewise drives.
    """
    _check_row(drive, cartan_row)
    row = tuple(cartan_row)

    def gamma(t):
        out = effective_coupling(drive, row, t)
        return complex(out) if np.ndim(out) == 0 else out

    gamma.breakpoints = drive.breakpoints
    return gamma


# --- Virasoro ----------------------------------------------------------------

def virasoro_weight(h: float, c: float, k: int, dim: int = DEFAULT_TRUNCATION) -> SectorSignature:
    """su(1,1) sector spanned by ``L_{-k}, L_0, L_k`` on a primary of weight ``h``.

    ``lambda_k = h/k + c (k^2 - 1) / (24 k)``.
    """
    if int(k) != k or k < 1:
        raise DomainError("Virasoro mode k must be a positive integer")
    if h < 0:
        raise DomainError("primary weight h must be nonnegative")
    lam = h / k + c * (k * k - 1) / (24.0 * k)
    if lam <= 0:
        raise DomainError(f"lambda_k = {lam} <= 0: non-unitary sector")
    return SectorSignature(SU11, lam, dim)


# --- root data -------------------------------------------------------------

@dataclass(frozen=True)
class RootData:
    """Cartan matrix plus a selection of simple roots (1-based indices)."""

    cartan_matrix: tuple[tuple[int, ...], ...]
    selected_roots: tuple[int, ...]
    sector_signs: tuple[int, ...] = ()

    def __post_init__(self):
        a = np.asarray(self.cartan_matrix)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.size == 0:
            raise DomainError("Cartan matrix must be square and nonempty")
        if not np.all(a == np.round(a)):
            raise DomainError("Cartan matrix must be integral")
        a = a.astype(int)
        if np.any(np.diag(a) != 2):
            raise DomainError("Cartan matrix diagonal entries must equal 2")
        off = a[~np.eye(a.shape[0], dtype=bool)]
        if np.any(off > 0):
            raise DomainError("Cartan matrix off-diagonal entries must be <= 0")
        roots = tuple(int(r) for r in self.selected_roots)
        rank = a.shape[0]
        for r in roots:
            if not 1 <= r <= rank:
                raise DomainError(f"root index {r} is not a simple root of a rank-{rank} algebra")
        if len(set(roots)) != len(roots):
            raise DomainError("selected roots must be distinct")
        signs = tuple(int(s) for s in self.sector_signs)
        if signs and len(signs) != len(roots):
            raise DomainError("sector_signs must match selected_roots")
        if any(s not in (SU2, SU11) for s in signs):
            raise DomainError("root sectors must have sign +1 or -1")
        object.__setattr__(self, "cartan_matrix", tuple(tuple(int(x) for x in row) for row in a))
        object.__setattr__(self, "selected_roots", roots)
        object.__setattr__(self, "sector_signs", signs)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.cartan_matrix, dtype=int)

    def cartan_row(self, root: int) -> tuple[int, ...]:
        """``alpha_root(H_l)`` for all l: the row of the Cartan matrix."""
        return self.cartan_matrix[root - 1]


@dataclass(frozen=True)
class CommutingCheck:
    ok: bool
    offending_pairs: tuple[tuple[int, int], ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    @property
    def diagnostic(self) -> str:
        if self.ok:
            return "selected simple-root sectors commute"
        pairs = ", ".join(f"({i},{k})" for i, k in self.offending_pairs)
        return f"non-commuting simple-root pairs (nonzero Cartan entries): {pairs}"


def validate_commuting_sectors(roots: RootData) -> CommutingCheck:
    """Check that all selected simple-root sectors mutually commute.

    Two distinct simple roots never differ by a root, and their sum is a root
    exactly when they are joined in the Dynkin diagram, so vanishing mutual
    Cartan entries is the whole condition.
    """
    a = roots.matrix
    bad = []
    for i, k in itertools.combinations(sorted(roots.selected_roots), 2):
        if a[i - 1, k - 1] != 0 or a[k - 1, i - 1] != 0:
            bad.append((i, k))
    return CommutingCheck(not bad, tuple(bad))
