"""Time-dependent speed-limit diagnostics for the spread complexity.

For a coherent state with pole-free data ``(A, B)`` and coupling ``gamma``:

    C       = <L+>            = -2 sigma lambda A conj(B)
    dK/dt   = 2 Im[gamma C]
    dK^2    = -2 sigma lambda |A|^2 |B|^2
    dH^2    = -2 sigma lambda |gamma|^2 + 8 lambda Re[gamma A conj(B)]^2
    cov     = <{H~, K~}>      = 4 lambda (|B|^2 - sigma |A|^2) Re[gamma A conj(B)]
    gap     = 4 dH^2 dK^2 - (dK/dt)^2 = cov^2

All of these follow from the ``z``-forms by ``1 + sigma |z|^2 = 1/|A|^2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import HW, SU2, SU11, SectorSignature
from .errors import DomainError
from .weinorman import HWDisplacement, WNState

DEFAULT_SATURATION_TOL = 1e-6
#: Absolute floor for the gap test; absorbs cancellation in
#: ``4 dH^2 dK^2 - (dK/dt)^2`` when the bound itself is of order one.
GAP_FLOOR = 1e-14


class Saturation(str, enum.Enum):
    SATURATED = "saturated"
    ACCIDENTAL = "accidental_compact"
    UNSATURATED = "unsaturated"


@dataclass(frozen=True)
class QSLReport:
    """Speed-limit data at one time.

    ``gap`` is evaluated from its definition ``bound^2 - (dK/dt)^2``;
    ``gap_closed_form`` is the coherent-state expression, equal to
    ``covariance^2``. ``phase_lock_residual`` is ``Re[gamma A conj(B)]``
    (``= |A|^2 Re[gamma z*]``) for sigma = +-1, and ``Im[gamma conj(alpha)]``
    for Heisenberg-Weyl, which vanishes when the drive is phase-aligned with
    the displacement.
    """

    t: float
    dK_dt: float
    bound: float
    gap: float
    covariance: float
    phase_lock_residual: float
    saturation_flag: Saturation
    dH: float
    dK: float
    gap_closed_form: float
    abs_z: float
    sigma: int


def _classify(gap: float, bound: float, sigma: int, abs_z: float, tol: float) -> Saturation:
    if abs(gap) <= tol * bound * bound + GAP_FLOOR:
        return Saturation.SATURATED
    if sigma == SU2 and abs(abs_z - 1.0) < tol:
        return Saturation.ACCIDENTAL
    return Saturation.UNSATURATED


def qsl_point(sector: SectorSignature, gamma_t: complex, state: WNState | HWDisplacement,
              kry=None, tol: float = DEFAULT_SATURATION_TOL) -> QSLReport:
    """Speed-limit report at one time.

    ``kry`` (the matching :class:`~krylov_lie.krylov.KrylovWavefunction`) is
    accepted for interface symmetry; all quantities are closed forms in the
    Wei-Norman or displacement data.
    """
    sigma = sector.sigma
    g = complex(gamma_t)
    if sigma == HW:
        if not isinstance(state, HWDisplacement):
            raise DomainError("Heisenberg-Weyl sector needs an HWDisplacement")
        a = complex(state.alpha)
        dH, dK = abs(g), abs(a)
        dk_dt = 2.0 * (g * a.conjugate()).real
        lock = (g * a.conjugate()).imag
        cov = -2.0 * lock
        gap_cf = 4.0 * lock * lock
        abs_z = math.nan
    elif sigma in (SU2, SU11):
        if not isinstance(state, WNState):
            raise DomainError("su(2)/su(1,1) sector needs a WNState")
        lam = sector.lowest_weight
        A, B = complex(state.A), complex(state.B)
        a2, b2 = abs(A) ** 2, abs(B) ** 2
        lock = (g * A * B.conjugate()).real
        C = -2.0 * sigma * lam * A * B.conjugate()
        dk_dt = 2.0 * (g * C).imag
        dK = math.sqrt(max(-2.0 * sigma * lam * a2 * b2, 0.0))
        dH2 = -2.0 * sigma * lam * abs(g) ** 2 + 8.0 * lam * lock * lock
        dH = math.sqrt(max(dH2, 0.0))
        cov = 4.0 * lam * (b2 - sigma * a2) * lock
        gap_cf = cov * cov
        abs_z = abs(B) / abs(A) if A != 0 else math.inf
    else:
        raise DomainError(f"unknown sector sign {sigma}")
    bound = 2.0 * dH * dK
    gap = bound * bound - dk_dt * dk_dt
    flag = _classify(gap, bound, sigma, abs_z, tol)
    return QSLReport(float(state.t), dk_dt, bound, gap, cov, lock, flag, dH, dK, gap_cf,
                     abs_z, sigma)


@dataclass(frozen=True)
class SaturationSummary:
    labels: tuple[Saturation, ...]
    persistent: bool
    n_saturated: int
    n_accidental: int
    n_unsaturated: int
    accidental_times: tuple[float, ...]

    @property
    def classification(self) -> str:
        if self.persistent:
            return "persistently_saturated"
        if self.n_accidental:
            return "unsaturated_with_accidental_points"
        return "unsaturated"

    def to_dict(self) -> dict:
        return {"classification": self.classification, "persistent": self.persistent,
                "n_saturated": self.n_saturated, "n_accidental": self.n_accidental,
                "n_unsaturated": self.n_unsaturated,
                "accidental_times": list(self.accidental_times)}


def saturation_scan(reports: Sequence[QSLReport], tol: float = DEFAULT_SATURATION_TOL
                    ) -> SaturationSummary:
    """Label every time and decide whether saturation is persistent.

    A point is saturated when ``|gap| <= tol * bound^2`` (``0 = 0`` counts).
    Otherwise an su(2) point is accidental when ``|z|`` is within ``tol`` of 1
    or ``|z| - 1`` changes sign towards a grid neighbour (an isolated
    crossing between samples). Saturation is persistent when every point is
    saturated.
    """
    labels = [_classify(r.gap, r.bound, r.sigma, r.abs_z, tol) for r in reports]
    if reports and reports[0].sigma == SU2:
        d = np.array([r.abs_z - 1.0 for r in reports])
        cross = np.zeros(len(reports), dtype=bool)
        flips = np.sign(d[:-1]) * np.sign(d[1:]) < 0
        cross[:-1] |= flips
        cross[1:] |= flips
        for k, c in enumerate(cross):
            if c and labels[k] == Saturation.UNSATURATED:
                labels[k] = Saturation.ACCIDENTAL
    ts = tuple(r.t for r, lab in zip(reports, labels) if lab == Saturation.ACCIDENTAL)
    n_sat = sum(lab == Saturation.SATURATED for lab in labels)
    n_acc = len(ts)
    return SaturationSummary(tuple(labels), bool(labels) and n_sat == len(labels), n_sat, n_acc,
                             len(labels) - n_sat - n_acc, ts)


# --- time-independent benchmark rows ---------------------------------------

@dataclass(frozen=True)
class TIBenchmark:
    K: float
    dK: float
    b1: float
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def ti_benchmark(algebra: str, alpha: float, param: float, t: float) -> TIBenchmark:
    """Closed-form rows for ``H = alpha (L+ + L-)``.

    ``algebra`` is ``"HW"``, ``"su2"`` (``param = j``) or ``"su11"``
    (``param = kappa``); ``lhs = |dK/dt|`` and ``rhs = 2 b_1 dK``.
    """
    x = alpha * t
    if algebra == "HW":
        K, dK, b1 = x * x, abs(x), abs(alpha)
        rate = 2.0 * alpha * alpha * t
    elif algebra == "su2":
        j = param
        K = 2.0 * j * math.sin(x) ** 2
        dK = math.sqrt(j / 2.0) * abs(math.sin(2.0 * x))
        b1 = abs(alpha) * math.sqrt(2.0 * j)
        rate = 2.0 * j * alpha * math.sin(2.0 * x)
    elif algebra == "su11":
        kappa = param
        K = 2.0 * kappa * math.sinh(x) ** 2
        dK = math.sqrt(kappa / 2.0) * abs(math.sinh(2.0 * x))
        b1 = abs(alpha) * math.sqrt(2.0 * kappa)
        rate = 2.0 * kappa * alpha * math.sinh(2.0 * x)
    else:
        raise DomainError(f"algebra must be 'HW', 'su2' or 'su11', got {algebra!r}")
    return TIBenchmark(K, dK, b1, abs(rate), 2.0 * b1 * dK)
