"""Krylov wavefunctions, occupation probabilities and spread complexity.

Amplitudes follow the ordering ``U = e^{z L+} e^{eta L0} e^{w L-}`` acting on
the lowest-weight state, so ``phi_n = e^{lambda eta} z^n c_n`` with
``c_n = (prod_{m<=n} b_m) / n!``. Global phases are kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .algebra import HW, SU2, SU11, RootData, SectorSignature, coupling_function, \
    lanczos_coefficients, validate_commuting_sectors
from .drives import DriveEnvelope
from .errors import DomainError, TruncationError
from .weinorman import DEFAULT_TOL, HWDisplacement, WNState, hw_displacement, integrate_wn

TAIL_TOL = 1e-10
MAX_JOINT_SECTORS = 3


@dataclass(frozen=True)
class KrylovWavefunction:
    """Krylov-chain state at time ``t``.

    ``complexity`` and ``complexity_std`` hold the closed-form values; the
    moment sums of ``probabilities`` reproduce them (see :meth:`moments`).
    """

    sector: SectorSignature
    t: float
    amplitudes: np.ndarray
    probabilities: np.ndarray
    complexity: float
    complexity_std: float

    def moments(self) -> tuple[float, float]:
        """``(sum n P_n, sum n^2 P_n - K^2)`` from the probabilities."""
        n = np.arange(self.probabilities.size)
        k = float(n @ self.probabilities)
        return k, float((n * n) @ self.probabilities - k * k)

    @property
    def norm(self) -> float:
        return float(np.sum(self.probabilities))

    @property
    def tail(self) -> float:
        return float(self.probabilities[-1])


def _log_c(sector: SectorSignature, dim: int) -> np.ndarray:
    """``log c_n`` for ``n < dim`` via ``sum log b_m - log n!``."""
    n = np.arange(dim, dtype=float)
    if sector.sigma == SU2:
        two_j = sector.dim - 1
        return 0.5 * (gammaln(two_j + 1) - gammaln(n + 1) - gammaln(two_j - n + 1))
    b = lanczos_coefficients(sector, dim - 1)
    return np.concatenate([[0.0], np.cumsum(np.log(b))]) - gammaln(n + 1)


def _assemble(log_mag: np.ndarray, phase: np.ndarray) -> np.ndarray:
    return np.exp(log_mag) * np.exp(1j * phase)


def _check_tail(sector: SectorSignature, probs: np.ndarray, t: float) -> None:
    if sector.is_truncated and probs[-1] > TAIL_TOL:
        raise TruncationError(
            f"truncation tail P_{sector.dim - 1}(t={t:g}) = {probs[-1]:.3e} exceeds "
            f"{TAIL_TOL:g}; increase dim (currently {sector.dim})")


def wavefunction_from_wn(sector: SectorSignature, wn: WNState, check_tail: bool = True
                         ) -> KrylovWavefunction:
    """Krylov wavefunction of a rank-one sector from its Wei-Norman data.

    su(2): ``phi_n = c_n A^{2j-n} B^n`` (pole-safe form of ``e^{-j eta} z^n c_n``).
    su(1,1): ``phi_n = e^{kappa eta} z^n c_n``.

    Raises:
        TruncationError: su(1,1) tail ``P_{dim-1} > 1e-10``.
    """
    sigma = sector.sigma
    if sigma not in (SU2, SU11):
        raise DomainError("wavefunction_from_wn needs sigma = +-1; use hw_wavefunction")
    dim = sector.dim
    n = np.arange(dim, dtype=float)
    log_c = _log_c(sector, dim)
    A, B = complex(wn.A), complex(wn.B)
    if sigma == SU2:
        two_j = dim - 1
        amps = np.exp(log_c) * np.array([A ** (two_j - k) * B**k for k in range(dim)])
    else:
        if abs(B) >= abs(A):
            raise DomainError("su(1,1) state needs |z| < 1")
        kappa = sector.lowest_weight
        eta, z = complex(wn.eta), complex(wn.z)
        if z == 0:
            amps = np.zeros(dim, dtype=complex)
            amps[0] = np.exp(kappa * eta)
        else:
            log_mag = kappa * eta.real + n * math.log(abs(z)) + log_c
            phase = kappa * eta.imag + n * math.atan2(z.imag, z.real)
            amps = _assemble(log_mag, phase)
    probs = np.abs(amps) ** 2
    if check_tail:
        _check_tail(sector, probs, wn.t)
    # z-forms -2 sigma lambda |z|^2 / (1 + sigma |z|^2)^{1,2}, multiplied
    # through by |A|^2 so they stay finite at su(2) poles
    lam = sector.lowest_weight
    a2, b2 = abs(A) ** 2, abs(B) ** 2
    norm = a2 + sigma * b2
    k = -2.0 * sigma * lam * b2 / norm
    var = -2.0 * sigma * lam * a2 * b2 / (norm * norm)
    return KrylovWavefunction(sector, wn.t, amps, probs, k, math.sqrt(max(var, 0.0)))


def hw_wavefunction(disp: HWDisplacement, dim: int, check_tail: bool = True
                    ) -> KrylovWavefunction:
    """Poisson chain ``phi_n = e^{i Phi - |alpha|^2/2} (-i alpha)^n / sqrt(n!)``.

    Raises:
        TruncationError: tail ``P_{dim-1} > 1e-10``.
    """
    sector = SectorSignature.heisenberg_weyl(dim)
    n = np.arange(dim, dtype=float)
    a = complex(disp.alpha)
    if a == 0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = np.exp(1j * disp.phi)
    else:
        log_mag = -0.5 * abs(a) ** 2 + n * math.log(abs(a)) - 0.5 * gammaln(n + 1)
        phase = disp.phi + n * (math.atan2(a.imag, a.real) - 0.5 * math.pi)
        amps = _assemble(log_mag, phase)
    probs = np.abs(amps) ** 2
    if check_tail:
        _check_tail(sector, probs, disp.t)
    return KrylovWavefunction(sector, disp.t, amps, probs, abs(a) ** 2, abs(a))


def ladder_expectation(wf: KrylovWavefunction) -> complex:
    """``<L+> = sum_n conj(phi_{n+1}) b_{n+1} phi_n`` from the amplitude series."""
    phi = wf.amplitudes
    b = lanczos_coefficients(wf.sector, phi.size - 1)
    return complex(np.sum(np.conj(phi[1:]) * b * phi[:-1]))


def _gamma_of(drive, cartan_row) -> Callable:
    if isinstance(drive, DriveEnvelope):
        return coupling_function(drive, cartan_row)
    if callable(drive):
        return drive
    raise DomainError("drive must be a DriveEnvelope or a callable gamma(t)")


def complexity_series(sector: SectorSignature, drive: DriveEnvelope | Callable,
                      grid: Sequence[float], tol: float = DEFAULT_TOL,
                      cartan_row: Sequence[float] = ()) -> list[KrylovWavefunction]:
    """Wavefunctions on ``grid`` for one sector.

    ``drive`` is a :class:`DriveEnvelope` dressed by ``cartan_row`` or a bare
    interaction-picture coupling ``gamma(t)``. The truncation tail is checked
    at every grid time.
    """
    gamma = _gamma_of(drive, cartan_row)
    if sector.sigma == HW:
        return [hw_wavefunction(d, sector.dim) for d in hw_displacement(gamma, grid, tol)]
    return [wavefunction_from_wn(sector, s) for s in integrate_wn(sector, gamma, grid, tol)]


# --- commuting multi-sector products ---------------------------------------

@dataclass(frozen=True)
class MultiSectorWavefunction:
    """Product state over mutually commuting sectors at one time."""

    sectors: tuple[SectorSignature, ...]
    per_sector: tuple[KrylovWavefunction, ...]

    @property
    def t(self) -> float:
        return self.per_sector[0].t

    @property
    def complexity_total(self) -> float:
        return float(sum(w.complexity for w in self.per_sector))

    def _check_joint(self) -> None:
        if len(self.per_sector) > MAX_JOINT_SECTORS:
            raise DomainError(
                f"joint arrays are only materialized for <= {MAX_JOINT_SECTORS} sectors")

    def joint_amplitude(self, indices: Sequence[int]) -> complex:
        """``prod_k phi^(k)_{n_k}`` for one multi-index."""
        if len(indices) != len(self.per_sector):
            raise DomainError("one index per sector is required")
        return complex(np.prod([w.amplitudes[n] for w, n in zip(self.per_sector, indices)]))

    def joint_amplitudes(self) -> np.ndarray:
        self._check_joint()
        out = self.per_sector[0].amplitudes
        for w in self.per_sector[1:]:
            out = np.multiply.outer(out, w.amplitudes)
        return out

    def joint_probabilities(self) -> np.ndarray:
        self._check_joint()
        out = self.per_sector[0].probabilities
        for w in self.per_sector[1:]:
            out = np.multiply.outer(out, w.probabilities)
        return out


def multi_sector(sectors: Sequence[SectorSignature], drives: Sequence[DriveEnvelope | Callable],
                 grid: Sequence[float], tol: float = DEFAULT_TOL,
                 cartan_rows: Sequence[Sequence[float]] | None = None,
                 roots: RootData | None = None) -> list[MultiSectorWavefunction]:
    """Evolve commuting sectors independently and combine them per grid time.

    Args:
        sectors: one signature per sector.
        drives: matching drives (or bare couplings).
        cartan_rows: Cartan-matrix row per sector; taken from ``roots`` when
            omitted and ``roots`` is given.
        roots: if given, the sectors are validated to commute.

    Errors raised by a sector are re-raised with the sector index prepended.
    """
    if len(sectors) != len(drives) or not sectors:
        raise DomainError("need one drive per sector and at least one sector")
    if roots is not None:
        check = validate_commuting_sectors(roots)
        if not check:
            raise DomainError(check.diagnostic)
        if len(roots.selected_roots) != len(sectors):
            raise DomainError("roots.selected_roots must match the sectors")
        if cartan_rows is None:
            cartan_rows = [roots.cartan_row(r) for r in roots.selected_roots]
    if cartan_rows is None:
        cartan_rows = [()] * len(sectors)
    series = []
    for k, (sec, drv, row) in enumerate(zip(sectors, drives, cartan_rows)):
        try:
            series.append(complexity_series(sec, drv, grid, tol, row))
        except Exception as exc:  # tag and re-raise with the original type
            raise type(exc)(f"sector {k}: {exc}") from exc
    return [MultiSectorWavefunction(tuple(sectors), tuple(ws)) for ws in zip(*series)]
