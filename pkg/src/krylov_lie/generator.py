"""Single-exponential generators ``U = exp(-i G)`` and the fictitious-time chain.

``G = Theta0 L0 + Theta+ L+ + conj(Theta+) L-`` stays in the rank-one algebra.
In the 2x2 defining representation ``G^2 = chi^2`` with
``chi^2 = sigma |Theta+|^2 + Theta0^2 / 4``, so

    A = e^{-eta/2} = cos(chi) + i (Theta0 / 2) sin(chi)/chi
    B = z A        = -i Theta+ sin(chi)/chi

and the inversion reads ``cos(chi) = Re A`` with ``sin(chi)^2 =
(Im A)^2 + sigma |B|^2``. ``chi`` is stored as a complex number: su(1,1)
elements with ``Re A > 1`` have ``chi = i kappa``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .algebra import SU2, SU11, SectorSignature, lanczos_coefficients
from .errors import DomainError, NoRealLogarithmError, TruncationError
from .weinorman import HWDisplacement, WNState, wn_state_from_pair

SERIES_CUTOFF = 1e-6
CHAIN_CONVERGENCE = 1e-11
MAX_CHAIN_DIM = 8192
RENORMALIZE_ABOVE = 1e-8


@dataclass(frozen=True)
class GeneratorParams:
    """Parameters of ``G = Theta0 L0 + Theta+ L+ + conj(Theta+) L-``.

    ``branch_index`` is ``floor(Re chi / pi)``, kept for continuity
    bookkeeping; ``norm_defect`` records ``| |A|^2 + sigma |B|^2 - 1 |`` of the
    state that was inverted (0 for parameters built by hand).
    """

    theta0: float
    theta_plus: complex
    chi: complex
    branch_index: int = 0
    norm_defect: float = 0.0

    @classmethod
    def from_thetas(cls, theta0: float, theta_plus: complex, sigma: int) -> "GeneratorParams":
        chi = chi_from_thetas(theta0, theta_plus, sigma)
        return cls(float(theta0), complex(theta_plus), chi, _branch_index(chi))

    def chi_defect(self, sigma: int) -> float:
        """``|chi^2 - (sigma |Theta+|^2 + Theta0^2/4)|``."""
        return abs(self.chi**2 - (sigma * abs(self.theta_plus) ** 2 + self.theta0**2 / 4.0))


def chi_from_thetas(theta0: float, theta_plus: complex, sigma: int) -> complex:
    """Principal ``chi``: nonnegative real, or ``i kappa`` with ``kappa > 0``."""
    if sigma not in (SU2, SU11):
        raise DomainError("chi is defined for sigma = +-1")
    chi2 = sigma * abs(theta_plus) ** 2 + theta0**2 / 4.0
    return complex(cmath.sqrt(chi2))


def _branch_index(chi: complex) -> int:
    return int(math.floor(chi.real / math.pi)) if chi.imag == 0 else 0


def _sinc(chi: complex) -> complex:
    """``sin(chi)/chi`` with a series near 0 (even in chi)."""
    if abs(chi) < SERIES_CUTOFF:
        c2 = chi * chi
        return 1.0 - c2 / 6.0 + c2 * c2 / 120.0
    return cmath.sin(chi) / chi


def disentangle(params: GeneratorParams, sigma: int, t: float = 0.0) -> WNState:
    """Wei-Norman parameters of ``exp(-i G)``.

    At a z pole (``A == 0``) the returned state has NaN ``z``/``eta``/``w``
    and carries the projective data in ``B``; check ``state.at_pole``.
    ``eta`` uses the principal logarithm.
    """
    if sigma not in (SU2, SU11):
        raise DomainError("disentangle needs sigma = +-1")
    chi = params.chi
    sc = _sinc(chi)
    A = cmath.cos(chi) + 0.5j * params.theta0 * sc
    B = -1j * params.theta_plus * sc
    if A == 0:
        return wn_state_from_pair(t, 0.0, B)
    w = -1j * np.conj(params.theta_plus) * sc / A
    return wn_state_from_pair(t, A, B, w)


def invert(wn: WNState, sigma: int, prev: GeneratorParams | None = None) -> GeneratorParams:
    """Generator parameters of the element with Wei-Norman data ``wn``.

    Without ``prev`` the principal logarithm (smallest ``|chi|``) is
    returned. With ``prev`` the candidate among ``+-atan2(sqrt(S), Re A) +
    2 pi k`` whose ``(Theta0, Theta+)`` lies closest to ``prev`` is chosen, so
    the generator varies continuously through ``chi = pi``. Inputs whose unitarity defect exceeds 1e-8 are renormalized and the
    defect is recorded.

    Raises:
        NoRealLogarithmError: su(1,1) element with ``Re A < -1``; no generator
            with real ``Theta0`` exists.
    """
    if sigma not in (SU2, SU11):
        raise DomainError("invert needs sigma = +-1")
    A, B = complex(wn.A), complex(wn.B)
    norm = abs(A) ** 2 + sigma * abs(B) ** 2
    defect = abs(norm - 1.0)
    if defect > RENORMALIZE_ABOVE:
        if norm <= 0:
            raise DomainError("state is not a group element (|A|^2 + sigma |B|^2 <= 0)")
        scale = 1.0 / math.sqrt(norm)
        A, B = A * scale, B * scale
    if A.imag == 0 and B == 0 and A.real > 0:
        return GeneratorParams(0.0, 0j, 0j, 0, defect)

    S = A.imag**2 + sigma * abs(B) ** 2
    if S >= 0:
        root = math.atan2(math.sqrt(S), A.real)
        target = prev.chi.real if prev is not None else 0.0
        cands = []
        for base in (root, -root):
            k0 = round((target - base) / (2.0 * math.pi))
            cands += [complex(base + 2.0 * math.pi * k) for k in (k0 - 1, k0, k0 + 1)]
    else:
        if A.real < -1.0:
            raise NoRealLogarithmError(
                f"su(1,1) element with Re A = {A.real:.6g} < -1 has no real-Theta0 logarithm")
        kappa = math.asinh(math.sqrt(-S))
        cands = [complex(0.0, kappa), complex(0.0, -kappa)]

    best = None
    for chi in cands:
        sinc = _sinc(chi)
        if sinc == 0:
            continue
        theta0 = 2.0 * (A.imag / sinc).real
        theta_plus = complex(1j * B / sinc)
        if prev is None:
            # principal branch: smallest |chi|
            key = (abs(chi), 0.0)
        else:
            # the generator, not chi alone, is continued: chi and 2 pi - chi
            # describe the same element with Theta+ of opposite sign
            key = (abs(theta0 - prev.theta0) + abs(theta_plus - prev.theta_plus),
                   abs(chi - prev.chi))
        if best is None or key < best[0]:
            best = (key, chi, theta0, theta_plus)
    if best is None:
        raise DomainError("generator undetermined: element sits on a branch point")
    _, chi, theta0, theta_plus = best
    return GeneratorParams(theta0, theta_plus, chi, _branch_index(chi), defect)


def invert_series(states: Sequence[WNState], sigma: int, strict: bool = True
                  ) -> list[GeneratorParams | None]:
    """Invert a trajectory in time order, carrying branch continuity.

    With ``strict=False`` the first state without a logarithm and every later
    one map to ``None``: once the trajectory has left the image of the
    exponential map, continuity of ``chi`` cannot be re-established.
    """
    out: list[GeneratorParams | None] = []
    prev = None
    for s in states:
        if out and out[-1] is None:
            out.append(None)
            continue
        try:
            p = invert(s, sigma, prev)
        except NoRealLogarithmError:
            if strict:
                raise
            out.append(None)
            continue
        out.append(p)
        prev = p
    return out


# --- fictitious-time chain -------------------------------------------------

@dataclass(frozen=True)
class FictitiousChain:
    """Constant-coefficient tridiagonal chain ``i d psi/ds = G psi``.

    ``diag[n] = a_n``, ``offdiag[n-1] = b~_n`` (coupling ``n-1 -> n``), and
    ``psi[k]`` is the amplitude vector at ``s[k]``.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    s: np.ndarray
    psi: np.ndarray

    @property
    def dim(self) -> int:
        return self.diag.size

    def at(self, s: float) -> np.ndarray:
        k = int(np.argmin(np.abs(self.s - s)))
        if abs(self.s[k] - s) > 1e-15:
            raise KeyError(f"s = {s} not sampled")
        return self.psi[k]

    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.psi) ** 2, axis=1)


def chain_coefficients(sector: SectorSignature, params: GeneratorParams
                       ) -> tuple[np.ndarray, np.ndarray]:
    """``a_n = Theta0 (lambda + n)`` and ``b~_n = Theta+ b_n``."""
    n = np.arange(sector.dim, dtype=float)
    b = lanczos_coefficients(sector, sector.dim - 1)
    return params.theta0 * (sector.lowest_weight + n), params.theta_plus * b


def hw_chain_coefficients(disp: HWDisplacement, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Heisenberg-Weyl generator ``G = -Phi + alpha a^dag + conj(alpha) a``."""
    return np.full(dim, -disp.phi), disp.alpha * np.sqrt(np.arange(1, dim, dtype=float))


def _check_s_grid(s_grid) -> np.ndarray:
    s = np.atleast_1d(np.asarray(s_grid, dtype=float))
    if np.any(s < 0) or np.any(s > 1) or np.any(np.diff(s) < 0):
        raise DomainError("s_grid must be ascending within [0, 1]")
    return s


def _real_gauge(diag, offdiag):
    """Eigensystem of the rephased real chain plus the phases ``theta_n``.

    ``G = D T D^dag`` with ``D = diag(e^{i theta_n})``,
    ``theta_n = sum_{m<=n} arg b~_m`` and ``T`` real symmetric tridiagonal.
    """
    theta = np.concatenate([[0.0], np.cumsum(np.angle(offdiag))])
    energies, vecs = eigh_tridiagonal(np.asarray(diag, dtype=float), np.abs(offdiag))
    return energies, vecs, theta


def evolve_chain(diag: np.ndarray, offdiag: np.ndarray, s_grid) -> FictitiousChain:
    """Exact evolution from ``e_0`` by eigendecomposition in the real gauge."""
    s = _check_s_grid(s_grid)
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=complex)
    dim = diag.size
    psi = np.zeros((s.size, dim), dtype=complex)
    if dim == 1 or not np.any(offdiag):
        psi[:, 0] = np.exp(-1j * s * diag[0])
        return FictitiousChain(diag, offdiag, s, psi)
    energies, vecs, theta = _real_gauge(diag, offdiag)
    real_gauge = (vecs * vecs[0, :]) @ np.exp(-1j * np.outer(energies, s))
    psi[:] = (np.exp(1j * theta)[:, None] * real_gauge).T
    return FictitiousChain(diag, offdiag, s, psi)


def unitary_corner(diag, offdiag, size: int) -> np.ndarray:
    """Leading ``size x size`` corner of ``exp(-i G)`` for a tridiagonal ``G``."""
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=complex)
    if diag.size == 1 or not np.any(offdiag):
        return np.diag(np.exp(-1j * diag[:size]))
    energies, vecs, theta = _real_gauge(diag, offdiag)
    top = vecs[:size] * np.exp(1j * theta[:size])[:, None]
    return (top * np.exp(-1j * energies)) @ top.conj().T


def _converged_chain(coefficients, dim: int, s_grid, tol: float | None) -> FictitiousChain:
    """Solve on doubled chain lengths until the first ``dim`` amplitudes settle.

    ``coefficients(d)`` returns ``(diag, offdiag)`` for a chain of length ``d``.
    """
    tol = CHAIN_CONVERGENCE if tol is None else tol
    diag, off = coefficients(dim)
    chain = evolve_chain(diag, off, s_grid)
    ext = dim
    while ext < MAX_CHAIN_DIM:
        ext *= 2
        longer = evolve_chain(*coefficients(ext), s_grid)
        change = np.max(np.abs(longer.psi[:, :dim] - chain.psi))
        chain = FictitiousChain(diag, off, longer.s, longer.psi[:, :dim])
        if change < tol:
            return chain
    raise TruncationError(f"fictitious-time chain not converged at length {MAX_CHAIN_DIM}")


def chain_evolve(sector: SectorSignature, params: GeneratorParams, s_grid,
                 tol: float | None = None) -> FictitiousChain:
    """Fictitious-time chain of ``params`` sampled on ``s_grid``.

    The chain has constant coefficients, so it is solved exactly by a
    tridiagonal eigendecomposition. For truncated (su(1,1)) sectors the
    chain is solved on successively doubled lengths until the first
    ``sector.dim`` amplitudes change by less than ``tol`` (default 1e-11):
    the truncated spectrum of a large generator otherwise reflects amplitude
    back from the cut even when the physical tail is negligible. The
    returned chain is cut back to ``sector.dim``.
    """
    if sector.sigma not in (SU2, SU11):
        raise DomainError("chain_evolve needs sigma = +-1; use hw_chain_evolve for Heisenberg-Weyl")
    if not sector.is_truncated or params.theta_plus == 0:
        return evolve_chain(*chain_coefficients(sector, params), s_grid)
    return _converged_chain(lambda d: chain_coefficients(sector.with_dim(d), params),
                            sector.dim, s_grid, tol)


def hw_chain_evolve(disp: HWDisplacement, dim: int, s_grid, tol: float | None = None
                    ) -> FictitiousChain:
    """Heisenberg-Weyl counterpart of :func:`chain_evolve` (same length doubling)."""
    if disp.alpha == 0:
        return evolve_chain(*hw_chain_coefficients(disp, dim), s_grid)
    return _converged_chain(lambda d: hw_chain_coefficients(disp, d), dim, s_grid, tol)


def rephase_gauge(chain: FictitiousChain) -> FictitiousChain:
    """Apply ``psi_n -> e^{-i n arg Theta+} psi_n``; couplings become ``|b~_n|``.

    The phase of ``Theta+`` is read from the first coupling (``b_1 > 0``).
    """
    if chain.offdiag.size == 0 or chain.offdiag[0] == 0:
        raise DomainError("rephase_gauge needs a chain with Theta+ != 0")
    phase = np.angle(chain.offdiag[0])
    n = np.arange(chain.dim)
    psi = chain.psi * np.exp(-1j * n * phase)[None, :]
    return replace(chain, offdiag=np.abs(chain.offdiag).astype(complex), psi=psi)


def generator_matrix(sector: SectorSignature, params: GeneratorParams) -> np.ndarray:
    """Dense ``G`` in the lowest-weight basis of ``sector`` (truncated if needed)."""
    diag, off = chain_coefficients(sector, params)
    return tridiagonal_matrix(diag, off)


def tridiagonal_matrix(diag, offdiag) -> np.ndarray:
    diag = np.asarray(diag)
    g = np.diag(diag.astype(complex))
    idx = np.arange(1, diag.size)
    g[idx, idx - 1] = offdiag
    g[idx - 1, idx] = np.conj(offdiag)
    return g
