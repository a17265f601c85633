"""Run a scenario end to end and collect its verification checks.

Pipeline per sector: coupling -> Wei-Norman (or displacement) -> Krylov
wavefunctions -> speed-limit reports -> generator inversion -> oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .algebra import HW, coupling_function
from .generator import chain_evolve, disentangle, hw_chain_evolve, invert_series
from .krylov import TAIL_TOL, KrylovWavefunction, hw_wavefunction, wavefunction_from_wn
from .qsl import QSLReport, SaturationSummary, qsl_point, saturation_scan
from .reference import build_rep, direct_evolve, operator_identity_defect
from .scenarios import Scenario, SectorSpec
from .weinorman import hw_displacement, integrate_wn, unitarity_defect

#: Check tolerances.
NORM_TOL = 1e-9
UNITARITY_TOL = 1e-9
MOMENT_TOL = 1e-10
POISSON_TOL = 1e-12
GAP_IDENTITY_TOL = 1e-8
GAP_NEGATIVE_TOL = 1e-9
CHAIN_TOL = 1e-8
OPERATOR_TOL = 1e-9
ROUNDTRIP_TOL = 1e-10
ORACLE_TOL = 1e-6
FREEZE_TOL = 1e-10
N_SAMPLES = 20
OPERATOR_BLOCK = 24
Z_CHART = 10.0
THETA_CAP = 10.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"value": _json_float(self.value), "tol": self.tol, "passed": self.passed,
                **({"detail": self.detail} if self.detail else {})}


def _json_float(x: float):
    return None if x is None or not math.isfinite(x) else float(x)


def _check(name: str, value: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(name, float(value), tol, bool(value <= tol), detail)


@dataclass
class SectorResult:
    spec: SectorSpec
    grid: np.ndarray
    states: list
    wavefunctions: list[KrylovWavefunction]
    reports: list[QSLReport]
    saturation: SaturationSummary
    generator: list
    oracle_deviation: float | None = None
    tail_max: float = 0.0


@dataclass
class ScenarioResult:
    scenario: Scenario
    sectors: list[SectorResult]
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    @property
    def complexity_total(self) -> np.ndarray:
        return np.sum([[w.complexity for w in s.wavefunctions] for s in self.sectors], axis=0)

    @property
    def oracle_deviation(self) -> float | None:
        devs = [s.oracle_deviation for s in self.sectors if s.oracle_deviation is not None]
        return max(devs) if devs else None

    def summary(self) -> dict[str, Any]:
        k = self.complexity_total
        return {
            "name": self.scenario.name,
            "passed": self.passed,
            "failed_checks": [c.name for c in self.failed],
            "checks": {c.name: c.to_dict() for c in self.checks},
            "saturation": {s.spec.label: s.saturation.to_dict() for s in self.sectors},
            "oracle_max_deviation": _json_float(self.oracle_deviation),
            "truncation_tail_max": max(s.tail_max for s in self.sectors),
            "K_final": float(k[-1]),
        }


def sample_indices(n_valid: int, n_samples: int = N_SAMPLES) -> np.ndarray:
    """Evenly spread indices into a prefix of length ``n_valid`` (t = 0 excluded)."""
    if n_valid <= 1:
        return np.array([], dtype=int)
    return np.unique(np.linspace(1, n_valid - 1, min(n_samples, n_valid - 1)).round().astype(int))


def _spread(candidates: list[int], n_samples: int = N_SAMPLES) -> list[int]:
    """Up to ``n_samples`` evenly spaced entries of ``candidates``."""
    if len(candidates) <= n_samples:
        return list(candidates)
    pick = np.linspace(0, len(candidates) - 1, n_samples).round().astype(int)
    return [candidates[i] for i in pick]


def _valid_prefix(params: list) -> int:
    for k, p in enumerate(params):
        if p is None:
            return k
    return len(params)


def run_sector(spec: SectorSpec, grid: np.ndarray, tol: float, oracle: bool,
               steps_per_unit: float, outputs: frozenset[str]) -> tuple[SectorResult, list[CheckResult]]:
    sector = spec.sector
    label = spec.label
    gamma = coupling_function(spec.drive, spec.cartan_row)
    checks: list[CheckResult] = []
    if sector.sigma == HW:
        states = hw_displacement(gamma, grid, tol)
        wfs = [hw_wavefunction(d, sector.dim) for d in states]
        generator: list = list(states)
    else:
        states = integrate_wn(sector, gamma, grid, tol)
        wfs = [wavefunction_from_wn(sector, s) for s in states]
        generator = invert_series(states, sector.sigma, strict=False) \
            if "generator" in outputs else []
        checks.append(_check(f"{label}.unitarity",
                             max(unitarity_defect(s, sector.sigma) for s in states), UNITARITY_TOL))
    reports = [qsl_point(sector, gamma(float(t)), s, w) for t, s, w in zip(grid, states, wfs)]
    saturation = saturation_scan(reports)
    tail = max(w.tail for w in wfs) if sector.is_truncated else 0.0

    checks.append(_check(f"{label}.normalization", max(abs(w.norm - 1.0) for w in wfs), NORM_TOL))
    if sector.is_truncated:
        checks.append(_check(f"{label}.truncation_tail", tail, TAIL_TOL))
    moment_dev = 0.0
    poisson_dev = 0.0
    for w in wfs:
        k, var = w.moments()
        moment_dev = max(moment_dev, abs(k - w.complexity), abs(var - w.complexity_std ** 2))
        poisson_dev = max(poisson_dev, abs(k - var))
    checks.append(_check(f"{label}.complexity_closed_form", moment_dev, MOMENT_TOL))
    if sector.sigma == HW:
        checks.append(_check(f"{label}.poisson_mean_variance", poisson_dev, POISSON_TOL))
    if "qsl" in outputs:
        checks.append(_check(f"{label}.gap_identity",
                             max(abs(r.gap - r.gap_closed_form) for r in reports), GAP_IDENTITY_TOL))
        checks.append(_check(f"{label}.gap_nonnegative",
                             max(max(-r.gap for r in reports), 0.0), GAP_NEGATIVE_TOL))

    if "generator" in outputs:
        checks.extend(_generator_checks(spec, states, wfs, generator))

    oracle_dev = None
    if oracle and "oracle_check" in outputs:
        oracle_dev = _oracle_deviation(spec, gamma, grid, wfs, steps_per_unit)
        checks.append(_check(f"{label}.oracle_probabilities", oracle_dev, ORACLE_TOL,
                             f"midpoint exponential, dt = {1.0 / steps_per_unit:g}"))
    res = SectorResult(spec, grid, states, wfs, reports, saturation, generator, oracle_dev, tail)
    return res, checks


def _generator_checks(spec: SectorSpec, states, wfs, generator) -> list[CheckResult]:
    sector = spec.sector
    label = spec.label
    checks = []
    if sector.sigma == HW:
        idx = sample_indices(len(states))
        chain_dev = max((np.max(np.abs(hw_chain_evolve(states[k], sector.dim, [1.0]).psi[0]
                                       - wfs[k].amplitudes)) for k in idx), default=0.0)
        checks.append(_check(f"{label}.fictitious_chain", chain_dev, CHAIN_TOL,
                             f"{idx.size} sampled times"))
        return checks
    n_valid = _valid_prefix(generator)
    detail = f"logarithm exists on the first {n_valid} of {len(states)} grid points"
    round_trip = 0.0
    for s, p in zip(states[:n_valid], generator[:n_valid]):
        back = disentangle(p, sector.sigma, s.t)
        round_trip = max(round_trip, abs(back.A - s.A), abs(back.B - s.B))
    checks.append(_check(f"{label}.generator_roundtrip", round_trip, ROUNDTRIP_TOL, detail))
    eligible = list(range(1, n_valid))
    if sector.is_truncated:
        # near the edge of the exponential image |Theta| diverges and any
        # truncated exp(-iG) needs unbounded chain length
        eligible = [k for k in eligible
                    if abs(generator[k].theta0) + abs(generator[k].theta_plus) <= THETA_CAP]
    idx = _spread(eligible)
    # the ordered product cancels catastrophically near su(2) poles, so the
    # operator identity is tested inside the chart |z| <= Z_CHART only
    chart = _spread([k for k in eligible if abs(states[k].z) <= Z_CHART])
    chain_dev = 0.0
    op_dev = 0.0
    for k in idx:
        psi = chain_evolve(sector, generator[k], [1.0]).psi[0]
        chain_dev = max(chain_dev, float(np.max(np.abs(psi - wfs[k].amplitudes))))
    for k in chart:
        op_dev = max(op_dev, operator_identity_defect(sector, generator[k], states[k],
                                                      block=OPERATOR_BLOCK))
    checks.append(_check(f"{label}.fictitious_chain", chain_dev, CHAIN_TOL,
                         f"{len(idx)} sampled times; " + detail))
    checks.append(_check(f"{label}.operator_identity", op_dev, OPERATOR_TOL,
                         f"{len(chart)} sampled times with |z| <= {Z_CHART:g}; " + detail))
    return checks


def _oracle_deviation(spec: SectorSpec, gamma, grid, wfs, steps_per_unit: float) -> float:
    """Max ``|P_n(oracle) - P_n(closed form)|`` over the grid.

    Truncated sectors run the oracle on twice the chain length and compare
    the leading ``dim`` levels.
    """
    sector = spec.sector
    dim = sector.dim
    rep = build_rep(sector, 2 * dim if sector.is_truncated else None)
    psi = direct_evolve(rep, gamma, grid, steps_per_unit)
    probs = np.abs(psi[:, :dim]) ** 2
    closed = np.array([w.probabilities for w in wfs])
    return float(np.max(np.abs(probs - closed)))


def run_scenario(scn: Scenario, oracle: bool = True, tol: float | None = None) -> ScenarioResult:
    """Execute ``scn``; ``tol`` overrides the scenario's integration tolerance."""
    grid = scn.grid
    tol = scn.tol if tol is None else tol
    sector_results = []
    checks: list[CheckResult] = []
    for spec in scn.sectors:
        res, c = run_sector(spec, grid, tol, oracle, scn.oracle_steps_per_unit, scn.outputs)
        sector_results.append(res)
        checks.extend(c)
    result = ScenarioResult(scn, sector_results, checks)
    k_total = result.complexity_total
    if scn.is_multi:
        moment_total = np.sum([[w.moments()[0] for w in s.wavefunctions] for s in sector_results],
                              axis=0)
        checks.append(_check("additivity", float(np.max(np.abs(k_total - moment_total))),
                             MOMENT_TOL))
    if "K_final" in scn.expected:
        tol_k = scn.expected.get("K_final_tol", 1e-6)
        checks.append(_check("K_final", abs(k_total[-1] - scn.expected["K_final"]), tol_k,
                             f"expected {scn.expected['K_final']:.12g}, got {k_total[-1]:.12g}"))
    if "freeze_after" in scn.expected:
        after = grid >= scn.expected["freeze_after"]
        if np.any(after):
            frozen = k_total[after]
            checks.append(_check("K_frozen", float(np.max(np.abs(frozen - frozen[0]))), FREEZE_TOL))
    return result
