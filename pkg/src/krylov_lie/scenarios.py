"""Scenario descriptions: JSON configs and the six built-in examples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from .algebra import CARTAN_A3, CARTAN_B3, RootData, SectorSignature, validate_commuting_sectors, \
    virasoro_weight
from .drives import Constant, DraggedCosine, DriveEnvelope, PiecewiseConstantQuench, \
    RotatingField, SechPulse, envelope_from_dict
from .errors import ConfigError, DomainError

DEFAULT_POINTS = 2001
OUTPUTS = frozenset({"wavefunction", "probabilities", "complexity", "qsl", "generator",
                     "oracle_check"})


@dataclass(frozen=True)
class SectorSpec:
    """One rank-one sector with its drive and Cartan-matrix row."""

    sector: SectorSignature
    drive: DriveEnvelope
    cartan_row: tuple[float, ...] = ()
    label: str = ""


@dataclass(frozen=True)
class Scenario:
    """A runnable configuration.

    ``expected`` may hold ``K_final`` (with ``K_final_tol``) and
    ``freeze_after`` (K must stay constant to 1e-10 after that time).
    """

    name: str
    sectors: tuple[SectorSpec, ...]
    t_end: float
    n_points: int = DEFAULT_POINTS
    tol: float = 1e-10
    roots: RootData | None = None
    oracle_steps_per_unit: float = 1000.0
    expected: Mapping[str, float] = field(default_factory=dict)
    outputs: frozenset[str] = OUTPUTS
    description: str = ""
    section: str = ""

    def __post_init__(self):
        if not self.name or any(c in self.name for c in "/\\"):
            raise ConfigError(f"invalid scenario name {self.name!r}")
        if not self.sectors:
            raise ConfigError("scenario needs at least one sector")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigError("grid t_end must be positive")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ConfigError("grid n_points must be an integer >= 2")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if not self.oracle_steps_per_unit > 0:
            raise ConfigError("oracle steps_per_unit must be positive")
        unknown = set(self.outputs) - OUTPUTS
        if unknown:
            raise ConfigError(f"unknown outputs {sorted(unknown)}")
        for spec in self.sectors:
            if len(spec.cartan_row) != len(spec.drive.cartan_drives):
                raise ConfigError(
                    f"sector {spec.label or '?'}: cartan_row has {len(spec.cartan_row)} entries "
                    f"for {len(spec.drive.cartan_drives)} Cartan drives")
        if self.roots is not None:
            check = validate_commuting_sectors(self.roots)
            if not check:
                raise ConfigError(check.diagnostic)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, int(self.n_points))

    @property
    def is_multi(self) -> bool:
        return len(self.sectors) > 1

    def to_config(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"name": self.name}
        if self.description:
            doc["description"] = self.description
        if self.roots is not None:
            doc["cartan_matrix"] = [list(r) for r in self.roots.cartan_matrix]
            doc["roots"] = list(self.roots.selected_roots)
        shared = self.sectors[0].drive.cartan_drives
        if self.is_multi:
            doc["cartan_drives"] = [g.to_dict() for g in shared]
            doc["sectors"] = [{"sector": s.sector.to_dict(), "drive": s.drive.coupling.to_dict(),
                               **({} if self.roots else {"cartan_row": list(s.cartan_row)})}
                              for s in self.sectors]
        else:
            s = self.sectors[0]
            doc["sector"] = s.sector.to_dict()
            doc["drive"] = s.drive.coupling.to_dict()
            doc["cartan_drives"] = [g.to_dict() for g in shared]
            if self.roots is None:
                doc["cartan_row"] = list(s.cartan_row)
        doc["grid"] = {"t_end": self.t_end, "n_points": int(self.n_points)}
        doc["tol"] = self.tol
        doc["oracle"] = {"steps_per_unit": self.oracle_steps_per_unit}
        if self.expected:
            doc["expected"] = dict(self.expected)
        if self.outputs != OUTPUTS:
            doc["outputs"] = sorted(self.outputs)
        return doc


# --- config parsing ----------------------------------------------------------

_TOP_KEYS = {"name", "description", "sector", "drive", "cartan_drives", "cartan_row",
             "cartan_matrix", "roots", "sectors", "grid", "tol", "oracle", "expected", "outputs"}
_SECTOR_ENTRY_KEYS = {"sector", "drive", "cartan_row"}
_EXPECTED_KEYS = {"K_final", "K_final_tol", "freeze_after"}


def _reject_unknown(doc: Mapping, allowed: set[str], where: str) -> None:
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{where} must be an object")
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _number(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where} must be a number, got {v!r}")
    return float(v)


def sector_from_dict(doc: Mapping[str, Any]) -> SectorSignature:
    _reject_unknown(doc, {"sigma", "lowest_weight", "dim"}, "sector")
    if "sigma" not in doc:
        raise ConfigError("sector.sigma is required")
    sigma = doc["sigma"]
    if isinstance(sigma, bool) or not isinstance(sigma, int):
        raise ConfigError(f"sector.sigma must be an integer, got {sigma!r}")
    dim = doc.get("dim")
    if dim is not None and (isinstance(dim, bool) or not isinstance(dim, int)):
        raise ConfigError(f"sector.dim must be an integer, got {dim!r}")
    try:
        return SectorSignature(sigma, _number(doc.get("lowest_weight", 0.0), "lowest_weight"), dim)
    except DomainError as exc:
        raise ConfigError(f"invalid sector: {exc}") from exc


def _row(v: Any, where: str) -> tuple[float, ...]:
    if not isinstance(v, list):
        raise ConfigError(f"{where} must be a list")
    return tuple(_number(x, where) for x in v)


def scenario_from_config(doc: Mapping[str, Any]) -> Scenario:
    """Parse a JSON scenario document; every unknown key is an error."""
    _reject_unknown(doc, _TOP_KEYS, "scenario")
    name = doc.get("name")
    if not isinstance(name, str):
        raise ConfigError("scenario.name must be a string")
    try:
        cartan = tuple(envelope_from_dict(g) for g in doc.get("cartan_drives", []))
        roots = None
        if "cartan_matrix" in doc or "roots" in doc:
            if "cartan_matrix" not in doc or "roots" not in doc:
                raise ConfigError("cartan_matrix and roots must be given together")
            roots = RootData(tuple(tuple(r) for r in doc["cartan_matrix"]), tuple(doc["roots"]))
        if "sectors" in doc:
            if "sector" in doc or "drive" in doc or "cartan_row" in doc:
                raise ConfigError("use either 'sectors' or 'sector'/'drive', not both")
            entries = doc["sectors"]
            if not isinstance(entries, list) or not entries:
                raise ConfigError("sectors must be a nonempty list")
        else:
            if "sector" not in doc or "drive" not in doc:
                raise ConfigError("scenario needs 'sector' and 'drive' (or 'sectors')")
            entries = [{k: doc[k] for k in ("sector", "drive", "cartan_row") if k in doc}]
        if roots is not None and len(roots.selected_roots) != len(entries):
            raise ConfigError("roots must list one simple root per sector")
        specs = []
        for k, entry in enumerate(entries):
            _reject_unknown(entry, _SECTOR_ENTRY_KEYS, f"sectors[{k}]")
            if "sector" not in entry or "drive" not in entry:
                raise ConfigError(f"sectors[{k}] needs 'sector' and 'drive'")
            if roots is not None:
                if "cartan_row" in entry:
                    raise ConfigError("cartan_row is implied by cartan_matrix/roots")
                root = roots.selected_roots[k]
                row = tuple(float(x) for x in roots.cartan_row(root))
                label = f"alpha{root}"
            else:
                row = _row(entry.get("cartan_row", []), "cartan_row")
                label = f"sector{k}"
            drive = DriveEnvelope(envelope_from_dict(entry["drive"]), cartan)
            specs.append(SectorSpec(sector_from_dict(entry["sector"]), drive, row, label))
        grid = doc.get("grid", {})
        _reject_unknown(grid, {"t_end", "n_points"}, "grid")
        if "t_end" not in grid:
            raise ConfigError("grid.t_end is required")
        n_points = grid.get("n_points", DEFAULT_POINTS)
        if isinstance(n_points, bool) or not isinstance(n_points, int):
            raise ConfigError("grid.n_points must be an integer")
        oracle = doc.get("oracle", {})
        _reject_unknown(oracle, {"steps_per_unit"}, "oracle")
        expected = doc.get("expected", {})
        _reject_unknown(expected, _EXPECTED_KEYS, "expected")
        outputs = doc.get("outputs", sorted(OUTPUTS))
        if not isinstance(outputs, list):
            raise ConfigError("outputs must be a list")
        return Scenario(
            name=name,
            sectors=tuple(specs),
            t_end=_number(grid["t_end"], "grid.t_end"),
            n_points=n_points,
            tol=_number(doc.get("tol", 1e-10), "tol"),
            roots=roots,
            oracle_steps_per_unit=_number(oracle.get("steps_per_unit", 1000.0),
                                          "oracle.steps_per_unit"),
            expected={k: _number(v, f"expected.{k}") for k, v in expected.items()},
            outputs=frozenset(outputs),
            description=str(doc.get("description", "")),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


# --- built-ins ---------------------------------------------------------------

def su4_sech(T: float = 1.0, omega0: float = 1.0, detuning: float = 0.3) -> Scenario:
    """Spin-1 sector of su(4) on the first simple root, sech coupling.

    Cartan drives ``(D, 2D, D)`` cancel on the row ``(2, -1, 0)``, so the
    coupling keeps a constant phase.
    """
    roots = RootData(tuple(map(tuple, CARTAN_A3)), (1,), (1,))
    drive = DriveEnvelope(SechPulse(omega0, T),
                          (Constant(detuning), Constant(2 * detuning), Constant(detuning)))
    spec = SectorSpec(SectorSignature.su2(1.0), drive, tuple(map(float, roots.cartan_row(1))),
                      "alpha1")
    k_final = 2.0 * math.sin(math.pi * omega0 * T / 2.0) ** 2
    return Scenario("su4_sech", (spec,), t_end=30.0 * T, roots=roots,
                    expected={"K_final": k_final, "K_final_tol": 1e-6},
                    description=f"su(4) spin-1 sector, sech pulse T={T:g}, Omega0={omega0:g}",
                    section="su(4) example with sech pulse")


def ho_quench(omega0: float = 0.6, omega1: float = 2.0, tau: float = 10.0) -> Scenario:
    """Dilated oscillator with a sudden frequency quench (su(1,1), kappa = 1/4)."""
    drive = DriveEnvelope(PiecewiseConstantQuench(omega0, omega1, tau),
                          (PiecewiseConstantQuench(omega0, omega1, tau, part="cartan"),))
    spec = SectorSpec(SectorSignature.su11(0.25, 128), drive, (2.0,), "su11")
    return Scenario("ho_quench", (spec,), t_end=tau + 2.0, oracle_steps_per_unit=8000.0,
                    expected={"freeze_after": tau},
                    description=f"oscillator quench {omega0:g} -> {omega1:g} for tau={tau:g}",
                    section="dilated harmonic oscillator")


def virasoro_sector(h: float = 0.5, c: float = 1.0, k: int = 3, f: float = 0.3,
                    g: float = 0.5, T: float = 1.0) -> Scenario:
    """su(1,1) subalgebra ``{L_-k, L_0, L_k}`` on a Virasoro primary."""
    if k != int(k):
        raise DomainError(f"Virasoro mode k must be an integer, got {k}")
    k = int(k)
    sector = virasoro_weight(h, c, k)
    drive = DriveEnvelope(SechPulse(k * f, T), (Constant(k * g),))
    spec = SectorSpec(sector, drive, (1.0,), f"vir{k}")
    return Scenario("virasoro_sector", (spec,), t_end=10.0,
                    description=f"Virasoro mode k={k} on h={h:g}, c={c:g}",
                    section="Virasoro sectors")


def rotating_spin(theta0: float = math.pi / 2, Omega: float = 0.5, j: float = 1.0) -> Scenario:
    """Spin in a field of unit strength rotating about z."""
    drive = DriveEnvelope(RotatingField(theta0, Omega),
                          (RotatingField(theta0, Omega, part="cartan"),))
    spec = SectorSpec(SectorSignature.su2(j), drive, (1.0,), "spin")
    return Scenario("rotating_spin", (spec,), t_end=20.0,
                    description=f"spin-{j:g} in a rotating field, Omega={Omega:g}",
                    section="spin in a rotating magnetic field")


def dragged_oscillator(x0: float = 0.5, omega: float = 2.0, m: float = 1.0) -> Scenario:
    """Harmonic oscillator whose centre is dragged along ``x0 cos(omega t)``."""
    drive = DriveEnvelope(DraggedCosine(x0, omega, m), (DraggedCosine(x0, omega, m, part="cartan"),))
    spec = SectorSpec(SectorSignature.heisenberg_weyl(64), drive, (1.0,), "hw")
    return Scenario("dragged_oscillator", (spec,), t_end=6.0,
                    description=f"dragged oscillator x0={x0:g}, omega={omega:g}",
                    section="Heisenberg-Weyl: dragged oscillator")


def so7_two_sector(g: tuple[float, float, float] = (0.4, 0.3, 0.1)) -> Scenario:
    """Two commuting simple-root sectors of so(7) (roots 1 and 3 of B3)."""
    roots = RootData(tuple(map(tuple, CARTAN_B3)), (1, 3), (1, 1))
    cartan = tuple(Constant(x) for x in g)
    specs = (
        SectorSpec(SectorSignature.su2(1.0), DriveEnvelope(SechPulse(1.0, 1.0), cartan),
                   tuple(map(float, roots.cartan_row(1))), "alpha1"),
        SectorSpec(SectorSignature.su2(0.5), DriveEnvelope(Constant(0.5), cartan),
                   tuple(map(float, roots.cartan_row(3))), "alpha3"),
    )
    return Scenario("so7_two_sector", specs, t_end=10.0, roots=roots,
                    description="so(7) sectors on simple roots 1 and 3",
                    section="higher-rank algebras: so(7)")


BUILTINS = {
    "su4_sech": su4_sech,
    "ho_quench": ho_quench,
    "virasoro_sector": virasoro_sector,
    "rotating_spin": rotating_spin,
    "dragged_oscillator": dragged_oscillator,
    "so7_two_sector": so7_two_sector,
}


def builtin(name: str, **params: float) -> Scenario:
    """Instantiate a built-in, optionally overriding its scalar parameters."""
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ConfigError(f"unknown built-in scenario {name!r}; see 'list'") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name!r}: {exc}") from None
    except DomainError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def parse_builtin_spec(text: str) -> Scenario:
    """Parse ``name`` or ``name:key=value,key=value`` into a built-in scenario."""
    name, _, rest = text.partition(":")
    params: dict[str, float] = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"expected key=value in {text!r}, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"parameter {key!r} is not a number: {value!r}") from None
    scn = builtin(name.strip(), **params)
    if params:
        # distinct output files for each parameter choice
        suffix = "_".join(f"{k}{v:g}" for k, v in params.items())
        scn = replace(scn, name=f"{scn.name}_{suffix}")
    return scn


def list_scenarios() -> list[tuple[str, str]]:
    """``(name, "section: description")`` for every built-in."""
    out = []
    for name, factory in BUILTINS.items():
        s = factory()
        out.append((name, f"[{s.section}] {s.description}"))
    return out
