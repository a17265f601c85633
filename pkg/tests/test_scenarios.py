"""Scenario configs: strict parsing, round trips and the built-in registry."""

import json

import pytest

from krylov_lie.errors import ConfigError
from krylov_lie.scenarios import (BUILTINS, builtin, list_scenarios, parse_builtin_spec,
                                  scenario_from_config)

BASE = {
    "name": "small_spin",
    "sector": {"sigma": 1, "lowest_weight": -1.0},
    "drive": {"tag": "Constant", "value": 0.4},
    "grid": {"t_end": 1.0, "n_points": 11},
}


def _with(**kw):
    doc = json.loads(json.dumps(BASE))
    doc.update(kw)
    return doc


def test_minimal_config_parses():
    scn = scenario_from_config(BASE)
    assert scn.name == "small_spin"
    assert len(scn.sectors) == 1
    assert scn.grid.shape == (11,)
    assert scn.tol == 1e-10


@pytest.mark.parametrize("doc", [
    _with(colour="red"),
    _with(grid={"t_end": 1.0, "n_points": 11, "dt": 0.1}),
    _with(sector={"sigma": 1, "lowest_weight": -1.0, "spin": 1}),
    _with(oracle={"steps": 10}),
    _with(expected={"K_end": 1.0}),
])
def test_unknown_keys_rejected(doc):
    with pytest.raises(ConfigError, match="unknown"):
        scenario_from_config(doc)


@pytest.mark.parametrize("doc", [
    _with(sector={"sigma": 3, "lowest_weight": -1.0}),
    _with(sector={"sigma": 1.0, "lowest_weight": -1.0}),
    _with(sector={"sigma": 1, "lowest_weight": -0.3}),
    _with(sector={"sigma": -1, "lowest_weight": -0.5}),
    _with(grid={"t_end": -1.0}),
    _with(grid={"t_end": 1.0, "n_points": 1}),
    _with(grid={"t_end": 1.0, "n_points": 2.5}),
    _with(tol=0.0),
    _with(tol="small"),
    _with(outputs=["plots"]),
    _with(name="a/b"),
    _with(cartan_row=[1.0]),
    {k: v for k, v in BASE.items() if k != "drive"},
])
def test_invalid_configs_rejected(doc):
    with pytest.raises(ConfigError):
        scenario_from_config(doc)


def test_sectors_and_sector_are_exclusive():
    doc = _with(sectors=[{"sector": BASE["sector"], "drive": BASE["drive"]}])
    with pytest.raises(ConfigError, match="either"):
        scenario_from_config(doc)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtin_round_trips_through_config(name):
    scn = builtin(name)
    again = scenario_from_config(json.loads(json.dumps(scn.to_config())))
    assert again.to_config() == scn.to_config()
    assert again.t_end == scn.t_end
    assert [s.cartan_row for s in again.sectors] == [s.cartan_row for s in scn.sectors]


def test_list_has_all_six_builtins_with_descriptions():
    listing = dict(list_scenarios())
    assert set(listing) == set(BUILTINS)
    assert len(listing) == 6
    assert all(desc for desc in listing.values())
    assert all(builtin(n).section for n in BUILTINS)


def test_unknown_builtin():
    with pytest.raises(ConfigError, match="unknown built-in"):
        builtin("nope")


def test_parse_builtin_spec_overrides_and_renames():
    scn = parse_builtin_spec("rotating_spin:Omega=0.7,j=1.5")
    assert scn.name == "rotating_spin_Omega0.7_j1.5"
    assert scn.sectors[0].sector.lowest_weight == -1.5
    assert parse_builtin_spec("rotating_spin").name == "rotating_spin"


@pytest.mark.parametrize("text", [
    "rotating_spin:bogus=1",
    "rotating_spin:Omega",
    "rotating_spin:Omega=fast",
    "virasoro_sector:k=2.5",
    "rotating_spin:j=0.3",
])
def test_parse_builtin_spec_errors(text):
    with pytest.raises(ConfigError):
        parse_builtin_spec(text)
