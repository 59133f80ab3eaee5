import pytest

from bench.instances import ExperimentSpec
from common import presets
from common.errors import UnknownPresetError


def test_every_preset_builds_a_valid_spec():
    for name in presets.preset_names():
        preset = presets.get_preset(name)
        assert preset["kind"] in presets.PRESET_KINDS
        spec = ExperimentSpec.model_validate(preset["spec"])
        assert spec.experiment_id == name


def test_headline_regimes():
    table1 = presets.get_preset("table1")["spec"]
    assert (table1["n"], table1["d"], table1["N"], table1["k"]) == (20, 2, 25, 3)
    table2 = presets.get_preset("table2")["spec"]
    assert (table2["n"], table2["d"], table2["N"], table2["k"]) == (5, 4, 50, 2)
    noisy = presets.get_preset("table6")["spec"]
    assert noisy["noise_epsilon"] == 3.0 and noisy["N"] == 50


def test_sweep_presets_carry_their_grids():
    for name in ("fig1", "fig2"):
        phase = presets.get_preset(name)
        assert phase["kind"] == "phase"
        assert phase["degrees"] == [2, 3, 4]
    assert presets.get_preset("fig5")["levels"]
    assert presets.get_preset("fig6")["configured"]
    timing = presets.get_preset("fig3_n")
    assert timing["kind"] == "timing" and timing["field"] == "n"


def test_get_preset_returns_a_copy():
    first = presets.get_preset("table1")
    first["spec"]["n"] = 99
    assert presets.get_preset("table1")["spec"]["n"] == 20


def test_unknown_preset():
    with pytest.raises(UnknownPresetError, match="available"):
        presets.get_preset("table99")


def test_missing_file_falls_back_to_defaults(monkeypatch, tmp_path):
    monkeypatch.setattr(presets, "_PRESETS_CACHE", None)
    monkeypatch.setattr(presets, "PRESETS_PATH", str(tmp_path / "absent.json"))
    loaded = presets.get_presets()
    assert set(loaded) == {"table1", "table2"}


def test_malformed_entries_are_skipped(monkeypatch, tmp_path):
    path = tmp_path / "presets.json"
    path.write_text(
        '{"table1": {"kind": "experiment", "spec": {"trials": 5}},'
        ' "odd": {"kind": "unknown"}, "worse": 3}'
    )
    monkeypatch.setattr(presets, "_PRESETS_CACHE", None)
    monkeypatch.setattr(presets, "PRESETS_PATH", str(path))
    loaded = presets.get_presets()
    assert set(loaded) == {"table1", "table2"}
    assert loaded["table1"]["spec"]["trials"] == 5
    assert loaded["table1"]["spec"]["n"] == 20
