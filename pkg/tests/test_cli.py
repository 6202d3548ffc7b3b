import json
import subprocess
import sys
from pathlib import Path

import pytest

from antipode_bridge import construction
from antipode_bridge.cli import main
from antipode_bridge.construction import Source
from antipode_bridge.cover import CoverSpec, barycenter_spec, random_grid_spec
from antipode_bridge.geometry import GridPoint, as_point


def _write(path: Path, spec: CoverSpec) -> str:
    path.write_text(spec.to_json(), encoding="utf-8")
    return str(path)


@pytest.fixture
def ratio_spec(tmp_path):
    return _write(tmp_path / "ratio.json", CoverSpec(dim=2, kind="ratio", target=as_point(["1/2", "1/4", "1/4"])))


@pytest.fixture
def bary_spec(tmp_path):
    return _write(tmp_path / "bary.json", barycenter_spec(2))


@pytest.fixture
def degenerate_spec(tmp_path):
    spec = CoverSpec(dim=2, kind="degenerate_ratio", target=as_point(["1/3"] * 3), extras=((3, 3),))
    return _write(tmp_path / "degenerate.json", spec)


@pytest.fixture
def non_kkm_spec(tmp_path):
    spec = random_grid_spec(0, 2, 3)
    entries = dict(spec.entries)
    entries[(3, 0, 0)] = frozenset({2})
    return _write(tmp_path / "nonkkm.json", CoverSpec(dim=2, kind="grid", n=3, entries=entries))


def _run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


# -- verify --------------------------------------------------------------------

def test_verify_ratio_passes(ratio_spec, capsys):
    code, out = _run(["verify", "--spec", ratio_spec, "-N", "6"], capsys)
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_degenerate_lists_witnesses(degenerate_spec, capsys):
    code, out = _run(["verify", "--spec", degenerate_spec, "-N", "6"], capsys)
    assert code == 1
    checks = {c["check"]: c for c in json.loads(out)["checks"]}
    assert checks["kkm"]["passed"]
    assert {"point": ["1/1", "0/1", "0/1"], "set": 3} in checks["nondegenerate"]["witnesses"]


def test_verify_selected_checks(degenerate_spec, capsys):
    code, _ = _run(["verify", "--spec", degenerate_spec, "--checks", "cover,kkm"], capsys)
    assert code == 0


def test_verify_truncated_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "kind": "rat', encoding="utf-8")
    assert main(["verify", "--spec", str(bad)]) == 2


def test_missing_spec_file(tmp_path):
    assert main(["run", "--spec", str(tmp_path / "nope.json")]) == 2


def test_bad_flags_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["run", "--format", "yaml"])
    assert info.value.code == 2


def test_resolution_limit(ratio_spec):
    assert main(["run", "--spec", ratio_spec, "-N", "65"]) == 2


# -- run -----------------------------------------------------------------------

def test_run_barycenter(bary_spec, capsys):
    code, out = _run(["run", "--spec", bary_spec, "-N", "3"], capsys)
    assert code == 0
    assert json.loads(out)["outcome"] == {"kind": "KkmPointsFound", "points": [["1/3", "1/3", "1/3"]]}


def test_run_off_grid(ratio_spec, capsys):
    code, out = _run(["run", "--spec", ratio_spec, "-N", "3"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["outcome"]["kind"] == "AntipodeFreeCoverBuilt"
    assert doc["thickened"] is False


def test_run_degenerate(degenerate_spec, capsys):
    code, out = _run(["run", "--spec", degenerate_spec, "-N", "6"], capsys)
    assert code == 0
    assert json.loads(out)["thickened"] is True


def test_run_non_kkm_exit_1(non_kkm_spec, capsys):
    code, out = _run(["run", "--spec", non_kkm_spec, "-N", "3"], capsys)
    assert code == 1
    assert json.loads(out)["error"] == "precondition"


def test_run_violation_exit_3(ratio_spec, monkeypatch, capsys):
    real = construction.assemble_A

    def corrupted(cover, n):
        ext = real(cover, n)
        ext.entries[GridPoint((-3, 0, 0), 3)][1] = Source.E
        return ext

    monkeypatch.setattr(construction, "assemble_A", corrupted)
    code, out = _run(["run", "--spec", ratio_spec, "-N", "3"], capsys)
    assert code == 3
    assert json.loads(out)["outcome"]["kind"] == "Violation"


def test_run_text_format(bary_spec, capsys):
    code, out = _run(["run", "--spec", bary_spec, "-N", "3", "--format", "text"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("outcome: KkmPointsFound")


def test_run_writes_out_file(ratio_spec, tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["run", "--spec", ratio_spec, "-N", "4", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["outcome"]["kind"] == "KkmPointsFound"
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".tmp-")] == []


# -- oracle --------------------------------------------------------------------

@pytest.mark.parametrize("dim", [1, 2, 3])
def test_oracle_ratio_suite(dim, tmp_path, capsys):
    spec = tmp_path / "g.json"
    assert main(["gen", "--seed", str(dim), "--dim", str(dim), "--out", str(spec)]) == 0
    code, out = _run(["oracle", "--spec", str(spec), "-N", "6"], capsys)
    assert code == 0
    assert json.loads(out)["duality"] is True


def test_oracle_sweep(ratio_spec, capsys):
    code, out = _run(["oracle", "--spec", ratio_spec, "--sweep", "3,4,8"], capsys)
    assert code == 0
    assert [r["intersectionCount"] for r in json.loads(out)] == [0, 1, 1]


def test_oracle_sweep_text(ratio_spec, capsys):
    code, out = _run(["oracle", "--spec", ratio_spec, "--sweep", "3,4,8", "--format", "text"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("N=3 ")


def test_oracle_non_kkm(non_kkm_spec):
    assert main(["oracle", "--spec", non_kkm_spec, "-N", "3"]) == 1


# -- gen -----------------------------------------------------------------------

def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "--seed", "7", "--out", str(a)]) == 0
    assert main(["gen", "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_round_trips_through_verify(tmp_path):
    spec = tmp_path / "s.json"
    main(["gen", "--seed", "11", "--dim", "3", "--out", str(spec)])
    assert main(["verify", "--spec", str(spec), "-N", "6", "--out", str(tmp_path / "r.json")]) == 0
    doc = json.loads(spec.read_text())
    denominators = [int(c.split("/")[1]) for c in doc["target"]]
    assert max(denominators) <= 12


def test_gen_degenerate_fails_nondegeneracy(tmp_path):
    spec = tmp_path / "s.json"
    main(["gen", "--seed", "11", "--degenerate", "--out", str(spec)])
    assert main(["verify", "--spec", str(spec), "-N", "6", "--out", str(tmp_path / "r.json")]) == 1
    assert main(["verify", "--spec", str(spec), "--checks", "kkm", "--out", str(tmp_path / "r.json")]) == 0


def test_gen_requires_seed():
    assert main(["gen"]) == 2


# -- render --------------------------------------------------------------------

def test_render_has_eight_facets(bary_spec, tmp_path):
    out = tmp_path / "a.svg"
    assert main(["render", "--spec", bary_spec, "-N", "6", "--out", str(out)]) == 0
    svg = out.read_text()
    assert svg.count('class="facet"') == 8
    assert svg.count('class="exposed"') == 1
    assert 'stroke-dasharray' in svg


def test_render_is_byte_identical(degenerate_spec, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    main(["render", "--spec", degenerate_spec, "-N", "6", "--out", str(a), "--size", "400"])
    main(["render", "--spec", degenerate_spec, "-N", "6", "--out", str(b), "--size", "400"])
    assert a.read_bytes() == b.read_bytes()


def test_render_rejects_other_dimensions(tmp_path):
    spec = _write(tmp_path / "d3.json", barycenter_spec(3))
    assert main(["render", "--spec", spec]) == 2


def test_render_multi_membership_uses_stripes(bary_spec, tmp_path):
    out = tmp_path / "a.svg"
    main(["render", "--spec", bary_spec, "-N", "4", "--out", str(out)])
    svg = out.read_text()
    assert "<pattern id=\"stripe-" in svg


def test_module_entry_point(bary_spec):
    proc = subprocess.run(
        [sys.executable, "-m", "antipode_bridge", "run", "--spec", bary_spec, "-N", "3"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outcome"]["kind"] == "KkmPointsFound"
