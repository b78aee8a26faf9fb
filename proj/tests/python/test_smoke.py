import math
import pathlib

import pytest

import molecuforge as mf

ROOT = pathlib.Path(__file__).resolve().parents[2]


def methane():
    ws = mf.Workspace()
    c = ws.create_atom("C", (0, 0, 0))
    hs = []
    for i in range(4):
        h = ws.create_atom("H", (3.0 * (i + 1), 2.0, -1.0))
        ws.form_bond(c, h)
        hs.append(h)
    return ws, c, hs


def test_methane_geometry():
    ws, c, hs = methane()
    assert ws.degree(c) == 4
    assert ws.validate() == []
    for h in hs:
        d = ws.position(h) - ws.position(c)
        assert math.isclose(math.sqrt((d * d).sum()), 1.09, abs_tol=1e-9)
    assert ws.bond_angle(hs[0], c, hs[1]) == pytest.approx(109.47122063449069, abs=1e-6)
    assert ws.energy() < 1e-12


def test_errors_carry_codes():
    ws = mf.Workspace()
    with pytest.raises(mf.Error) as info:
        ws.create_atom("Xx", (0, 0, 0))
    assert info.value.code == "UnknownElement"
    h = ws.create_atom("H", (0, 0, 0))
    h2 = ws.create_atom("H", (3, 0, 0))
    h3 = ws.create_atom("H", (-3, 0, 0))
    ws.form_bond(h, h2)
    with pytest.raises(mf.Error) as info:
        ws.form_bond(h, h3)
    assert info.value.code == "NoFreeSlot"


def test_grab_drag_release_snaps():
    ws = mf.Workspace()
    a = ws.create_atom("C", (0, 0, 0))
    b = ws.create_atom("C", (10, 0, 0))
    mode, cand = ws.grab(b)
    assert mode == "molecule" and cand is None
    cand = ws.drag((2.0, 0, 0))
    assert cand["target"][0] == a
    assert cand["distance"] == pytest.approx(2.0)
    assert ws.release()["bond"] == 1
    assert ws.neighbors(a) == [b]


def test_relax_bent_propane():
    ws = mf.Workspace()
    ids = [ws.create_atom("C", (2.0 * i, 0.3 * i, 0)) for i in range(3)]
    ws.form_bond(ids[0], ids[1])
    ws.form_bond(ids[1], ids[2])
    ws.move_molecule(ids[2], translation=(0.3, 0.2, 0.0))
    before = ws.position(ids[0]).copy()
    report = ws.relax(fixed={ids[0]})
    assert report["converged"]
    assert all(b <= a for a, b in zip(report["energy_trace"], report["energy_trace"][1:]))
    assert (ws.position(ids[0]) == before).all()


def test_xml_round_trip_and_xyz():
    ws, _, _ = methane()
    doc = mf.save_xml(ws)
    back = mf.load_xml(doc)
    assert mf.save_xml(back) == doc
    assert mf.export_xyz(back).startswith("5\nmolecusense export\nC ")
    with pytest.raises(mf.Error) as info:
        mf.load_xml("<molecusense")
    assert info.value.code == "ParseError"


def test_session_protocol():
    s = mf.Session()
    response, events = s.execute({"id": 1, "cmd": "create_atom", "args": {"element": "C", "x": 0, "y": 0, "z": 0}})
    assert response == {"id": 1, "ok": True, "result": {"atom": 1}}
    assert events == []
    s.call("create_atom", element="C", x=9, y=0, z=0)
    s.call("grab", atom=2)
    _, events = s.call("drag", x=2.0, y=0, z=0)
    assert [e["event"] for e in events] == ["snap_candidate"]
    response, _ = s.execute_line("{broken")
    assert response["error"]["code"] == "ParseError"
    with pytest.raises(mf.Error):
        s.call("nope")
    assert len(s.workspace) == 2


def test_shipped_scripts():
    report = mf.run_script(ROOT / "scripts" / "methylbutane.jsonl")
    assert report["success"]
    ws = mf.load_xml(report["final_snapshot"])
    assert sorted(ws.degree(i) for i in ws.atom_ids) == [1, 1, 1, 2, 3]

    report = mf.run_script(ROOT / "scripts" / "norbornane.jsonl")
    assert report["success"]
    ws = mf.load_xml(report["final_snapshot"])
    assert sorted(ws.degree(i) for i in ws.atom_ids) == [2, 2, 2, 2, 2, 3, 3]
