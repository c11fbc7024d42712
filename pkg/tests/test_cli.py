import json
import subprocess
import sys

import pytest

from stratified import FamilySpec, PolyRing, StratifiedModule, make_family, make_field, prime_field, serial
from stratified.cli import main

F4 = make_field(2, 2, [1, 1, 1])


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def family_file(tmp_path):
    path = tmp_path / "family.json"
    path.write_text(serial.dump_module(make_family(FamilySpec(F4, (F4(0), F4(1), F4.gen)))))
    return path


@pytest.fixture
def broken_file(tmp_path):
    R = PolyRing(prime_field(2), ("x",))
    M = StratifiedModule(R, (), ("x",), 1, {("x", 1): ((R.gen("x"),),)})
    path = tmp_path / "broken.json"
    path.write_text(serial.dump_module(M))
    return path


def test_verify(capsys, family_file, broken_file, tmp_path):
    code, out, _ = run(capsys, "verify", family_file, "--cutoff", 32)
    assert code == 0 and out.startswith("PASS")
    code, out, _ = run(capsys, "--cutoff", 4, "verify", broken_file)
    assert code == 1 and "(R1, i=x, j=x, k=1, l=1)" in out
    garbled = tmp_path / "garbled.json"
    garbled.write_text(family_file.read_text()[:100])
    assert run(capsys, "verify", garbled)[0] == 2
    assert run(capsys, "verify", tmp_path / "missing.json")[0] == 2


def test_family_outputs(capsys, tmp_path):
    out_dir = tmp_path / "f4"
    code, out, _ = run(capsys, "family", "--p", 2, "--field-modulus", "1,1,1", "--points", "0,1,T",
                       "--out", out_dir)
    assert code == 0
    assert (out_dir / "profile.csv").read_text() == "0,0\n1,1\n2,2\n"
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == ["certificate_0.json", "certificate_1.json", "certificate_2.json", "family.json",
                     "fiber_0.json", "fiber_1.json", "fiber_2.json", "module.json", "profile.csv"]
    fam = json.loads((out_dir / "family.json").read_text())
    assert fam["points"] == [[0, 0], [1, 0], [0, 1]]
    cert = json.loads((out_dir / "certificate_2.json").read_text())
    assert cert["minimal_degree"] == 2
    for n in range(3):
        text = (out_dir / f"fiber_{n}.json").read_text()
        assert serial.dump_module(serial.load_module(text)) == text
        assert run(capsys, "verify", out_dir / f"fiber_{n}.json", "--cutoff", 8)[0] == 0


def test_family_profiles(capsys, tmp_path):
    code, out, _ = run(capsys, "family", "--p", 3, "--field-modulus", "1,0,1", "--points", "0,1,2")
    assert code == 0 and out.splitlines()[1:] == ["0,0", "1,1", "2,3"]
    code, out, _ = run(capsys, "family", "--p", 2, "--points", "0")
    assert code == 0 and out.splitlines()[1:] == ["0,0"]
    assert run(capsys, "family", "--p", 2, "--field-modulus", "1,1,1", "--points", "1,1")[0] == 2
    assert run(capsys, "family", "--p", 2, "--field-modulus", "1,0,1", "--points", "0")[0] == 2
    assert run(capsys, "family", "--p", 2, "--points", "0,T")[0] == 2


def test_fiber(capsys, family_file, tmp_path):
    cert_path = tmp_path / "cert.json"
    code, out, _ = run(capsys, "fiber", family_file, "--at", "y=1", "--deg-bound", 4, "--out", cert_path)
    assert code == 0
    assert "minimal_degree 1" in out and "[x, 1]" in out  # -x = x in characteristic 2
    cert = json.loads(cert_path.read_text())
    assert cert["gauge"]["rows"][1][0] == [{"exps": {"x": 1}, "coeff": [1, 0]}]
    code, out, _ = run(capsys, "fiber", family_file, "--at", "y=T", "--deg-bound", 1)
    assert code == 1 and "NotFoundWithinBound" in out
    assert run(capsys, "fiber", family_file, "--at", "z=1", "--deg-bound", 1)[0] == 2
    assert run(capsys, "fiber", family_file, "--at", "y", "--deg-bound", 1)[0] == 2


def test_fiber_sign_in_odd_characteristic(capsys, tmp_path):
    F9 = make_field(3, 2, [1, 0, 1])
    path = tmp_path / "f9.json"
    path.write_text(serial.dump_module(make_family(FamilySpec(F9, (F9(0), F9(1), F9(2))))))
    code, out, _ = run(capsys, "fiber", path, "--at", "y=1", "--deg-bound", 4)
    assert code == 0 and "[2*x, 1]" in out


def test_algebra(capsys, family_file, tmp_path):
    once = tmp_path / "dual1.json"
    twice = tmp_path / "dual2.json"
    assert run(capsys, "algebra", "dual", family_file, "--out", once)[0] == 0
    assert run(capsys, "algebra", "dual", once, "--out", twice)[0] == 0
    assert twice.read_bytes() == family_file.read_bytes()
    code, out, _ = run(capsys, "algebra", "dsum", family_file, family_file)
    assert code == 0 and json.loads(out)["rank"] == 4
    code, out, _ = run(capsys, "algebra", "tensor", family_file, family_file)
    assert code == 0 and json.loads(out)["rank"] == 4
    assert run(capsys, "algebra", "tensor", family_file)[0] == 2
    assert run(capsys, "algebra", "wedge", family_file)[0] == 2


def test_exponents(capsys, tmp_path):
    path = tmp_path / "log.json"
    path.write_text(json.dumps({"field": {"p": 3, "m": 1, "modulus": [0, 1]}, "rank": 1, "H": 2,
                                "B": [[[[2]]], [[[1]]], [[[1]]]]}))
    code, out, _ = run(capsys, "exponents", path)
    assert code == 0 and out == "alpha digits 2,1,1; torsion: periodic(1)\n"
    jordan = tmp_path / "jordan.json"
    jordan.write_text(json.dumps({"field": {"p": 2, "m": 1, "modulus": [0, 1]}, "rank": 2, "H": 0,
                                  "B": [[[[0], [1]], [[0], [0]]]]}))
    assert run(capsys, "exponents", jordan)[0] == 1
    assert run(capsys, "exponents", path, "--window", 9)[0] == 2


def test_invert(capsys, tmp_path):
    R = PolyRing(prime_field(2), ("x",), (True,))
    path = tmp_path / "m.json"
    path.write_text(serial.dump_module(StratifiedModule(R, (), ("x",), 1, {("x", 1): ((R.one,),)})))
    code, out, _ = run(capsys, "invert", path, "--cutoff", 4)
    doc = json.loads(out)
    assert code == 0 and doc["valid_up_to"] == 4 and doc["vars"][0]["name"] == "t"
    assert doc["matrices"][0]["rows"] == [[[{"exps": {"t": -2}, "coeff": [1]}]]]
    jordan = tmp_path / "j.json"
    z, o = R.zero, R.one
    jordan.write_text(serial.dump_module(StratifiedModule(R, (), ("x",), 2, {("x", 1): ((z, z), (o, z))})))
    inverted = tmp_path / "inv.json"
    assert run(capsys, "invert", jordan, "--cutoff", 6, "--out", inverted)[0] == 0
    code, out, _ = run(capsys, "verify", inverted)
    assert code == 0 and "cutoff 6" in out
    not_laurent = tmp_path / "n.json"
    R2 = PolyRing(prime_field(2), ("x",))
    not_laurent.write_text(serial.dump_module(StratifiedModule.trivial(R2, (), ("x",), 1)))
    assert run(capsys, "invert", not_laurent)[0] == 2


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["family", "--points", "0"]) == 2
    assert main(["verify", "a.json", "--cutoff", "many"]) == 2
    assert main(["--help"]) == 0


def test_determinism(capsys, tmp_path):
    outs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        run(capsys, "--seed", 7, "family", "--p", 2, "--field-modulus", "1,1,1", "--points", "0,1,T", "--out", d)
        outs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path, family_file):
    proc = subprocess.run([sys.executable, "-m", "stratified", "verify", str(family_file)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("PASS")
