import subprocess
import sys

from baire.cli import build, main

from conftest import SAMPLES


def run(*args):
    return main([str(a) for a in args])


def test_build_counts_and_verify(tmp_path, capsys):
    assert run("build", SAMPLES / "hnn.txt", "--budget", 9, "--out", tmp_path) == 0
    names = sorted(p.name.split("-")[1] for p in (tmp_path / "certs").glob("*.txt"))
    assert names.count("transitive.txt") == names.count("folner.txt") == names.count("faithful.txt") == 3
    assert run("verify", tmp_path, "--depth", 2) == 0
    assert run("verify", tmp_path, "--depth", 0, "--mode", "faithful") == 0
    assert "FAIL" not in capsys.readouterr().out


def test_malformed_embedding_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text((SAMPLES / "hnn.txt").read_text().replace("r_images:(0;e),(0;a)", "r_images:(0;a),(0;e)"))
    assert run("build", bad, "--out", tmp_path / "out") == 2
    assert "edge t" in capsys.readouterr().err


def test_tampered_count_is_detected(tmp_path, capsys):
    build(SAMPLES / "free.txt", tmp_path, 6)
    cert = sorted((tmp_path / "certs").glob("*folner.txt"))[0]
    lines = cert.read_text().splitlines()
    i = next(k for k, l in enumerate(lines) if l.startswith("gen "))
    label, elem, count = lines[i].split("\t")
    lines[i] = "\t".join([label, elem, str(int(count) + 2)])
    cert.write_text("\n".join(lines) + "\n")
    assert run("verify", tmp_path, "--mode", "folner") == 3
    out = capsys.readouterr().out
    assert f"FAIL {cert.name}: generator" in out


def test_verify_rejects_truncated_log(tmp_path):
    build(SAMPLES / "amalgam.txt", tmp_path, 6)
    log = tmp_path / "wlog.txt"
    log.write_text("".join(log.read_text().splitlines(keepends=True)[:5]))
    assert run("verify", tmp_path, "--mode", "transitive") == 3


def test_same_invocation_same_digests(tmp_path):
    build(SAMPLES / "amalgam.txt", tmp_path / "a", 9)
    build(SAMPLES / "amalgam.txt", tmp_path / "b", 9)
    assert (tmp_path / "a" / "manifest.txt").read_bytes() == (tmp_path / "b" / "manifest.txt").read_bytes()


def test_schreier(tmp_path, capsys):
    build(SAMPLES / "free.txt", tmp_path, 6)
    assert run("schreier", tmp_path, "--points", 1, "--gens", "1") == 0
    out = capsys.readouterr().out
    assert out.count("->") == 1 and "p0 -> p0" in out
    assert run("schreier", tmp_path, "--points", 10, "--gens", "a.z1,b.z1") == 0
    out = capsys.readouterr().out
    assert out.count('label="a.z1"') == 10 and out.count('label="b.z1"') == 10
    assert run("schreier", tmp_path, "--gens", "nope") == 2


def test_schreier_arcs_replay(tmp_path):
    from baire.cli import restore

    build(SAMPLES / "free.txt", tmp_path, 6)
    comp = restore(tmp_path)
    E = comp.top
    gens = dict(E.group.generators())
    for i in range(10):
        p = E.canonical_point(i)
        q = E.evaluate(gens["b.z1"], p)
        assert E.evaluate(E.group.inv(gens["b.z1"]), q) == p


def test_console_script_entry(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "baire.cli", "build", str(SAMPLES / "hnn.txt"), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and "9 certificates" in res.stdout
