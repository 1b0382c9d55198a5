import random
import struct
import subprocess
import sys

import pytest

from csapp import CsaIndex, load_byte_text, load_token_text
from csapp.cli import main
from csapp.indexfile import IndexFormatError, dumps, loads


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def counts_and_summary(out):
    lines = out.splitlines()
    summary = dict(kv.split("=") for kv in lines[-1].lstrip("# ").split())
    return [int(x) for x in lines[:-1]], summary


@pytest.fixture
def abra_index(tmp_path, capsys):
    src = tmp_path / "abra.txt"
    src.write_bytes(b"abracadabra")
    idx = tmp_path / "abra.idx"
    code, out, _ = run(capsys, "build", src, "-o", idx, "--k", 2)
    assert code == 0
    return idx, out


def test_build_and_count(abra_index, tmp_path, capsys):
    idx, out = abra_index
    fields = dict(kv.split("=") for kv in out.split())
    assert (fields["n"], fields["sigma"], fields["k"], fields["L"]) == ("12", "5", "2", "2")
    assert int(fields["index_bytes"]) == idx.stat().st_size
    q = tmp_path / "q.txt"
    q.write_bytes(b"abra\na\nzzz\n")
    code, out, _ = run(capsys, "count", idx, q, "--runs", 2)
    counts, summary = counts_and_summary(out)
    assert code == 0 and counts == [2, 5, 0]
    assert (summary["queries"], summary["symbols"], summary["runs"]) == ("3", "8", "2")


def test_count_with_workers(abra_index, tmp_path, capsys):
    idx, _ = abra_index
    q = tmp_path / "q.txt"
    q.write_bytes(b"\n".join([b"abra", b"a", b"zzz", b"cad", b"ra"] * 20))
    _, out, _ = run(capsys, "count", idx, q, "--workers", 3)
    assert counts_and_summary(out)[0] == [2, 5, 0, 1, 2] * 20


def test_empty_query_file(abra_index, tmp_path, capsys):
    q = tmp_path / "empty.txt"
    q.write_bytes(b"")
    code, out, _ = run(capsys, "count", abra_index[0], q)
    assert code == 0 and out.startswith("# queries=0 symbols=0")


def test_build_empty_input(tmp_path, capsys):
    src = tmp_path / "empty.txt"
    src.write_bytes(b"")
    code, out, _ = run(capsys, "build", src, "-o", tmp_path / "e.idx")
    assert code == 0 and out.startswith("n=1 sigma=0")
    index = loads((tmp_path / "e.idx").read_bytes())
    assert index.count(b"a") == 0 and index.count(b"") == 1


def test_defaults(tmp_path, capsys):
    src = tmp_path / "t.txt"
    src.write_bytes(b"mississippi")
    _, out, _ = run(capsys, "build", src, "-o", tmp_path / "t.idx")
    assert " k=128 L=128 " in out


def test_token_mode_and_mode_mismatch(tmp_path, capsys):
    src = tmp_path / "tok.txt"
    src.write_text("7 7 1000000 7 7 3")
    idx = tmp_path / "tok.idx"
    assert run(capsys, "build", src, "-o", idx, "--mode", "token", "--k", 2, "--L", 1)[0] == 0
    q = tmp_path / "q.txt"
    q.write_text("7 7\n1000000 7\n4\n")
    _, out, _ = run(capsys, "count", idx, q)
    assert counts_and_summary(out)[0] == [2, 1, 0]
    code, _, err = run(capsys, "count", idx, q, "--mode", "byte")
    assert code == 2 and "does not match" in err
    q.write_text("7 x\n")
    code, _, err = run(capsys, "count", idx, q)
    assert code == 2 and "line 1" in err


def test_bad_arguments(tmp_path, capsys):
    src = tmp_path / "t.txt"
    src.write_bytes(b"abc")
    code, _, err = run(capsys, "build", src, "-o", tmp_path / "x.idx", "--k", 1)
    assert code == 2 and "--k" in err
    code, _, err = run(capsys, "build", tmp_path / "missing", "-o", tmp_path / "x.idx")
    assert code == 2 and "cannot read" in err
    code, _, err = run(capsys, "gen-queries", src, "--length", 4)
    assert code == 2 and "exceeds" in err


def test_stats_csv(tmp_path, capsys):
    src = tmp_path / "rep.txt"
    src.write_bytes(b"the quick brown fox jumps over the lazy dog. " * 300)
    idx = tmp_path / "rep.idx"
    run(capsys, "build", src, "-o", idx)
    code, out, _ = run(capsys, "stats", idx)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "component,psi_percent,bytes"
    rows = [line.split(",") for line in lines[1:]]
    assert [r[0] for r in rows] == [
        "Samples", "NIL-blocks", "BV-coded", "RL-coded", "EF-coded", "Binary values", "Other", "Total",
    ]
    assert abs(sum(float(r[1]) for r in rows if r[1]) - 100.0) < 0.1
    assert float(rows[-1][2]) == idx.stat().st_size
    assert abs(sum(float(r[2]) for r in rows[:-1]) - float(rows[-1][2])) < 1e-6
    pct = {r[0]: float(r[1]) for r in rows if r[1]}
    assert pct["NIL-blocks"] + pct["RL-coded"] > 50


def test_gen_queries_deterministic_and_present(tmp_path, capsys):
    rng = random.Random(4)
    text = bytes(rng.choice(b"abcde\n") for _ in range(5000))
    src = tmp_path / "t.txt"
    src.write_bytes(text)
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for out_path in (a, b):
        assert run(capsys, "gen-queries", src, "-o", out_path, "--count", 300, "--length", 5, "--seed", 9)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    patterns = a.read_bytes().split(b"\n")[:-1]
    assert len(patterns) == 300 and all(len(p) == 5 for p in patterns)
    assert all(p in text for p in patterns)
    idx = tmp_path / "t.idx"
    run(capsys, "build", src, "-o", idx)
    counts, _ = counts_and_summary(run(capsys, "count", idx, a)[1])
    assert min(counts) >= 1


def test_gen_queries_defaults_token(tmp_path, capsys):
    src = tmp_path / "tok.txt"
    src.write_text(" ".join(str(i % 50) for i in range(400)))
    code, out, _ = run(capsys, "gen-queries", src, "--mode", "token", "--count", 10)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 10 and all(len(line.split()) == 4 for line in lines)


def test_factorize(tmp_path, capsys):
    d = b"abracadabra"
    rev = tmp_path / "rev.txt"
    rev.write_bytes(d[::-1])
    idx = tmp_path / "d.idx"
    run(capsys, "build", rev, "-o", idx, "--k", 4)
    stream = tmp_path / "s.txt"
    stream.write_bytes(d)
    _, out, _ = run(capsys, "factorize", idx, stream)
    assert out.splitlines()[0] == "11" and "factors=1 " in out and "avg_factor_length=11.0000" in out
    stream.write_bytes(b"xyz")
    _, out, _ = run(capsys, "factorize", idx, stream)
    assert out.splitlines()[:3] == ["0 120", "0 121", "0 122"]
    assert "literals=3" in out and "avg_factor_length=0.0000" in out


def test_module_entry_point(abra_index):
    proc = subprocess.run([sys.executable, "-m", "csapp", "stats", str(abra_index[0])], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("component,psi_percent,bytes")


# -- file format -------------------------------------------------------------


def _indexes():
    rng = random.Random(21)
    for i in range(6):
        raw = bytes(rng.choice(b"abcdefgh"[: rng.randint(1, 8)]) for _ in range(rng.randint(0, 1500)))
        yield CsaIndex.build(load_byte_text(raw * rng.randint(1, 3)), rng.choice([2, 16, 128]), rng.choice([None, 1, 3]))
    yield CsaIndex.build(load_token_text("5 10 10 99999999999 5"), 2, 1)


@pytest.mark.parametrize("index", list(_indexes()), ids=lambda ix: f"n{ix.n}-k{ix.k}-L{ix.L}")
def test_serialization_roundtrip(index):
    data = dumps(index)
    back = loads(data)
    assert dumps(back) == data
    assert back.store.reconstruct() == index.store.reconstruct()
    assert (back.n, back.sigma, back.k, back.L, back.mode, back.alphabet) == (
        index.n, index.sigma, index.k, index.L, index.mode, index.alphabet,
    )


def test_format_rejections(abra_index):
    data = abra_index[0].read_bytes()
    bumped = data[:8] + struct.pack("<I", 2) + data[12:]
    with pytest.raises(IndexFormatError, match="version"):
        loads(bumped)
    with pytest.raises(IndexFormatError, match="magic"):
        loads(b"X" + data[1:])
    with pytest.raises(IndexFormatError):
        loads(data + b"\0")
    with pytest.raises(ValueError):
        loads(data[:-3])
