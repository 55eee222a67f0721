import csv
import io
import json

import pytest

from treel1.cli import BENCH_HEADER, generate, main
from treel1.embedder import closed_form_dim
from treel1.errors import SizeOverflow
from treel1.tree import parse_tree


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_families(capsys):
    code, out, _ = run(capsys, "gen", "path", "5")
    t = parse_tree(out)
    assert code == 0 and t.n == 5 and t.distance(0, 4) == 4
    _, out, _ = run(capsys, "gen", "kary", "2", "6")
    assert parse_tree(out).n == 127
    _, out, _ = run(capsys, "gen", "caterpillar-star", "3")
    assert parse_tree(out).n == (2 ** 4 - 1) + (2 ** 4 - 1) * 2 ** 3
    _, a, _ = run(capsys, "gen", "random", "30", "3", "--seed", "4")
    _, b, _ = run(capsys, "gen", "random", "30", "3", "--seed", "4")
    assert a == b and parse_tree(a).n == 30


def test_gen_overflow(capsys):
    with pytest.raises(SizeOverflow):
        generate("kary", [2, 20])
    code, _, err = run(capsys, "gen", "kary", "2", "20")
    assert code == 2 and "SizeOverflow" in err


def test_embed_verify_roundtrip(tmp_path, capsys):
    tree = tmp_path / "path5.tree"
    run(capsys, "gen", "path", "5", "--out", str(tree))
    out = tmp_path / "e.json"
    code, _, _ = run(capsys, "embed", str(tree), "--eps", "0.5", "--k", "8", "--seed", "1",
                     "--out", str(out))
    doc = json.loads(out.read_text())
    assert code == 0
    for key in ("eps", "delta", "k", "t", "m", "dim", "seed", "attempts", "expansion",
                "contraction", "distortion", "coords"):
        assert key in doc
    assert doc["dim"] == closed_form_dim(doc["m"], doc["t"], doc["eps"])
    assert doc["expansion"] <= 1.5
    code, rep, _ = run(capsys, "verify", str(out), str(tree))
    rep = json.loads(rep)
    assert code == 0 and rep["distortion"] == pytest.approx(doc["distortion"], rel=1e-12)


def test_embed_sparse_and_csv(tmp_path, capsys):
    tree = tmp_path / "t.tree"
    run(capsys, "gen", "kary", "2", "2", "--out", str(tree))
    code, out, _ = run(capsys, "embed", str(tree), "--k", "3", "--sparse")
    doc = json.loads(out)
    assert code == 0 and doc["coords"]["format"] == "triplets"
    sp = tmp_path / "s.json"
    sp.write_text(out)
    _, rep, _ = run(capsys, "verify", str(sp), str(tree))
    assert json.loads(rep)["distortion"] == pytest.approx(doc["distortion"], rel=1e-12)
    code, out, _ = run(capsys, "embed", str(tree), "--k", "3", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 7 and len(rows[0]) == doc["dim"] + 1


def test_embed_dump_scales(tmp_path, capsys):
    tree = tmp_path / "t.tree"
    run(capsys, "gen", "path", "4", "--out", str(tree))
    dump = tmp_path / "scales.txt"
    run(capsys, "embed", str(tree), "--k", "3", "--dump-scales", str(dump), "--out",
        str(tmp_path / "o.json"))
    lines = dump.read_text().splitlines()
    assert lines and all(len(l.split()) == 3 for l in lines)


def test_embed_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.tree"
    bad.write_text("root 0\n0 1 oops\n")
    code, _, err = run(capsys, "embed", str(bad))
    assert code != 0 and "ParseError" in err


def test_embed_target_missed_writes_report(tmp_path, capsys):
    tree = tmp_path / "t.tree"
    run(capsys, "gen", "kary", "2", "3", "--out", str(tree))
    out = tmp_path / "o.json"
    code, _, _ = run(capsys, "embed", str(tree), "--k", "3", "--target", "1.0",
                     "--retries", "2", "--out", str(out))
    assert code == 1 and json.loads(out.read_text())["attempts"] == 2


def test_embed_byte_identical(tmp_path, capsys):
    tree = tmp_path / "t.tree"
    run(capsys, "gen", "random", "25", "3", "--seed", "2", "--out", str(tree))
    outs = []
    for r in range(2):
        p = tmp_path / f"o{r}.json"
        run(capsys, "embed", str(tree), "--k", "4", "--seed", "9", "--out", str(p))
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_kary_command(capsys):
    code, out, _ = run(capsys, "kary", "--k", "2", "--h", "5")
    doc = json.loads(out)
    assert code == 0 and doc["distortion"] <= 2 and doc["t"] == 28


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "kary", "--sizes", "2", "3", "--k", "3",
                       "--eps", "0.5", "0.25")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == BENCH_HEADER and len(rows) == 5
    assert all(r[-1] == "ok" for r in rows[1:])
    by_size = {}
    for r in rows[1:]:
        by_size.setdefault(r[1], []).append(int(r[3]))
    for dims in by_size.values():
        assert dims[1] > dims[0]  # smaller eps, larger dimension


def test_bench_threads_match_serial(capsys):
    args = ["bench", "random", "--sizes", "12", "--arity", "3", "--k", "3", "--seeds", "0", "1"]
    _, serial, _ = run(capsys, *args)
    _, pooled, _ = run(capsys, *args, "--threads", "2")
    strip = lambda s: [r[:8] for r in csv.reader(io.StringIO(s))]
    assert strip(serial) == strip(pooled)


def test_bench_error_rows(capsys):
    code, out, _ = run(capsys, "bench", "kary", "--sizes", "40", "--k", "3")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[1][-1] == "error:SizeOverflow"
