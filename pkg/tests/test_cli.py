import re
import subprocess
import sys

import numpy as np
import pytest

from expertrec.cli import run
from expertrec.neural import load_model
from expertrec.retrieve import cosine_similarity, embed_query, load_index
from expertrec.vectorize import read_vocabulary

FAST_TRAIN = ["--epochs", "2", "--hidden", "32,24,20,20", "--lr", "1e-3"]


def chain(d, capsys, seed="1"):
    """Run every file-producing subcommand into directory ``d``."""
    out = {}
    steps = [
        ["vocab", "--corpus", "bundled:sample", "--out", str(d / "vocab.tsv")],
        ["vectorize", "--corpus", "bundled:sample", "--vocab", str(d / "vocab.tsv"), "--out", str(d / "m.tsv")],
        ["train", "--matrix", str(d / "m.tsv"), "--out", str(d / "model.bin"), "--seed", seed, *FAST_TRAIN],
        ["index", "--model", str(d / "model.bin"), "--matrix", str(d / "m.tsv"), "--out", str(d / "idx.bin")],
        ["viz", "--index", str(d / "idx.bin"), "--corpus", "bundled:sample", "--out", str(d / "viz.csv")],
    ]
    for argv in steps:
        assert run(argv) == 0, argv
        out[argv[0]] = capsys.readouterr()
    return out


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    d = tmp_path_factory.mktemp("chain")
    for argv in (
        ["vocab", "--corpus", "bundled:sample", "--out", str(d / "vocab.tsv")],
        ["vectorize", "--corpus", "bundled:sample", "--vocab", str(d / "vocab.tsv"), "--out", str(d / "m.tsv")],
        ["train", "--matrix", str(d / "m.tsv"), "--out", str(d / "model.bin"), *FAST_TRAIN],
        ["index", "--model", str(d / "model.bin"), "--matrix", str(d / "m.tsv"), "--out", str(d / "idx.bin")],
    ):
        assert run(argv) == 0
    return d


def test_chain_is_byte_reproducible(tmp_path, capsys):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    outs = chain(tmp_path / "a", capsys)
    chain(tmp_path / "b", capsys)
    for name in ("vocab.tsv", "m.tsv", "model.bin", "idx.bin", "viz.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name
    assert re.search(r"V=\d+", outs["vocab"].out)
    assert outs["train"].err.count("epoch=") == 2


def test_train_defaults_print_epoch_lines(tmp_path, built, capsys):
    code = run(["train", "--matrix", str(built / "m.tsv"), "--epochs", "18", "--lr", "0.00001",
                "--seed", "1", "--out", str(tmp_path / "model.bin")])
    assert code == 0
    lines = capsys.readouterr().err.strip().splitlines()
    assert len(lines) == 18
    assert all(re.fullmatch(r"epoch=\d+ mean_loss=\S+ seconds=\S+", ln) for ln in lines)
    assert load_model(tmp_path / "model.bin").encoder_dims[1:] == [512, 128, 48, 20]


def test_query_matches_brute_force(built, capsys):
    text = "facania vusunismo"
    assert run(["query", "--index", str(built / "idx.bin"), "--model", str(built / "model.bin"),
                "--vocab", str(built / "vocab.tsv"), "--text", text, "--k", "5"]) == 0
    rows = [ln.split("\t") for ln in capsys.readouterr().out.strip().splitlines()]
    assert [r[0] for r in rows] == ["1", "2", "3", "4", "5"]
    index, model = load_index(built / "idx.bin"), load_model(built / "model.bin")
    q = embed_query(model, read_vocabulary(built / "vocab.tsv"), text)
    scan = sorted(((cosine_similarity(e, q), sid) for sid, e in zip(index.ids, index.embeddings)),
                  key=lambda p: (-p[0], p[1]))[:5]
    assert [r[1] for r in rows] == [sid for _, sid in scan]
    assert np.allclose([float(r[2]) for r in rows], [s for s, _ in scan], rtol=0, atol=1e-12)


def test_stats_table(capsys):
    assert run(["stats", "--corpus", "bundled:sample"]) == 0
    out = capsys.readouterr().out
    assert "Journal articles" in out and "Extracted radicals" in out


def test_eval_and_gradcheck(built, capsys):
    assert run(["eval", "--index", str(built / "idx.bin"), "--model", str(built / "model.bin"),
                "--matrix", str(built / "m.tsv"), "--corpus", "bundled:sample", "--k", "5"]) == 0
    assert "self_retrieval=" in capsys.readouterr().out
    assert run(["gradcheck", "--models", "3", "--max-dims", "10,8,6,4,3"]) == 0
    m = re.search(r"max_rel_error=(\S+)", capsys.readouterr().out)
    assert float(m.group(1)) < 1e-4


def test_module_errors_exit_1(built, capsys, tmp_path):
    code = run(["query", "--index", str(built / "idx.bin"), "--model", str(built / "model.bin"),
                "--vocab", str(built / "vocab.tsv"), "--text", "em no como"])
    assert code == 1
    assert "empty query" in capsys.readouterr().err
    assert run(["vocab", "--corpus", str(tmp_path / "missing.jsonl"), "--out", "x"]) == 1


def test_usage_errors_exit_2(capsys):
    for argv in (["bogus"], ["train", "--nope"], []):
        with pytest.raises(SystemExit) as exc:
            run(argv)
        assert exc.value.code == 2


def test_config_file_and_flag_precedence(tmp_path, built, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# training defaults\nepochs=3\nhidden=16,12,10,8\nlr=1e-3\nseed=5\n", encoding="utf-8")
    base = ["train", "--config", str(cfg), "--matrix", str(built / "m.tsv")]
    assert run(base + ["--out", str(tmp_path / "a.bin")]) == 0
    assert capsys.readouterr().err.count("epoch=") == 3
    assert run(base + ["--epochs", "1", "--out", str(tmp_path / "b.bin")]) == 0
    assert capsys.readouterr().err.count("epoch=") == 1
    assert load_model(tmp_path / "a.bin").encoder_dims[1:] == [16, 12, 10, 8]


def test_global_seed_position(tmp_path, built):
    common = ["--matrix", str(built / "m.tsv"), "--epochs", "1", "--hidden", "8,8,8,4"]
    run(["--seed", "7", "train", *common, "--out", str(tmp_path / "a.bin")])
    run(["train", "--seed", "7", *common, "--out", str(tmp_path / "b.bin")])
    run(["train", *common, "--out", str(tmp_path / "c.bin")])
    a, b, c = ((tmp_path / f"{n}.bin").read_bytes() for n in "abc")
    assert a == b and a != c


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "expertrec.cli", "stats", "--corpus", "bundled:disjoint"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "Records" in res.stdout
