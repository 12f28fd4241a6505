import csv
import json

import pytest

from hatescope.cli import build_parser, main
from hatescope.embed import save_embeddings
from hatescope.synthetic import PLANTED_KEYWORDS, blob_embeddings, keyword_corpora, maga_like_corpus

SUBCOMMANDS = [
    "ingest", "timeline", "train", "crossval", "predict", "keywords", "collocations", "expand",
    "neighbors", "cluster", "project", "sentiment", "profile", "wordtree", "export-tree",
    "highlight", "report",
]


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    # headerless tweet dumps: text at column 2, leaning label at column 8
    for name, n in (("maga.csv", 600), ("maga_big.csv", 3000)):
        with open(d / name, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f)
            for i, doc in enumerate(maga_like_corpus(n, noise=0.1, seed=5)):
                w.writerow([f"id{i}", "user", doc.text, "", "", "", "", "", doc.label, "x"])
            w.writerow(["junk", "user", "ignored", "", "", "", "", "", "center", "x"])
    a, b = keyword_corpora(400, seed=0)
    (d / "hate.jsonl").write_text(a.to_jsonl(), encoding="utf-8")
    (d / "safe.jsonl").write_text(b.to_jsonl(), encoding="utf-8")
    dated = "\n".join(
        json.dumps({"id": str(i), "text": "women are x. women can z!", "timestamp": f"2019-0{1 + i % 3}-1{i % 5}"})
        for i in range(20)
    )
    (d / "dated.jsonl").write_text(dated + "\n", encoding="utf-8")
    table, _ = blob_embeddings((3, 3), dim=6, seed=0)
    save_embeddings(table, d / "vec.txt")
    return d


def test_no_args_exit_1(capsys):
    code, out, err = run(capsys)
    assert code == 1 and "usage" in err


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help_every_subcommand(cmd, capsys):
    code, out, _ = run(capsys, cmd, "--help")
    assert code == 0 and "usage" in out
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command").choices[cmd]
    for action in sub._actions:
        for flag in action.option_strings:
            assert flag in out


def test_unknown_flag_exit_1(capsys, files):
    code, _, err = run(capsys, "keywords", files / "hate.jsonl", files / "safe.jsonl", "--bogus")
    assert code == 1 and "bogus" in err


def test_crossval_tree_pipeline(capsys, files):
    code, out, _ = run(
        capsys, "crossval", "--model", "tree", "--k", "3", "--min-leaf", "100", "--text-col", "2",
        "--label-col", "8", "--label-prefixes", "left,right", "--no-header", files / "maga_big.csv", "--pretty",
    )
    assert code == 0
    assert "precision" in out.lower() and "recall" in out.lower()
    assert "left-wing" in out and "right-wing" in out and "center" not in out
    code, out, _ = run(
        capsys, "crossval", "--model", "tree", "--k", "3", "--min-leaf", "100", "--text-col", "2",
        "--label-col", "8", "--label-prefixes", "left,right", "--no-header", files / "maga_big.csv",
    )
    result = json.loads(out)
    assert result["macro"]["f1"] > 0.8


def test_keywords_top10(capsys, files):
    code, out, _ = run(capsys, "keywords", files / "hate.jsonl", files / "safe.jsonl",
                       "--min-count", "5", "--alpha", "0.05", "--top", "10")
    assert code == 0
    top = {row["word"] for row in json.loads(out)}
    assert set(PLANTED_KEYWORDS) <= top
    code, out, _ = run(capsys, "keywords", files / "hate.jsonl", files / "safe.jsonl", "--csv", "--top", "3")
    assert out.splitlines()[0].startswith("word,count_a,count_b,chi2")


def test_train_predict_export(capsys, files, tmp_path):
    model = tmp_path / "tree.json"
    common = ["--text-col", "2", "--label-col", "8", "--label-prefixes", "left,right", "--no-header"]
    code, _, _ = run(capsys, "train", "--model", "tree", "--min-leaf", "20", *common, files / "maga.csv", "--out", model)
    assert code == 0 and model.exists()
    code, out, _ = run(capsys, "export-tree", model, "--to", "dot")
    assert code == 0 and out.startswith("digraph tree {") and "w1:#" in out
    code, out, _ = run(capsys, "predict", model, *common, files / "maga.csv")
    assert code == 0 and len(out.strip()) > 0


def test_data_error_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "1", "text": "ok"}\n{"id": "1", "text": "dup"}\n', encoding="utf-8")
    code, _, err = run(capsys, "ingest", bad)
    assert code == 2 and "line 2" in err
    code, _, _ = run(capsys, "ingest", tmp_path / "missing.jsonl")
    assert code == 2


def test_bad_parameter_exit_1(capsys, files):
    code, _, _ = run(capsys, "cluster", files / "vec.txt", "--k", "99")
    assert code == 1


def _invocations(files, tmp_path):
    model = tmp_path / "m.json"
    return [
        ["ingest", files / "hate.jsonl"],
        ["timeline", files / "dated.jsonl", "--daily", "--spikes"],
        ["train", "--text-col", "2", "--label-col", "8", "--no-header", "--label-prefixes", "left,right",
         files / "maga.csv", "--model", "svm", "--epochs", "3", "--out", model],
        ["crossval", "--text-col", "2", "--label-col", "8", "--no-header", "--label-prefixes", "left,right",
         files / "maga.csv", "--model", "perceptron", "--k", "3"],
        ["predict", model, "--text-col", "2", "--label-col", "8", "--no-header", files / "maga.csv"],
        ["keywords", files / "hate.jsonl", files / "safe.jsonl"],
        ["collocations", files / "hate.jsonl", "--top", "10"],
        ["expand", files / "vec.txt", "--seeds", "c0_0,nope", "--k", "5", "--threshold", "0.8"],
        ["neighbors", files / "vec.txt", "c1_0", "--k", "2"],
        ["cluster", files / "vec.txt", "--k", "2"],
        ["project", files / "vec.txt"],
        ["sentiment", files / "hate.jsonl", "--override", "good=0.1"],
        ["profile", files / "hate.jsonl"],
        ["wordtree", files / "dated.jsonl", "--keyword", "women"],
        ["highlight", "--text", "die kuffar! parasiten"],
        ["report", files / "hate.jsonl", "--reference", files / "safe.jsonl", "--demo-lexicon", "--markers"],
    ]


def test_all_subcommands_byte_identical(capsys, files, tmp_path):
    invocations = _invocations(files, tmp_path)
    assert {argv[0] for argv in invocations} | {"export-tree"} == set(SUBCOMMANDS)
    for argv in invocations:
        first = run(capsys, *argv, "--seed", "3")
        model_bytes = (tmp_path / "m.json").read_bytes() if argv[0] == "train" else None
        second = run(capsys, *argv, "--seed", "3")
        assert first[0] == 0, (argv, first[2])
        assert first == second, argv
        if model_bytes is not None:
            assert (tmp_path / "m.json").read_bytes() == model_bytes


def test_wordtree_and_highlight_content(capsys, files):
    code, out, _ = run(capsys, "wordtree", files / "dated.jsonl", "--keyword", "women", "--max-depth", "2")
    tree = json.loads(out)
    assert tree["count"] == 40
    assert [c["token"] for c in tree["children"]] == ["are", "can"]
    code, out, _ = run(capsys, "highlight", "--text", "die kuffar!")
    spans = json.loads(out)
    assert spans[0]["start"] == 4 and spans[0]["end"] == 10 and spans[0]["category"] == "slur"


def test_config_precedence(capsys, files, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"keywords": {"top": 2}}), encoding="utf-8")
    args = ["keywords", files / "hate.jsonl", files / "safe.jsonl"]
    _, out, _ = run(capsys, *args, "--config", cfg)
    assert len(json.loads(out)) == 2
    _, out, _ = run(capsys, *args, "--config", cfg, "--top", "4")
    assert len(json.loads(out)) == 4
    monkeypatch.setenv("HATESCOPE_CONFIG", str(cfg))
    _, out, _ = run(capsys, *args)
    assert len(json.loads(out)) == 2
    monkeypatch.delenv("HATESCOPE_CONFIG")
    _, out, _ = run(capsys, *args)
    assert len(json.loads(out)) > 4


def test_config_unknown_key(capsys, files, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nonsense": 1}), encoding="utf-8")
    code, _, err = run(capsys, "ingest", files / "hate.jsonl", "--config", cfg)
    assert code == 1 and "nonsense" in err
