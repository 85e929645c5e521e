from __future__ import annotations

import json

import pytest

from worked_examples import SOURCE_A, TABLE_A
from simplemt.cli import main
from simplemt.dataset import DatasetExample, write_examples

TABLE_A_INITIAL = TABLE_A[0][1]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestAnalyze:
    def test_json_to_stdout(self, capsys, paper_lexicon_path):
        code, out = run(
            capsys, "analyze", "--text", TABLE_A_INITIAL, "--lexicon", str(paper_lexicon_path)
        )
        assert code == 0
        body = json.loads(out)
        assert body["max_word"] == "denote"
        assert body["success"] is False

    def test_missing_required_flag_exits_2(self, paper_lexicon_path):
        with pytest.raises(SystemExit) as err:
            main(["analyze", "--lexicon", str(paper_lexicon_path)])
        assert err.value.code == 2

    def test_missing_lexicon_is_domain_error(self, capsys):
        code, _ = run(capsys, "analyze", "--text", "hi", "--lexicon", "/nonexistent.csv")
        assert code == 1


class TestSimplify:
    def test_mock_loop(self, capsys, paper_lexicon_path, tmp_path):
        subs = tmp_path / "subs.json"
        subs.write_text(json.dumps({"denote": "show"}), encoding="utf-8")
        code, out = run(
            capsys,
            "simplify",
            "--text", TABLE_A_INITIAL,
            "--source", SOURCE_A,
            "--lexicon", str(paper_lexicon_path),
            "--subs", str(subs),
        )
        assert code == 0
        body = json.loads(out)
        assert body["success"] is True
        assert "show" in body["final_sentence"]

    def test_user_words(self, capsys, paper_lexicon_path, tmp_path):
        subs = tmp_path / "subs.json"
        subs.write_text(json.dumps({"term": "word"}), encoding="utf-8")
        code, out = run(
            capsys,
            "simplify",
            "--text", TABLE_A_INITIAL,
            "--source", SOURCE_A,
            "--lexicon", str(paper_lexicon_path),
            "--subs", str(subs),
            "--words", "term",
        )
        assert code == 0
        assert "word" in json.loads(out)["final_sentence"]

    def test_word_not_found_exits_1(self, capsys, paper_lexicon_path):
        code, _ = run(
            capsys,
            "simplify",
            "--text", "a plain sentence",
            "--source", SOURCE_A,
            "--lexicon", str(paper_lexicon_path),
            "--words", "zebra",
        )
        assert code == 1


class TestDataset:
    @pytest.fixture
    def records_path(self, tmp_path):
        path = tmp_path / "records.jsonl"
        examples = [
            DatasetExample(f"ref {i}", f"mid {i}", f"bt {i}", 9.0, 9.0 + d, d)
            for i, d in enumerate([1.96, 0.5, 0.0, 0.7, 2.5])
        ]
        write_examples(path, examples)
        return path

    def test_build_with_stub_maps(self, capsys, paper_lexicon_path, tmp_path):
        corpus = tmp_path / "corpus.txt"
        corpus.write_text(TABLE_A[8][1] + "\n", encoding="utf-8")
        fwd = tmp_path / "fwd.json"
        fwd.write_text(json.dumps({TABLE_A[8][1]: SOURCE_A}), encoding="utf-8")
        bwd = tmp_path / "bwd.json"
        bwd.write_text(json.dumps({SOURCE_A: TABLE_A_INITIAL}), encoding="utf-8")
        out = tmp_path / "examples.jsonl"
        code, payload = run(
            capsys,
            "dataset", "build",
            "--corpus", str(corpus),
            "--out", str(out),
            "--fwd-map", str(fwd),
            "--bwd-map", str(bwd),
            "--lexicon", str(paper_lexicon_path),
        )
        assert code == 0
        assert json.loads(payload)["built"] == 1
        record = json.loads(out.read_text().strip())
        assert record["aoa_diff"] == pytest.approx(1.96)

    def test_filter_counts(self, capsys, records_path, tmp_path):
        out = tmp_path / "kept.jsonl"
        code, payload = run(
            capsys,
            "dataset", "filter",
            "--in", str(records_path),
            "--out", str(out),
            "--threshold", "0.5",
        )
        assert code == 0
        counts = json.loads(payload)
        assert counts["kept"] == 3 and counts["dropped"] == 2  # 0.5 boundary dropped

    def test_split(self, capsys, tmp_path):
        path = tmp_path / "hundred.jsonl"
        write_examples(
            path,
            [DatasetExample(f"r{i}", f"m{i}", f"b{i}", 5.0, 7.0, 2.0) for i in range(100)],
        )
        outdir = tmp_path / "splits"
        code, payload = run(
            capsys, "dataset", "split", "--in", str(path), "--outdir", str(outdir), "--seed", "7"
        )
        assert code == 0
        assert json.loads(payload) == {"train": 80, "dev": 10, "test": 10}

    def test_select(self, capsys, tmp_path, paper_lexicon_path):
        path = tmp_path / "records.jsonl"
        write_examples(
            path,
            [
                DatasetExample("keep", "m", "b", 9.28, 11.24, 1.96),
                DatasetExample("drop", "m", "b", 10.0, 11.24, 1.24),
            ],
        )
        out = tmp_path / "selected.jsonl"
        code, payload = run(
            capsys,
            "dataset", "select",
            "--in", str(path), "--out", str(out),
            "--age", "10", "--lexicon", str(paper_lexicon_path),
        )
        assert code == 0
        assert json.loads(payload)["kept"] == 1


class TestEval:
    def test_run_and_compare(self, capsys, tmp_path, paper_lexicon_path, familiar_words_path):
        test_set = tmp_path / "test.jsonl"
        write_examples(
            test_set,
            [DatasetExample(TABLE_A[8][1], SOURCE_A, TABLE_A_INITIAL, 9.28, 11.24, 1.96)],
        )
        cfg = {
            "system": "initial",
            "lexicon_path": str(paper_lexicon_path),
            "familiar_words_path": str(familiar_words_path),
            "test_set_path": str(test_set),
            "output_dir": str(tmp_path / "run1"),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg), encoding="utf-8")
        code, payload = run(capsys, "eval", "run", "--config", str(cfg_path))
        assert code == 0
        assert json.loads(payload)["report"]["success_rate"] == 0.0

        code, table = run(capsys, "eval", "compare", str(tmp_path / "run1"), "--format", "tsv")
        assert code == 0
        assert "success_rate\t0.000" in table

    def test_bad_config_key_exits_1(self, capsys, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"bogus": 1}), encoding="utf-8")
        code, _ = run(capsys, "eval", "run", "--config", str(cfg_path))
        assert code == 1

    def test_hist(self, capsys, tmp_path, paper_lexicon_path):
        texts = tmp_path / "texts.txt"
        texts.write_text(TABLE_A_INITIAL + "\n", encoding="utf-8")
        code, out = run(
            capsys,
            "eval", "hist",
            "--in", str(texts),
            "--lexicon", str(paper_lexicon_path),
            "--bin-width", "1",
        )
        assert code == 0
        assert "11\t1" in out


class TestConfigMerging:
    def test_env_overrides_file_flags_override_env(self, capsys, tmp_path, paper_lexicon_path,
                                                   monkeypatch):
        other_lex = tmp_path / "other.csv"
        other_lex.write_text("easyword,3.0\n", encoding="utf-8")
        cfg = tmp_path / "cli.json"
        cfg.write_text(json.dumps({"lexicon": "/does/not/exist.csv"}), encoding="utf-8")
        monkeypatch.setenv("SIMPLEMT_LEXICON", str(other_lex))
        # env wins over the file
        code, out = run(capsys, "analyze", "--config", str(cfg), "--text", "easyword here")
        assert code == 0
        assert json.loads(out)["max_word"] == "easyword"
        # flag wins over env
        code, out = run(
            capsys, "analyze", "--config", str(cfg), "--text", "easyword here",
            "--lexicon", str(paper_lexicon_path),
        )
        assert code == 0
        assert json.loads(out)["max_word"] is None

    def test_unknown_config_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "cli.json"
        cfg.write_text(json.dumps({"mystery": True}), encoding="utf-8")
        code, _ = run(capsys, "analyze", "--config", str(cfg), "--text", "hello")
        assert code == 1
