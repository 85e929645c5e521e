from __future__ import annotations

import json

import pytest

from worked_examples import SOURCE_A, TABLE_A
from simplemt.dataset import (
    DatasetExample,
    IdentityMtClient,
    MtTransportError,
    ScriptedMtClient,
    build_examples,
    filter_pairs,
    read_examples,
    select_target_age,
    split,
    write_examples,
)
from simplemt.lexicon import AoaLexicon
from simplemt.metrics import success_rate

REFERENCE = TABLE_A[8][1]  # max "specific" 9.28
BACK_TRANSLATION = TABLE_A[0][1]  # max "denote" 11.24


@pytest.fixture
def paper_pair_clients():
    fwd = ScriptedMtClient({REFERENCE: SOURCE_A}, direction="en-ja")
    bwd = ScriptedMtClient({SOURCE_A: BACK_TRANSLATION}, direction="ja-en")
    return fwd, bwd


def make(diff, ref_max=5.0, tag="x"):
    bt_max = None if diff is None else ref_max + diff
    return DatasetExample(
        reference=f"ref {tag}",
        intermediate=f"mid {tag}",
        back_translation=f"bt {tag}",
        ref_max_aoa=ref_max if diff is not None else None,
        bt_max_aoa=bt_max,
        aoa_diff=diff if diff is not None else 0.0,
    )


class TestBuildExamples:
    def test_paper_diff(self, paper_lexicon, paper_pair_clients):
        fwd, bwd = paper_pair_clients
        examples = build_examples([REFERENCE], fwd, bwd, paper_lexicon)
        assert len(examples) == 1
        ex = examples[0]
        assert ex.intermediate == SOURCE_A
        assert ex.back_translation == BACK_TRANSLATION
        assert ex.ref_max_aoa == 9.28
        assert ex.bt_max_aoa == 11.24
        assert ex.aoa_diff == pytest.approx(1.96)

    def test_identity_clients_give_zero_diff(self, paper_lexicon):
        sentences = [s for _, s, _, _ in TABLE_A[:4]]
        examples = build_examples(sentences, IdentityMtClient(), IdentityMtClient(), paper_lexicon)
        assert all(ex.aoa_diff == 0.0 for ex in examples)

    def test_unrated_reference_diff_zero(self, paper_lexicon):
        examples = build_examples(
            ["zz qq unknown words"], IdentityMtClient(), IdentityMtClient(), paper_lexicon
        )
        assert examples[0].aoa_diff == 0.0
        assert examples[0].ref_max_aoa is None

    def test_failures_skipped_and_counted(self, paper_lexicon):
        class Flaky:
            direction = "fwd"

            def translate(self, text):
                if "bad" in text:
                    raise MtTransportError("nope")
                return text

        corpus = ["good one", "bad one", "good two"]
        examples = build_examples(corpus, Flaky(), IdentityMtClient(), paper_lexicon,
                                  max_failure_ratio=0.5)
        assert [e.reference for e in examples] == ["good one", "good two"]

    def test_failure_ceiling_aborts(self, paper_lexicon):
        class Dead:
            direction = "fwd"

            def translate(self, text):
                raise MtTransportError("always")

        with pytest.raises(RuntimeError, match="failure rate"):
            build_examples(["a", "b"], Dead(), IdentityMtClient(), paper_lexicon,
                           max_failure_ratio=0.2)

    def test_parallel_preserves_order(self, paper_lexicon):
        corpus = [f"sentence number {i}" for i in range(40)]
        sequential = build_examples(corpus, IdentityMtClient(), IdentityMtClient(), paper_lexicon)
        parallel = build_examples(corpus, IdentityMtClient(), IdentityMtClient(), paper_lexicon,
                                  jobs=8)
        assert sequential == parallel

    def test_checkpoint_resume(self, paper_lexicon, tmp_path):
        ckpt = tmp_path / "ckpt.jsonl"
        corpus = [f"s {i}" for i in range(6)]

        class DiesAfter3(IdentityMtClient):
            calls = 0

            def translate(self, text):
                DiesAfter3.calls += 1
                if DiesAfter3.calls > 3:
                    raise KeyboardInterrupt
                return text

        with pytest.raises(KeyboardInterrupt):
            build_examples(corpus, DiesAfter3(), IdentityMtClient(), paper_lexicon,
                           checkpoint_path=ckpt)
        processed_before = sum(1 for _ in ckpt.open())
        assert 0 < processed_before < len(corpus)
        resumed = build_examples(corpus, IdentityMtClient(), IdentityMtClient(), paper_lexicon,
                                 checkpoint_path=ckpt)
        fresh = build_examples(corpus, IdentityMtClient(), IdentityMtClient(), paper_lexicon)
        assert resumed == fresh


class TestFilter:
    def test_kept_and_dropped(self):
        examples = [make(1.96), make(0.5), make(0.0), make(0.51), make(None)]
        kept = filter_pairs(examples, 0.5)
        assert [e.aoa_diff for e in kept] == [1.96, 0.51]

    def test_exact_boundary_dropped(self):
        assert filter_pairs([make(0.5)], 0.5) == []

    def test_order_preserving_and_idempotent(self):
        examples = [make(d, tag=str(i)) for i, d in enumerate([3.0, 0.2, 1.0, 0.7])]
        kept = filter_pairs(examples, 0.5)
        assert kept == [examples[0], examples[2], examples[3]]
        assert filter_pairs(kept, 0.5) == kept

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError):
            filter_pairs([], -1)


class TestSplit:
    def test_100_is_80_10_10(self):
        examples = [make(1.0, tag=str(i)) for i in range(100)]
        result = split(examples, seed=42)
        assert (len(result.train), len(result.dev), len(result.test)) == (80, 10, 10)

    def test_10_is_8_1_1(self):
        examples = [make(1.0, tag=str(i)) for i in range(10)]
        result = split(examples, seed=0)
        assert (len(result.train), len(result.dev), len(result.test)) == (8, 1, 1)

    def test_partition(self):
        examples = [make(1.0, tag=str(i)) for i in range(37)]
        result = split(examples, seed=7)
        combined = result.train + result.dev + result.test
        assert len(combined) == 37
        assert {e.reference for e in combined} == {e.reference for e in examples}

    def test_seed_stable(self):
        examples = [make(1.0, tag=str(i)) for i in range(50)]
        assert split(examples, seed=3) == split(examples, seed=3)
        assert split(examples, seed=3) != split(examples, seed=4)

    def test_too_few(self):
        with pytest.raises(ValueError):
            split([make(1.0)] * 9, seed=0)


class TestSelectTargetAge:
    def test_paper_values_kept(self):
        ex = DatasetExample("r", "m", "b", ref_max_aoa=9.28, bt_max_aoa=11.24, aoa_diff=1.96)
        assert select_target_age([ex], 10) == [ex]

    def test_easy_bt_dropped(self):
        ex = DatasetExample("r", "m", "b", ref_max_aoa=8.0, bt_max_aoa=9.0, aoa_diff=1.0)
        assert select_target_age([ex], 10) == []

    def test_boundary_ref_dropped(self):
        ex = DatasetExample("r", "m", "b", ref_max_aoa=10.0, bt_max_aoa=11.24, aoa_diff=1.24)
        assert select_target_age([ex], 10) == []

    def test_missing_maxima_dropped(self):
        ex = DatasetExample("r", "m", "b", ref_max_aoa=None, bt_max_aoa=None, aoa_diff=0.0)
        assert select_target_age([ex], 10) == []

    def test_survivors_fail_success_rate(self, paper_lexicon):
        # cross-module consistency: a selected back-translation can never score
        # as already-simple at the same age
        ex = DatasetExample(
            reference=REFERENCE,
            intermediate=SOURCE_A,
            back_translation=BACK_TRANSLATION,
            ref_max_aoa=9.28,
            bt_max_aoa=11.24,
            aoa_diff=1.96,
        )
        for survivor in select_target_age([ex], 10):
            assert success_rate([survivor.back_translation], paper_lexicon, 10) == 0.0


class TestChatMtClient:
    def test_wraps_backend_errors_and_trims(self):
        from simplemt.dataset import ChatMtClient
        from simplemt.rewriter import BackendTransportError

        client = ChatMtClient("http://unused.test", "some-model", direction="en-ja")

        class Scripted:
            def __init__(self, result=None, error=None):
                self.result, self.error = result, error

            def complete(self, prompt):
                assert prompt.endswith("hello world")
                if self.error:
                    raise self.error
                return self.result

        client._backend = Scripted(result="  こんにちは世界 \nextra")
        assert client.translate("hello world") == "こんにちは世界"

        client._backend = Scripted(error=BackendTransportError("down"))
        with pytest.raises(MtTransportError):
            client.translate("hello world")


class TestIo:
    def test_round_trip(self, tmp_path):
        examples = [make(1.5, tag="a"), make(None, tag="b")]
        path = tmp_path / "examples.jsonl"
        write_examples(path, examples)
        assert read_examples(path) == examples

    def test_line_delimited_json(self, tmp_path):
        path = tmp_path / "examples.jsonl"
        write_examples(path, [make(1.0)])
        line = path.read_text().strip()
        record = json.loads(line)
        assert set(record) == {
            "reference", "intermediate", "back_translation", "ref_max_aoa", "bt_max_aoa", "aoa_diff",
        }
