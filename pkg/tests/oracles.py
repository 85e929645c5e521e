"""Independent brute-force reference implementations used to pin expected values.

Everything here recomputes metrics/searches with naive list scans and plain
dicts, deliberately avoiding the library's Counter-based aggregation paths.
"""

from __future__ import annotations

import math
import re

from simplemt.constrained import EOS
from simplemt.lexicon import normalize
from simplemt.textproc import tokenize


def toks(text: str) -> list[str]:
    return [t.surface for t in tokenize(text)]


def ngram_list(tokens: list[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def bleu_oracle(hypotheses: list[str], references: list[str]) -> float:
    clipped = [0] * 4
    total = [0] * 4
    hyp_len = 0
    ref_len = 0
    for h, r in zip(hypotheses, references):
        ht, rt = toks(h), toks(r)
        hyp_len += len(ht)
        ref_len += len(rt)
        for n in range(1, 5):
            hgrams = ngram_list(ht, n)
            rgrams = ngram_list(rt, n)
            total[n - 1] += len(hgrams)
            for g in set(hgrams):
                clipped[n - 1] += min(hgrams.count(g), rgrams.count(g))
    if hyp_len == 0:
        return 0.0
    precisions = [c / t if t else 0.0 for c, t in zip(clipped, total)]
    if min(precisions) == 0.0:
        return 0.0
    geo = (precisions[0] * precisions[1] * precisions[2] * precisions[3]) ** 0.25
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * bp * geo


def _count_dict(grams: list[tuple[str, ...]], scale: int = 1) -> dict:
    d: dict = {}
    for g in grams:
        d[g] = d.get(g, 0) + scale
    return d


def _min_dict(a: dict, b: dict) -> dict:
    return {g: min(c, b[g]) for g, c in a.items() if g in b and min(c, b[g]) > 0}


def _sub_dict(a: dict, b: dict) -> dict:
    out = {}
    for g, c in a.items():
        left = c - b.get(g, 0)
        if left > 0:
            out[g] = left
    return out


def sari_oracle(sources: list[str], hypotheses: list[str], references: list[list[str]]) -> float:
    totals = {key: [0] * 4 for key in (
        "add_good", "add_cand", "add_all",
        "keep_good", "keep_cand", "keep_all",
        "del_good", "del_cand",
    )}
    for src, hyp, refs in zip(sources, hypotheses, references):
        r = len(refs)
        st, ht = toks(src), toks(hyp)
        rts = [toks(x) for x in refs]
        for n in range(1, 5):
            s = _count_dict(ngram_list(st, n), scale=r)
            c = _count_dict(ngram_list(ht, n), scale=r)
            ref: dict = {}
            for rt in rts:
                for g, cnt in _count_dict(ngram_list(rt, n)).items():
                    ref[g] = ref.get(g, 0) + cnt

            add_cand = [g for g in c if g not in s]
            totals["add_cand"][n - 1] += len(add_cand)
            totals["add_good"][n - 1] += len([g for g in add_cand if g in ref])
            totals["add_all"][n - 1] += len([g for g in ref if g not in s])

            keep = _min_dict(s, c)
            totals["keep_cand"][n - 1] += sum(keep.values())
            totals["keep_good"][n - 1] += sum(_min_dict(keep, ref).values())
            totals["keep_all"][n - 1] += sum(_min_dict(s, ref).values())

            deleted = _sub_dict(s, c)
            totals["del_cand"][n - 1] += sum(deleted.values())
            totals["del_good"][n - 1] += sum(_sub_dict(deleted, ref).values())

    def ratio(num, den):
        return num / den if den > 0 else 0.0

    def f1(p, rr):
        return 2 * p * rr / (p + rr) if p + rr > 0 else 0.0

    score = 0.0
    for i in range(4):
        f_add = f1(ratio(totals["add_good"][i], totals["add_cand"][i]),
                   ratio(totals["add_good"][i], totals["add_all"][i]))
        f_keep = f1(ratio(totals["keep_good"][i], totals["keep_cand"][i]),
                    ratio(totals["keep_good"][i], totals["keep_all"][i]))
        p_del = ratio(totals["del_good"][i], totals["del_cand"][i])
        score += (f_add + f_keep + p_del) / 3.0
    return 100.0 * score / 4.0


_VOWEL_RUNS = re.compile(r"[aeiouy]+")


def syllables_oracle(word: str) -> int:
    w = word.lower()
    count = len(_VOWEL_RUNS.findall(w))
    if w.endswith("e") and not (len(w) >= 3 and w[-2] == "l" and w[-3] not in "aeiouy"):
        count -= 1
    return max(count, 1)


def fkgl_oracle(texts: list[str]) -> float:
    per_sentence_words = []
    per_sentence_syllables = []
    for text in texts:
        words = [t.surface for t in tokenize(text) if t.is_word]
        per_sentence_words.append(len(words))
        per_sentence_syllables.append(sum(syllables_oracle(w) for w in words))
    n_words = math.fsum(per_sentence_words)
    n_syll = math.fsum(per_sentence_syllables)
    return 0.39 * (n_words / len(texts)) + 11.8 * (n_syll / n_words) - 15.59


def dale_chall_oracle(texts: list[str], familiar: set[str]) -> float:
    n_words = 0
    n_difficult = 0
    for text in texts:
        for tok in tokenize(text):
            if not tok.is_word:
                continue
            n_words += 1
            if not any(c in familiar for c in normalize(tok.surface)):
                n_difficult += 1
    pct = 100.0 * n_difficult / n_words
    score = 0.1579 * pct + 0.0496 * (n_words / len(texts))
    if pct > 5.0:
        score += 3.6365
    return score


def exhaustive_search_oracle(model, constraint, max_len: int):
    """Enumerate every legal token sequence up to max_len; best (score, tokens)."""
    best: tuple[float, tuple[str, ...]] | None = None

    def consider(score: float, tokens: tuple[str, ...]) -> None:
        nonlocal best
        if best is None or score > best[0] or (score == best[0] and tokens < best[1]):
            best = (score, tokens)

    def rec(prefix: tuple[str, ...], score: float) -> None:
        scores = model.log_scores(prefix)
        eos = scores.get(EOS, -math.inf)
        if math.isfinite(score + eos):
            consider(score + eos, prefix)
        if len(prefix) >= max_len:
            return
        for token in model.vocabulary:
            lp = scores.get(token, -math.inf)
            if not math.isfinite(score + lp) or constraint(token):
                continue
            rec(prefix + (token,), score + lp)

    rec((), 0.0)
    return best
