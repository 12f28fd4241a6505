import math
import random

import pytest
from hypothesis import given, strategies as st
from scipy.stats import chi2_contingency

from hatescope.corpus import Corpus
from hatescope.errors import DatasetError, ParameterError
from hatescope.keywords import (
    KeywordLexicon,
    chi_square,
    collocations,
    demo_keywords,
    extract_keywords,
    highlight,
    keywords_csv,
    posterior,
)
from hatescope.synthetic import keyword_corpora


def chi2_oracle(a, b, c, d):
    """Textbook sum of (observed - expected)^2 / expected over the four cells."""
    table = [[a, b], [c, d]]
    n = a + b + c + d
    rows = [a + b, c + d]
    cols = [a + c, b + d]
    total = 0.0
    for i in range(2):
        for j in range(2):
            e = rows[i] * cols[j] / n
            total += (table[i][j] - e) ** 2 / e
    return total


def test_hand_table_exact():
    assert chi_square(30, 70, 10, 90) == 12.5


def test_no_association():
    assert chi_square(20, 50, 20, 50) == 0.0


def test_kuffar_table():
    x2 = chi_square(1500, 48500, 25, 49975)
    assert x2 == pytest.approx(1448.7, abs=0.05)
    assert x2 == pytest.approx(chi2_oracle(1500, 48500, 25, 49975), abs=1e-9)
    assert x2 == pytest.approx(chi2_contingency([[1500, 48500], [25, 49975]], correction=False)[0], rel=1e-12)
    assert x2 > 3.841


def test_zero_marginal():
    with pytest.raises(ParameterError):
        chi_square(0, 0, 3, 4)
    with pytest.raises(ParameterError):
        chi_square(0, 5, 0, 4)


cells = st.integers(0, 10_000)


@given(cells, cells, cells, cells)
def test_matches_oracle_symmetric_and_scales(a, b, c, d):
    if min(a + b, c + d, a + c, b + d) == 0:
        return
    x2 = chi_square(a, b, c, d)
    assert x2 >= 0
    assert abs(x2 - chi2_oracle(a, b, c, d)) <= 1e-9 * max(1.0, x2)
    assert chi_square(c, d, a, b) == pytest.approx(x2, rel=1e-12, abs=1e-12)
    for k in (2, 3, 5):
        assert chi_square(k * a, k * b, k * c, k * d) == pytest.approx(k * x2, rel=1e-12, abs=1e-9)


def test_posterior_values():
    assert posterior(1500, 50000, 25, 50000) == pytest.approx(0.03 / 0.0305, abs=1e-12)
    assert posterior(1500, 50000, 25, 50000) == pytest.approx(0.9836, abs=1e-4)
    assert posterior(10, 100, 20, 200) == 0.5
    assert posterior(3, 100, 0, 80) == 1.0
    assert posterior(0, 10, 0, 10) == 0.5
    with pytest.raises(ParameterError):
        posterior(1, 0, 1, 10)


@given(st.integers(0, 100), st.integers(0, 100), st.integers(100, 1000))
def test_posterior_complement(ca, cb, n):
    assert posterior(ca, n, cb, n) + posterior(cb, n, ca, n) == pytest.approx(1.0, abs=1e-12)


@pytest.fixture(scope="module")
def planted_pair():
    return keyword_corpora(2000, seed=0)


def test_planted_keywords_rank_top(planted_pair):
    a, b = planted_pair
    stats = extract_keywords(a, b, min_count=5, alpha=0.05)
    top = {s.word for s in stats[:10]}
    for w in ("kuffar", "vermin", "gesindel", "kakkerlakken", "murtadd"):
        assert w in top
    for s in stats[:5]:
        assert s.significant and s.direction == "a"


def test_extract_keywords_oracle_and_order(planted_pair):
    a, b = planted_pair
    stats = extract_keywords(a, b, min_count=5)
    for s in stats:
        assert s.count_a <= s.n_a and s.count_b <= s.n_b
        if min(s.count_a + s.count_b, s.n_a + s.n_b - s.count_a - s.count_b) > 0:
            ref = chi2_oracle(s.count_a, s.n_a - s.count_a, s.count_b, s.n_b - s.count_b)
            assert abs(s.chi2 - ref) < 1e-9
        assert s.significant == (s.chi2 > 3.841)
    keys = [(-s.chi2, s.word) for s in stats]
    assert keys == sorted(keys)
    assert stats == extract_keywords(a, b, min_count=5)


def test_identical_corpora_no_significant(planted_pair):
    a, _ = planted_pair
    assert not any(s.significant for s in extract_keywords(a, a))


def test_kuffar_embedded_in_large_corpora():
    filler = [f"w{i}" for i in range(30)]
    rng = random.Random(0)

    def docs(n, hits):
        out = [" ".join(rng.sample(filler, 4)) for _ in range(n)]
        return [("kuffar " + d) if i < hits else d for i, d in enumerate(out)]

    stats = extract_keywords(Corpus.from_texts(docs(50_000, 1500)), Corpus.from_texts(docs(50_000, 25)))
    first = stats[0]
    assert first.word == "kuffar"
    assert (first.count_a, first.count_b) == (1500, 25)
    assert first.chi2 == pytest.approx(1448.7, abs=0.05)
    assert first.significant and first.chi2 > 10 * stats[1].chi2


def test_token_unit_counts_occurrences():
    a = Corpus.from_texts(["x x x y"] * 10)
    b = Corpus.from_texts(["y y"] * 10)
    s = {k.word: k for k in extract_keywords(a, b, unit="token", min_count=1)}
    assert (s["x"].count_a, s["x"].n_a, s["y"].count_b, s["y"].n_b) == (30, 40, 20, 20)


def test_keyword_errors():
    c = Corpus.from_texts(["a"])
    with pytest.raises(DatasetError):
        extract_keywords(c, Corpus())
    with pytest.raises(ParameterError):
        extract_keywords(c, c, alpha=0.1)


def test_keywords_csv_columns():
    s = extract_keywords(Corpus.from_texts(["a b"] * 6), Corpus.from_texts(["b"] * 6), min_count=1)
    lines = keywords_csv(s).splitlines()
    assert lines[0] == "word,count_a,count_b,chi2,significant,posterior,direction"
    assert lines[1].startswith("a,6,0,12.0,true,1.0,a")


# -- collocations --------------------------------------------------------------


def test_bruine_aap_pmi():
    filler = [f"f{i}" for i in range(90)]
    tokens = []
    for i in range(5):
        tokens += ["bruine", "aap"] + filler[i * 18:(i + 1) * 18]
    assert len(tokens) == 100
    cols = collocations(Corpus.from_texts([" ".join(tokens)]), min_count=5)
    assert cols[0].left == "bruine" and cols[0].right == "aap"
    assert cols[0].count == 5
    assert cols[0].pmi == pytest.approx(math.log2(20), abs=1e-12)
    assert len(cols) == 1


def test_independence_pmi_zero():
    # N = 100 tokens, c(x) = c(y) = 10, c(x y) = 1 -> p(x,y) = p(x) p(y)
    docs = ["x y"] + ["x"] * 9 + ["y"] * 9 + [" ".join(f"z{i}" for i in range(80))]
    cols = collocations(Corpus.from_texts(docs), min_count=1)
    xy = next(c for c in cols if (c.left, c.right) == ("x", "y"))
    assert abs(xy.pmi) < 1e-9


def test_below_min_count_excluded():
    cols = collocations(Corpus.from_texts(["white devil"] * 4 + ["black cat"] * 5), min_count=5)
    assert [(c.left, c.right) for c in cols] == [("black", "cat")]


def test_pairs_do_not_cross_documents():
    cols = collocations(Corpus.from_texts(["a b", "c d"] * 5), min_count=1)
    assert ("b", "c") not in {(c.left, c.right) for c in cols}


# -- highlight -----------------------------------------------------------------


def test_highlight_kuffar():
    lex = KeywordLexicon({"kuffar": "slur"})
    spans = highlight("die kuffar!", lex)
    assert len(spans) == 1
    s = spans[0]
    assert (s.start, s.end, s.matched_entry, s.category) == (4, 10, "kuffar", "slur")
    assert "die kuffar!"[s.start:s.end] == "kuffar"


def test_highlight_no_hits():
    assert highlight("nothing to see", demo_keywords()) == []


def test_prefix_entry():
    spans = highlight("Die PARASITEN!", KeywordLexicon({"parasit*": "dehumanizing"}))
    assert [(s.start, s.end, s.matched_entry) for s in spans] == [(4, 13, "parasit*")]


def test_longest_match_wins():
    lex = KeywordLexicon({"bruine": None, "bruine aap": "slur", "bru*": None})
    spans = highlight("een bruine aap en bruinen", lex)
    assert [(s.matched_entry, s.category) for s in spans] == [("bruine aap", "slur"), ("bru*", None)]


def test_keyword_lexicon_tsv(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("kuffar\tslur\nhorde*\tstereotyping\nplainword\n", encoding="utf-8")
    lex = KeywordLexicon.load(p)
    assert lex.entries == {"kuffar": "slur", "horde*": "stereotyping", "plainword": None}


words = st.sampled_from(["dog", "dogs", "pig", "scum", "the", "a", "kuffar", "vermin", "ok"])


@given(st.lists(st.one_of(words, st.text(max_size=5)), max_size=20),
       st.lists(st.sampled_from(["dog", "dogs", "pig*", "scu*", "the dog*", "kuffar", "a pig"]), max_size=5))
def test_highlight_spans_valid(parts, entries):
    text = " ".join(parts)
    lex = KeywordLexicon({e: "x" for e in entries})
    spans = highlight(text, lex)
    for s in spans:
        assert 0 <= s.start < s.end <= len(text)
    for s1, s2 in zip(spans, spans[1:]):
        assert s1.end <= s2.start
