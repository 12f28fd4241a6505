import pytest
from hypothesis import given, strategies as st

from hatescope.errors import FormatError
from hatescope.lexicon import (
    CategoryLexicon,
    SentimentLexicon,
    category_profile,
    demo_categories,
    demo_emoji,
    demo_sentiment,
    negativity_markers,
    polarity,
    style_profile,
)
from hatescope.synthetic import filler_vocabulary

LEX = demo_sentiment()
CATS = demo_categories()
CRIED = {"Affective", "Negative", "Past", "Sadness", "Verb"}


def test_polarity_examples():
    assert polarity("good", LEX) == (0.5, 1)
    score, hits = polarity("good good bad", LEX)
    assert hits == 3 and score == pytest.approx(0.5 / 3, abs=1e-12)
    assert polarity("the cat sat", LEX) == (0.0, 0)
    assert polarity("", LEX) == (0.0, 0)


def test_polarity_prefix_and_case():
    lex = SentimentLexicon({"enjoy*": 0.6, "enjoyable": 0.9})
    assert polarity("Enjoying it", lex) == (0.6, 1)
    # exact entry beats the prefix
    assert polarity("ENJOYABLE", lex) == (0.9, 1)


def test_override_removes_and_rescores():
    lex = SentimentLexicon({"apartheid": -0.8, "bad": -0.5})
    assert polarity("apartheid", lex.override({"apartheid": None})) == (0.0, 0)
    assert polarity("apartheid", lex.override({"apartheid": 0.0})) == (0.0, 1)
    assert polarity("apartheid", lex) == (-0.8, 1)


def test_lexicon_validation(tmp_path):
    with pytest.raises(FormatError):
        SentimentLexicon({"good": 1.5})
    with pytest.raises(FormatError):
        SentimentLexicon({"ab*": 0.1})
    with pytest.raises(FormatError):
        SentimentLexicon({"two words": 0.1})
    with pytest.raises(FormatError):
        CategoryLexicon({"cried": [""]})
    p = tmp_path / "s.tsv"
    p.write_text("good\t0.5\nbad\tnope\n", encoding="utf-8")
    with pytest.raises(FormatError, match="line 2"):
        SentimentLexicon.load(p)


def test_demo_lexicon_sizes():
    assert 90 <= len(LEX) <= 110
    assert 40 <= len(CATS) <= 60
    assert 10 <= len(demo_emoji()) <= 16
    assert LEX.entries["good"] == 0.5 and LEX.entries["bad"] == -0.5


def test_filler_never_hits_demo_lexicons():
    for seed in range(5):
        text = " ".join(filler_vocabulary(seed=seed))
        assert polarity(text, LEX)[1] == 0
        assert category_profile(text, CATS) == {}


words = st.sampled_from(sorted(e for e in LEX.entries if not e.endswith("*")) + ["cat", "sat", "zork"])
texts = st.lists(words, max_size=15).map(" ".join)


@given(texts)
def test_polarity_bounded(text):
    score, _ = polarity(text, LEX)
    lo, hi = min(LEX.entries.values()), max(LEX.entries.values())
    assert min(lo, 0.0) <= score <= max(hi, 0.0)


@given(texts, st.floats(0.01, 1.0))
def test_polarity_scales(text, c):
    s1, m1 = polarity(text, LEX)
    s2, m2 = polarity(text, LEX.scaled(c))
    assert m1 == m2
    assert s2 == pytest.approx(c * s1, abs=1e-12)


@given(texts, texts)
def test_polarity_additive(t1, t2):
    s1, m1 = polarity(t1, LEX)
    s2, m2 = polarity(t2, LEX)
    s, m = polarity(t1 + " " + t2, LEX)
    assert m == m1 + m2
    if m:
        assert s == pytest.approx((s1 * m1 + s2 * m2) / m, abs=1e-12)


def test_category_examples():
    assert category_profile("cried", CATS) == {c: 1.0 for c in CRIED}
    assert category_profile("cried loudly", CATS) == {c: 0.5 for c in CRIED}
    assert category_profile("", CATS) == {}


cat_words = st.sampled_from(sorted(e for e in CATS.entries if not e.endswith("*")) + ["loudly", "zork"])


@given(st.lists(cat_words, min_size=1, max_size=12), st.randoms(use_true_random=False))
def test_category_order_invariant(ws, rnd):
    prof = category_profile(" ".join(ws), CATS)
    assert all(0 < r <= 1 for r in prof.values())
    shuffled = ws[:]
    rnd.shuffle(shuffled)
    assert category_profile(" ".join(shuffled), CATS) == pytest.approx(prof)


def test_negativity_examples():
    m = negativity_markers("UTTER NONSENSE!!!")
    assert (m.allcaps_ratio, m.exclamation_density, m.angry_emoji_count) == (1.0, 1.5, 0)
    m = negativity_markers("a calm sentence.")
    assert (m.allcaps_ratio, m.exclamation_density, m.angry_emoji_count) == (0.0, 0.0, 0)
    angry = demo_emoji()[0]
    assert negativity_markers(f"what {angry} is this {angry}").angry_emoji_count == 2
    assert negativity_markers("angry \U0001F600", emoji=["\U0001F600"]).angry_emoji_count == 1


def test_acronyms_ignored_for_caps():
    assert negativity_markers("the US is big").allcaps_ratio == 0.0
    assert negativity_markers("NOT just nonsense").allcaps_ratio == pytest.approx(1 / 3)


@given(st.text(alphabet="abcdefgh xyz", max_size=40))
def test_lowercase_unpunctuated_is_calm(text):
    m = negativity_markers(text)
    assert m.allcaps_ratio == 0.0 and m.exclamation_density == 0.0


def test_style_examples():
    assert style_profile("I love my dog")["personal_pronoun_rate"] == 0.5
    p = style_profile("the few the most")
    assert p["determiner_rate"] == 0.5 and p["quantifier_rate"] == 0.5
    assert style_profile("") == {"personal_pronoun_rate": 0.0, "determiner_rate": 0.0, "quantifier_rate": 0.0}
