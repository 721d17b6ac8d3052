from collections import Counter

import emoji
import numpy as np
import pytest

from analysis.emojis import (
    count_emojis,
    emoji_counter,
    emoji_keys,
    export_ranked_csv,
    extract_emoji,
    is_emoji_token,
    iter_emoji_spans,
    load_sentiment,
    rank_counter,
    rank_top_k,
    sentiment_of,
    total_counts_table,
)
from models.entities import EmojiKind, Label

from conftest import scaled


ZWJ = "\u200d"
KEYCAP = "\u20e3"


def fully_qualified_sequences():
    status = emoji.STATUS["fully_qualified"]
    return sorted(seq for seq, data in emoji.EMOJI_DATA.items() if data.get("status") == status)


# ---------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------


def test_examples():
    flag = extract_emoji("\U0001F1EB\U0001F1F7")
    assert len(flag) == 1 and flag[0].kind is EmojiKind.FLAG
    assert flag[0].codepoints_hex == "1F1EB-1F1F7"

    assert extract_emoji("") == []

    mixed = extract_emoji("👍🏽x🙏")
    assert [s.kind for s in mixed] == [EmojiKind.MODIFIER_SEQUENCE, EmojiKind.SINGLE]
    assert [s.codepoints for s in mixed] == [(0x1F44D, 0x1F3FD), (0x1F64F,)]

    family = extract_emoji("👨‍👩‍👦")
    assert len(family) == 1
    assert family[0].kind is EmojiKind.ZWJ_SEQUENCE
    assert len(family[0].codepoints) == 5


def test_variation_selectors_merge_keys():
    assert emoji_keys("❤ ❤️") == ["❤", "❤"]
    keycap = extract_emoji("#️⃣")
    assert keycap[0].kind is EmojiKind.KEYCAP
    assert keycap[0].key == "#" + KEYCAP


def test_unpaired_regional_indicator_is_single():
    seqs = extract_emoji("\U0001F1EB \U0001F1FA\U0001F1F8\U0001F1EB")
    assert [s.kind for s in seqs] == [EmojiKind.SINGLE, EmojiKind.FLAG, EmojiKind.SINGLE]


def test_plain_text_has_no_emoji():
    assert extract_emoji("Stay safe, Florida! #Irma 100% 2017") == []
    assert not is_emoji_token("safe")
    assert is_emoji_token("🙏🏽")
    assert not is_emoji_token("🙏🙏")


def test_unicode_data_conformance():
    sequences = fully_qualified_sequences()
    assert len(sequences) >= 500

    for seq in sequences:
        found = extract_emoji(seq)
        assert len(found) == 1, seq
        assert found[0].text == seq, seq

        if ZWJ in seq:
            assert found[0].kind is EmojiKind.ZWJ_SEQUENCE, seq
        elif seq.endswith(KEYCAP):
            assert found[0].kind is EmojiKind.KEYCAP, seq
        elif len(seq) == 2 and all(0x1F1E6 <= ord(ch) <= 0x1F1FF for ch in seq):
            assert found[0].kind is EmojiKind.FLAG, seq


def test_conformance_inside_text():
    sequences = fully_qualified_sequences()[::7]
    text = " a ".join(sequences)
    assert [s.text for s in extract_emoji(text)] == sequences


def test_fuzz_spans_are_an_ordered_subsequence():
    """
    Random strings never yield overlapping or out-of-order spans.

    Runs 2,000 trials by default; set ``STRESS=1`` for the full 1,000,000.
    """
    rng = np.random.default_rng(11)
    pool = [ord(ch) for ch in "ab #*1 \u200d\ufe0f\ufe0e\u20e3"]
    pool += [0x1F1E6, 0x1F1EB, 0x1F1F7, 0x1F3FB, 0x1F3FD, 0x1F44D, 0x1F64F, 0x2764, 0x1F468, 0xE0067, 0xE007F]

    for _ in range(scaled(2000, 1_000_000)):
        length = int(rng.integers(0, 12))
        if rng.random() < 0.3:
            cps = rng.integers(1, 0x10FFFF, size=length)
            cps = [int(cp) for cp in cps if not 0xD800 <= cp <= 0xDFFF]
        else:
            cps = [pool[i] for i in rng.integers(0, len(pool), size=length)]
        text = "".join(map(chr, cps))

        cursor = 0
        for start, end, seq in iter_emoji_spans(text):
            assert cursor <= start < end <= len(text)
            assert seq.text == text[start:end]
            cursor = end


# ---------------------------------------------------------------------
# Counting and ranking
# ---------------------------------------------------------------------


def test_count_emojis(make_corpus):
    corpus = make_corpus(["🙏🙏"], ["🙏"])
    assert count_emojis(corpus) == {Label.SOLIDARITY: 2, Label.NOT_SOLIDARITY: 1}
    assert count_emojis(corpus, distinct_per_tweet=True)[Label.SOLIDARITY] == 1
    assert total_counts_table(corpus) == {"solidarity": 2, "not_solidarity": 1, "total": 3}

    assert count_emojis(make_corpus(["no emoji"], ["none"])) == {Label.SOLIDARITY: 0, Label.NOT_SOLIDARITY: 0}


def test_counter_is_thread_count_independent(make_tweet):
    records = [make_tweet(str(i), "🙏" * (i % 3) + "❤️" * (i % 5) + "🇫🇷") for i in range(60)]
    assert emoji_counter(records, threads=4) == emoji_counter(records, threads=1)


def test_rank_ties_by_codepoint():
    table = rank_counter(Counter({"b": 5, "a": 5, "c": 1}), 2, Label.SOLIDARITY)
    assert [(r.rank, r.key, r.count) for r in table.rows] == [(1, "a", 5), (2, "b", 5)]
    with pytest.raises(ValueError):
        rank_counter(Counter(), 0, Label.SOLIDARITY)


def test_rank_top_k(make_corpus, tmp_path):
    corpus = make_corpus(["🙏🙏❤️", "🙏🇫🇷"], ["🌀"])
    tables = rank_top_k(corpus, k=10)

    solidarity = tables[Label.SOLIDARITY]
    assert [(r.key, r.count) for r in solidarity.rows] == [("🙏", 3), ("❤", 1), ("🇫🇷", 1)]
    counts = [r.count for r in solidarity.rows]
    assert counts == sorted(counts, reverse=True)
    assert len(tables[Label.NOT_SOLIDARITY]) == 1

    path = export_ranked_csv(solidarity, tmp_path / "top.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "rank,emoji,codepoints_hex,count"
    assert lines[1] == "1,🙏,1F64F,3"
    assert lines[3] == "3,🇫🇷,1F1EB-1F1F7,1"


# ---------------------------------------------------------------------
# Sentiment
# ---------------------------------------------------------------------


def test_load_sentiment_counts_and_scores(tmp_path):
    path = tmp_path / "sentiment.csv"
    path.write_text(
        "emoji,n_neg,n_neut,n_pos,score\n"
        "🙏,10,10,30,\n"
        "❤️,1,1,8,0.221\n"
        ",1,1,1,\n"
        "😭,x,1,1,\n",
        encoding="utf-8",
    )
    table = load_sentiment(path)

    assert table["🙏"].score == pytest.approx(0.4)
    assert table["🙏"].n_total == 50
    assert table["❤"].score == pytest.approx(0.221)
    assert len(table) == 2

    misses = Counter()
    assert sentiment_of("❤️", table) == pytest.approx(0.221)
    assert sentiment_of("🌀", table, misses) == 0.0
    assert misses["🌀"] == 1


def test_load_sentiment_published_header(tmp_path):
    path = tmp_path / "ranking.csv"
    path.write_text(
        "Emoji,Unicode codepoint,Occurrences,Position,Negative,Neutral,Positive,Unicode name,Unicode block\n"
        "😂,0x1f602,14622,0.805,3614,4163,6845,FACE WITH TEARS OF JOY,Emoticons\n",
        encoding="utf-8",
    )
    table = load_sentiment(path)
    assert table["😂"].score == pytest.approx((6845 - 3614) / 14622)


def test_load_sentiment_rejects_empty_and_unusable(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(ValueError):
        load_sentiment(empty)

    no_columns = tmp_path / "bad.csv"
    no_columns.write_text("emoji,colour\n🙏,blue\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_sentiment(no_columns)
