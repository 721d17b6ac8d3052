from fractions import Fraction

import numpy as np
import pytest
from sklearn.metrics import cohen_kappa_score

from analysis.labeling import (
    check_agreement,
    compute_kappa,
    consensus_lexicon,
    distant_label,
    export_labeled,
    export_lexicon,
    load_annotations,
    load_labeled,
    load_lexicon,
)
from models.entities import CorpusStore, HashtagAnnotation, Label
from utils.errors import AgreementGateError, EmptyInputError, InputMismatchError

from conftest import scaled


S, N, U = Label.SOLIDARITY, Label.NOT_SOLIDARITY, Label.UNRELATED
ORDER = (S, N, U)


def pair_from_labels(labels_a, labels_b):
    a = [HashtagAnnotation(f"tag{i}", lab, "a") for i, lab in enumerate(labels_a)]
    b = [HashtagAnnotation(f"tag{i}", lab, "b") for i, lab in enumerate(labels_b)]
    return a, b


def pair_from_matrix(matrix):
    labels_a, labels_b = [], []
    for r, row in enumerate(matrix):
        for c, count in enumerate(row):
            labels_a += [ORDER[r]] * count
            labels_b += [ORDER[c]] * count
    return pair_from_labels(labels_a, labels_b)


def exact_kappa(matrix):
    n = sum(map(sum, matrix))
    p_o = Fraction(sum(matrix[i][i] for i in range(3)), n)
    rows = [sum(row) for row in matrix]
    cols = [sum(matrix[r][c] for r in range(3)) for c in range(3)]
    p_e = Fraction(sum(r * c for r, c in zip(rows, cols)), n * n)
    return float((p_o - p_e) / (1 - p_e))


FIXED_MATRICES = [
    [[20, 5, 0], [10, 15, 0], [0, 0, 0]],
    [[45, 15, 0], [25, 15, 0], [0, 0, 0]],
    [[10, 0, 0], [0, 10, 0], [0, 0, 10]],
    [[0, 5, 0], [5, 0, 0], [0, 0, 0]],
    [[30, 2, 3], [4, 25, 1], [2, 3, 30]],
    [[1, 1, 1], [1, 1, 1], [1, 1, 1]],
    [[7, 0, 3], [0, 0, 2], [1, 4, 9]],
    [[50, 0, 0], [0, 1, 0], [0, 0, 0]],
    [[12, 6, 2], [3, 9, 4], [5, 1, 8]],
    [[0, 0, 4], [0, 6, 0], [3, 0, 2]],
]


def test_textbook_value():
    a, b = pair_from_matrix(FIXED_MATRICES[0])
    report = compute_kappa(a, b)
    assert report.p_o == pytest.approx(0.7, abs=1e-12)
    assert report.p_e == pytest.approx(0.5, abs=1e-12)
    assert report.kappa == pytest.approx(0.4, abs=1e-12)
    assert report.confusion == FIXED_MATRICES[0]
    assert report.n_items == 50


@pytest.mark.parametrize("matrix", FIXED_MATRICES)
def test_fixed_matrices(matrix):
    a, b = pair_from_matrix(matrix)
    report = compute_kappa(a, b)
    assert report.kappa == pytest.approx(exact_kappa(matrix), abs=1e-12)
    assert report.confusion == matrix


def test_perfect_agreement_on_one_category_is_undefined():
    a, b = pair_from_labels([S] * 5, [S] * 5)
    report = compute_kappa(a, b)
    assert report.kappa is None
    assert not report.kappa_defined
    with pytest.raises(AgreementGateError):
        check_agreement(report, 0.65)
    check_agreement(report, None)


def test_random_pairs_match_sklearn_and_are_symmetric():
    rng = np.random.default_rng(7)
    for _ in range(scaled(200, 1000)):
        n = int(rng.integers(2, 40))
        labels_a = [ORDER[i] for i in rng.integers(0, 3, size=n)]
        labels_b = [ORDER[i] for i in rng.integers(0, 3, size=n)]
        a, b = pair_from_labels(labels_a, labels_b)

        report = compute_kappa(a, b)
        swapped = compute_kappa(b, a)
        if report.kappa is None:
            assert swapped.kappa is None
            continue

        expected = cohen_kappa_score([x.value for x in labels_a], [x.value for x in labels_b])
        assert report.kappa == pytest.approx(expected, abs=1e-12)
        assert swapped.kappa == pytest.approx(report.kappa, abs=1e-12)

        order = rng.permutation(n)
        shuffled = compute_kappa([a[i] for i in order], [b[i] for i in order])
        assert shuffled.kappa == pytest.approx(report.kappa, abs=1e-12)


def test_mismatched_and_empty_inputs():
    a, b = pair_from_labels([S, N], [S, N])
    with pytest.raises(InputMismatchError):
        compute_kappa(a, b[:1])
    with pytest.raises(EmptyInputError):
        compute_kappa([], [])
    with pytest.raises(InputMismatchError):
        compute_kappa(a + [HashtagAnnotation("tag0", N, "a")], b)


def test_gate():
    a, b = pair_from_matrix(FIXED_MATRICES[0])
    report = compute_kappa(a, b)
    check_agreement(report, 0.3)
    with pytest.raises(AgreementGateError):
        check_agreement(report, 0.65)


def test_consensus_lexicon(capsys):
    a = [HashtagAnnotation(t, lab, "a") for t, lab in [("prayforparis", S), ("isis", N), ("news", U), ("paris", S)]]
    b = [HashtagAnnotation(t, lab, "b") for t, lab in [("prayforparis", S), ("isis", N), ("news", U), ("paris", U)]]
    lexicon = consensus_lexicon(a, b)

    assert lexicon.entries == {"isis": N, "prayforparis": S}
    assert lexicon.disagreements == ["paris"]
    assert lexicon.agreed_unrelated == ["news"]
    assert lexicon.label_of("#PrayForParis") is S

    out = capsys.readouterr().out
    assert "[⚠️ Warning] 1 hashtags had conflicting labels." in out
    assert "[WARN]" not in out


def test_distant_label(make_tweet):
    a = [HashtagAnnotation(t, lab, "a") for t, lab in [("prayforparis", S), ("isis", N)]]
    lexicon = consensus_lexicon(a, [HashtagAnnotation(x.hashtag, x.label, "b") for x in a])
    store = CorpusStore(
        records=[
            make_tweet("1", "#PrayForParis 🙏"),
            make_tweet("2", "#ISIS again"),
            make_tweet("3", "#prayforparis #isis"),
            make_tweet("4", "no tags here"),
            make_tweet("5", "#PrayForParis #PrayForParis #love"),
        ],
        event_tag="paris",
    )
    labeled = distant_label(store, lexicon)

    assert [r.id for r in labeled.solidarity] == ["1", "5"]
    assert [r.id for r in labeled.not_solidarity] == ["2"]
    assert labeled.dropped_conflicts == 1
    assert labeled.dropped_unmatched == 1
    assert labeled.total == len(store)


def test_annotation_and_lexicon_files(tmp_path, make_tweet):
    path = tmp_path / "a.tsv"
    path.write_text(
        "hashtag\tlabel\tannotator\n"
        "#PrayForParis\tSolidarity\tann1\n"
        "isis\tnot-solidarity\tann1\n"
        "bogus\tmaybe\tann1\n",
        encoding="utf-8",
    )
    annotations = load_annotations(path)
    assert [(x.hashtag, x.label) for x in annotations] == [("prayforparis", S), ("isis", N)]

    lexicon = consensus_lexicon(annotations, annotations)
    reloaded = load_lexicon(export_lexicon(lexicon, tmp_path / "lexicon.tsv"))
    assert reloaded.entries == lexicon.entries

    store = CorpusStore(records=[make_tweet("1", "#prayforparis"), make_tweet("2", "#isis")], event_tag="paris")
    labeled = distant_label(store, lexicon)
    again = load_labeled(export_labeled(labeled, tmp_path / "labeled.jsonl"), event_tag="paris")
    assert again.solidarity == labeled.solidarity
    assert again.not_solidarity == labeled.not_solidarity
