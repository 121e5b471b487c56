import random

import pytest

import config
from src.baseline import LexiconBaseline
from src.data_storage import DataStorage
from src.detector import Detector, DocumentResult
from src.evalkit import (PRF, EvaluationError, GoldDocument, breakdown_rows, eval_negation, eval_positive,
                         format_prf_row, format_scores, report)
from src.lexicon import AssertionStatus, FindingMention, FindingType


def positive_result(doc_id, *findings):
    mentions = [FindingMention(f, "1", (i, i), i) for i, f in enumerate(findings, 1)]
    return DocumentResult.from_mentions(doc_id, mentions)


def gold(doc_id, *findings, negated=None):
    return GoldDocument(doc_id, frozenset(findings), None if negated is None else frozenset(negated))


@pytest.fixture(scope="module")
def fixture_gold():
    return DataStorage(config.PATHS["fixture_gold"]).load_gold()


def run(engine, corpus):
    return [engine.detect(d) for d in corpus]


def test_prf_arithmetic():
    prf = PRF(tp=1, fp=0, fn=1)
    assert prf.precision == 1.0
    assert prf.recall == 0.5
    assert prf.f1 == pytest.approx(2 / 3)
    assert format_prf_row(prf) == "100.0 50.0 66.7"


def test_all_zero_counts():
    assert format_prf_row(PRF()) == "0.0 0.0 0.0"
    assert PRF().undefined


def test_format_scores_rounding():
    assert format_scores(0.898, 0.850, 0.873) == "89.8 85.0 87.3"


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        PRF(tp=-1)


def test_identity_scores_one():
    results = [positive_result("a", FindingType.MASS), positive_result("b", FindingType.EDEMA, FindingType.NODULE)]
    gold_docs = [gold("a", FindingType.MASS), gold("b", FindingType.EDEMA, FindingType.NODULE)]
    evaluation = eval_positive(results, gold_docs)
    assert evaluation.overall == PRF(3, 0, 0)
    assert format_prf_row(evaluation.overall) == "100.0 100.0 100.0"
    assert evaluation.macro() == (1.0, 1.0, 1.0)


def test_macro_skips_types_without_support():
    evaluation = eval_positive([positive_result("a", FindingType.MASS)], [gold("a", FindingType.MASS, FindingType.EDEMA)])
    assert evaluation.per_type[FindingType.EDEMA] == PRF(0, 0, 1)
    assert evaluation.macro() == (0.5, 0.5, 0.5)


def test_missing_ids_are_reported():
    with pytest.raises(EvaluationError) as info:
        eval_positive([positive_result("a"), positive_result("x")], [gold("a")])
    assert info.value.missing_ids == ["x"]
    with pytest.raises(EvaluationError) as info:
        eval_positive([positive_result("a")], [gold("a"), gold("b")])
    assert info.value.missing_ids == ["b"]


def test_duplicate_result_ids():
    with pytest.raises(EvaluationError, match="duplicate"):
        eval_positive([positive_result("a"), positive_result("a")], [gold("a")])


def test_duplicate_gold_findings():
    with pytest.raises(EvaluationError, match="duplicate"):
        GoldDocument.from_json({"doc_id": "a", "positive_findings": ["Mass", "Mass"]})


def test_gold_json():
    document = GoldDocument.from_json({
        "doc_id": 7, "positive_findings": ["Mass"],
        "negated_mentions": [{"finding": "Nodule", "sentence_id": 2, "head": "3"}],
    })
    assert document.doc_id == "7"
    assert document.negated_mentions == frozenset({(FindingType.NODULE, "2", 3)})
    assert GoldDocument.from_json({"doc_id": "b"}).negated_mentions is None


def test_negation_mode_needs_negated_mentions():
    with pytest.raises(EvaluationError) as info:
        eval_negation([positive_result("a"), positive_result("b")], [gold("a", negated=[]), gold("b")])
    assert info.value.missing_ids == ["b"]


def test_negation_mode_counts_mentions():
    negated = FindingMention(FindingType.MASS, "2", (3, 3), 3).with_status(AssertionStatus.NEGATIVE, "neg_no")
    spurious = FindingMention(FindingType.NODULE, "1", (1, 1), 1).with_status(AssertionStatus.NEGATIVE, "neg_no")
    result = DocumentResult.from_mentions("a", [negated, spurious])
    expected = gold("a", negated=[(FindingType.MASS, "2", 3), (FindingType.EDEMA, "1", 5)])
    assert eval_negation([result], [expected]) == PRF(1, 1, 1)


@pytest.mark.parametrize("switches, expected, counts", [
    ({}, "88.9 72.7 80.0", (8, 1, 3)),
    ({"use_uncertainty_rules": False}, "69.2 81.8 75.0", (9, 4, 2)),
])
def test_fixture_positive_scores(fixture_corpus, fixture_gold, bundled_lexicon, bundled_rules, switches, expected, counts):
    evaluation = eval_positive(run(Detector(bundled_lexicon, bundled_rules, **switches), fixture_corpus), fixture_gold)
    assert (evaluation.overall.tp, evaluation.overall.fp, evaluation.overall.fn) == counts
    assert format_prf_row(evaluation.overall) == expected


def test_fixture_recognition_only(fixture_corpus, fixture_gold, bundled_lexicon):
    evaluation = eval_positive(run(LexiconBaseline(bundled_lexicon), fixture_corpus), fixture_gold)
    assert evaluation.overall == PRF(10, 13, 1)
    assert format_prf_row(evaluation.overall) == "43.5 90.9 58.8"


def test_fixture_negation_scores(fixture_corpus, fixture_gold, bundled_lexicon, bundled_rules):
    prf = eval_negation(run(Detector(bundled_lexicon, bundled_rules), fixture_corpus), fixture_gold)
    assert prf == PRF(10, 1, 1)
    assert format_prf_row(prf) == "90.9 90.9 90.9"


def test_count_identities(fixture_corpus, fixture_gold, bundled_lexicon, bundled_rules):
    results = run(Detector(bundled_lexicon, bundled_rules), fixture_corpus)
    overall = eval_positive(results, fixture_gold).overall
    predicted = sum(len(r.positive_findings()) for r in results)
    expected = sum(len(g.positive_findings) for g in fixture_gold)
    assert overall.tp + overall.fp == predicted
    assert overall.tp + overall.fn == expected


def test_scores_ignore_document_order(fixture_corpus, fixture_gold, bundled_lexicon, bundled_rules):
    results = run(Detector(bundled_lexicon, bundled_rules), fixture_corpus)
    baseline = eval_positive(results, fixture_gold)
    rng = random.Random(1)
    for _ in range(5):
        shuffled_results, shuffled_gold = results[:], fixture_gold[:]
        rng.shuffle(shuffled_results)
        rng.shuffle(shuffled_gold)
        assert eval_positive(shuffled_results, shuffled_gold) == baseline


def test_f1_between_precision_and_recall():
    rng = random.Random(9)
    for _ in range(500):
        prf = PRF(rng.randint(0, 20), rng.randint(0, 20), rng.randint(0, 20))
        low, high = sorted([prf.precision, prf.recall])
        assert 0.0 <= prf.f1 <= 1.0
        assert low - 1e-12 <= prf.f1 <= high + 1e-12


def test_report_marks_undefined_scores():
    table = report([("run", PRF(0, 0, 2)), ("other", PRF(1, 1, 0)), ("spurious", PRF(0, 3, 0)), ("empty", PRF())],
                   title="input")
    lines = table.splitlines()
    assert lines[0].split() == ["input", "P", "R", "F"]
    assert lines[1].split() == ["run", "0.0*", "0.0", "0.0"]
    assert lines[2].split() == ["other", "50.0", "100.0", "66.7"]
    assert lines[3].split() == ["spurious", "0.0", "0.0*", "0.0"]
    assert lines[4].split() == ["empty", "0.0*", "0.0*", "0.0"]


def test_breakdown_rows(fixture_corpus, fixture_gold, bundled_lexicon, bundled_rules):
    evaluation = eval_positive(run(Detector(bundled_lexicon, bundled_rules), fixture_corpus), fixture_gold)
    rows = breakdown_rows(evaluation)
    assert rows[-1] == ("overall", evaluation.overall)
    labels = [label for label, _ in rows[:-1]]
    assert labels == [t.value for t in FindingType if evaluation.per_type[t].support]
    assert "Pneumonia" not in labels
    assert "Cardiomegaly" in labels
