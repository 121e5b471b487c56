"""
Cross-module checks on the bundled example sentences and the fixture corpus.
"""
import time

import pytest

import config
from src.baseline import LexiconBaseline, SurfaceBaseline
from src.data_storage import DataStorage
from src.detector import Detector, DocumentLabel
from src.evalkit import eval_negation, eval_positive, format_prf_row
from src.graph_ingest import load_conllu
from src.lexicon import AssertionStatus, FindingMention, FindingType
from src.pattern_lang import parse_pattern, render_pattern
from src.pipeline import NegBioPipeline

EXAMPLE_RULES = [
    "{} <nmod:of {lemma:/clear/}",
    "{} <nmod:of ({lemma:/evidence/} <neg {word:/no/})",
    "{} < ({lemma:/exclude/} >neg {word:/not/})",
]


@pytest.fixture(scope="module")
def fixture_gold():
    return DataStorage(config.PATHS["fixture_gold"]).load_gold()


def positive_scores(engine, corpus, gold):
    return eval_positive(NegBioPipeline(engine).process_corpus(corpus), gold).overall


def test_example_sentences(example_paths, example_lexicon, example_rules):
    started = time.perf_counter()
    detector = Detector(example_lexicon, example_rules)
    results = {r.doc_id: r for r in NegBioPipeline(detector).process_corpus(load_conllu(example_paths["corpus"]))}

    statuses = {
        (doc_id, m.finding): (m.status, m.matched_rule)
        for doc_id, result in results.items() for m in result.mentions
    }
    assert statuses == {
        ("example_a", FindingType.EFFUSION): (AssertionStatus.NEGATIVE, "neg_clear_of"),
        ("example_a", FindingType.INFILTRATION): (AssertionStatus.NEGATIVE, "neg_clear_of"),
        ("example_b", FindingType.PNEUMONIA): (AssertionStatus.NEGATIVE, "neg_no_evidence_of"),
        ("example_c", FindingType.INFILTRATION): (AssertionStatus.NEGATIVE, "neg_not_excluded"),
    }
    assert time.perf_counter() - started < 1


@pytest.mark.parametrize("source", EXAMPLE_RULES)
def test_example_rules_round_trip(source):
    assert render_pattern(parse_pattern(source)) == source


def test_cooperative_sentence_stays_positive(cooperative_graph, bundled_lexicon, bundled_rules):
    mention = FindingMention(FindingType.EDEMA, "1", (22, 22), 22)
    assert Detector(bundled_lexicon, bundled_rules).classify(cooperative_graph, mention).status is AssertionStatus.POSITIVE
    unbounded = SurfaceBaseline.from_settings(bundled_lexicon, {"window": None})
    assert unbounded.classify(cooperative_graph, mention).status is AssertionStatus.NEGATIVE


def test_double_negation_limitation(fixture_corpus, bundled_lexicon, bundled_rules):
    # "cannot exclude" reads as a hedge, but the negation rule fires first
    result = Detector(bundled_lexicon, bundled_rules).detect(fixture_corpus[9])
    assert result.doc_id == "d10"
    assert result.document_labels[FindingType.EFFUSION] is DocumentLabel.NEGATIVE
    [gold] = [g for g in DataStorage(config.PATHS["fixture_gold"]).load_gold() if g.doc_id == "d10"]
    assert FindingType.EFFUSION in gold.positive_findings


def test_frozen_scores(fixture_corpus, fixture_gold, bundled_lexicon, bundled_rules):
    detector = Detector(bundled_lexicon, bundled_rules)
    assert format_prf_row(positive_scores(detector, fixture_corpus, fixture_gold)) == "88.9 72.7 80.0"
    results = NegBioPipeline(detector).process_corpus(fixture_corpus)
    assert format_prf_row(eval_negation(results, fixture_gold)) == "90.9 90.9 90.9"
    recognition = positive_scores(LexiconBaseline(bundled_lexicon), fixture_corpus, fixture_gold)
    assert format_prf_row(recognition) == "43.5 90.9 58.8"


def test_count_identities_hold_for_every_method(fixture_corpus, fixture_gold, bundled_lexicon, bundled_rules):
    engines = [
        Detector(bundled_lexicon, bundled_rules),
        Detector(bundled_lexicon, bundled_rules, use_uncertainty_rules=False),
        Detector(bundled_lexicon, bundled_rules, use_negation_rules=False),
        SurfaceBaseline.from_settings(bundled_lexicon),
        LexiconBaseline(bundled_lexicon),
    ]
    gold_total = sum(len(g.positive_findings) for g in fixture_gold)
    for engine in engines:
        results = NegBioPipeline(engine).process_corpus(fixture_corpus)
        overall = eval_positive(results, fixture_gold).overall
        assert overall.tp + overall.fn == gold_total
        assert overall.tp + overall.fp == sum(len(r.positive_findings()) for r in results)


def test_disabling_uncertainty_rules(fixture_corpus, fixture_gold, bundled_lexicon, bundled_rules):
    full = positive_scores(Detector(bundled_lexicon, bundled_rules), fixture_corpus, fixture_gold)
    ablated = positive_scores(
        Detector(bundled_lexicon, bundled_rules, use_uncertainty_rules=False), fixture_corpus, fixture_gold
    )
    assert ablated.precision < full.precision
    assert ablated.recall >= full.recall
    assert ablated.f1 < full.f1
