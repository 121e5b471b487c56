import pytest

from src.baseline import LexiconBaseline, SurfaceBaseline
from src.detector import DocumentLabel
from src.graph_ingest import Document
from src.lexicon import AssertionStatus, FindingMention, FindingType


def focused(cooperative_graph):
    return FindingMention(FindingType.EDEMA, cooperative_graph.sentence_id, (22, 22), 22)


def test_unbounded_window_negates_distant_mention(cooperative_graph, bundled_lexicon):
    baseline = SurfaceBaseline.from_settings(bundled_lexicon, {"window": None})
    result = baseline.classify(cooperative_graph, focused(cooperative_graph))
    assert result.status is AssertionStatus.NEGATIVE
    assert result.matched_rule == "surface:not"


def test_bounded_window_leaves_distant_mention(cooperative_graph, bundled_lexicon):
    baseline = SurfaceBaseline.from_settings(bundled_lexicon)
    assert baseline.window == 5
    assert baseline.classify(cooperative_graph, focused(cooperative_graph)).status is AssertionStatus.POSITIVE


def test_post_negation_trigger(fixture_corpus, bundled_lexicon):
    baseline = SurfaceBaseline.from_settings(bundled_lexicon)
    [mention] = baseline.detect(fixture_corpus[18]).mentions
    assert mention.finding is FindingType.PNEUMOTHORAX
    assert mention.status is AssertionStatus.NEGATIVE
    assert mention.matched_rule == "surface:absent"


def test_uncertainty_trigger(fixture_corpus, bundled_lexicon):
    baseline = SurfaceBaseline.from_settings(bundled_lexicon)
    [mention] = baseline.detect(fixture_corpus[5]).mentions
    assert mention.status is AssertionStatus.UNCERTAIN
    assert mention.matched_rule == "surface:possible"


def test_negation_checked_before_uncertainty(graph_factory, bundled_lexicon):
    g = graph_factory([("no", "no", "DT"), ("possible", "possible", "JJ"), ("mass", "mass", "NN")], [])
    baseline = SurfaceBaseline(bundled_lexicon, ["no"], ["possible"])
    result = baseline.classify(g, FindingMention(FindingType.MASS, "1", (3, 3), 3))
    assert result.status is AssertionStatus.NEGATIVE


def test_trigger_after_mention_only_counts_as_post_trigger(graph_factory, bundled_lexicon):
    g = graph_factory([("mass", "mass", "NN"), ("no", "no", "DT")], [])
    baseline = SurfaceBaseline(bundled_lexicon, ["no"], [])
    result = baseline.classify(g, FindingMention(FindingType.MASS, "1", (1, 1), 1))
    assert result.status is AssertionStatus.POSITIVE


def test_multiword_trigger_distance_counts_from_its_end(graph_factory, bundled_lexicon):
    words = [("clear", "clear", "JJ"), ("of", "of", "IN")] + [("x", "x", "X")] * 4 + [("mass", "mass", "NN")]
    g = graph_factory(words, [])
    mass = FindingMention(FindingType.MASS, "1", (7, 7), 7)
    assert SurfaceBaseline(bundled_lexicon, ["clear of"], [], window=5).classify(g, mass).matched_rule == "surface:clear of"
    assert SurfaceBaseline(bundled_lexicon, ["clear of"], [], window=4).classify(g, mass).status is AssertionStatus.POSITIVE


def test_matched_triggers(fixture_corpus, bundled_lexicon):
    baseline = SurfaceBaseline.from_settings(bundled_lexicon)
    assert baseline.get_matched_triggers(fixture_corpus[10].sentences[0]) == ["no", "no evidence of"]
    assert baseline.get_matched_triggers(fixture_corpus[6].sentences[0]) == []


def test_invalid_window(bundled_lexicon):
    with pytest.raises(ValueError):
        SurfaceBaseline(bundled_lexicon, ["no"], [], window=0)


def test_lexicon_baseline_keeps_everything_positive(fixture_corpus, bundled_lexicon):
    baseline = LexiconBaseline(bundled_lexicon)
    assert baseline.method == "lexicon"
    for document in fixture_corpus:
        result = baseline.detect(document)
        assert all(m.status is AssertionStatus.POSITIVE for m in result.mentions)
        assert DocumentLabel.NEGATIVE not in result.document_labels.values()


def test_lexicon_baseline_examples(examples, example_lexicon):
    result = LexiconBaseline(example_lexicon).detect(Document("example_a", (examples["a"],)))
    assert result.positive_findings() == {FindingType.EFFUSION, FindingType.INFILTRATION}
