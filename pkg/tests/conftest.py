import os

import pytest

import config
from src.graph_ingest import Edge, SentenceGraph, Vertex, load_conllu
from src.lexicon import load_lexicon_file
from src.pattern_lang import load_rule_file

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
TEST_DATA = os.path.join(TESTS_DIR, "data")
FIXTURES = os.path.join(config.BASE_DIR, "data", "fixtures")

EXAMPLE_CORPUS = os.path.join(FIXTURES, "examples.conllu")
EXAMPLE_RULES = os.path.join(TEST_DATA, "example_rules.tsv")
EXAMPLE_LEXICON = os.path.join(TEST_DATA, "example_lexicon.tsv")


def build_graph(words, edges, sentence_id="1"):
    """
    Build a sentence graph from (word, lemma, pos) triples and
    (governor, dependent, relation) edges.
    """
    vertices = tuple(
        Vertex(index=i, word=w, lemma=l, pos=p) for i, (w, l, p) in enumerate(words, 1)
    )
    return SentenceGraph(sentence_id, vertices, frozenset(Edge(g, d, r) for g, d, r in edges))


@pytest.fixture
def graph_factory():
    return build_graph


@pytest.fixture(scope="session")
def examples():
    """The three example graphs, keyed "a", "b" and "c"."""
    documents = load_conllu(EXAMPLE_CORPUS)
    return {d.doc_id[-1]: d.sentences[0] for d in documents}


@pytest.fixture(scope="session")
def example_rules():
    return load_rule_file(EXAMPLE_RULES)


@pytest.fixture(scope="session")
def example_lexicon():
    return load_lexicon_file(EXAMPLE_LEXICON)


@pytest.fixture(scope="session")
def bundled_rules():
    return load_rule_file(config.PATHS["rules"])


@pytest.fixture(scope="session")
def bundled_lexicon():
    return load_lexicon_file(config.PATHS["lexicon"])


@pytest.fixture(scope="session")
def fixture_corpus():
    return load_conllu(config.PATHS["fixture_corpus"])


@pytest.fixture(scope="session")
def example_paths():
    return {"corpus": EXAMPLE_CORPUS, "rules": EXAMPLE_RULES, "lexicon": EXAMPLE_LEXICON, "data": TEST_DATA}


@pytest.fixture(scope="session")
def cooperative_graph():
    """'His review of systems is limited ... difficult to keep focused', enhanced conjunct edge included."""
    words = [
        ("His", "he", "PRP$"), ("review", "review", "NN"), ("of", "of", "IN"), ("systems", "system", "NNS"),
        ("is", "be", "VBZ"), ("limited", "limit", "VBN"), ("by", "by", "IN"), ("the", "the", "DT"),
        ("fact", "fact", "NN"), ("that", "that", "IN"), ("he", "he", "PRP"), ("is", "be", "VBZ"),
        ("not", "not", "RB"), ("terribly", "terribly", "RB"), ("cooperative", "cooperative", "JJ"),
        ("and", "and", "CC"), ("he", "he", "PRP"), ("is", "be", "VBZ"), ("difficult", "difficult", "JJ"),
        ("to", "to", "TO"), ("keep", "keep", "VB"), ("focused", "focused", "JJ"),
    ]
    edges = [
        (2, 1, "nmod:poss"), (6, 2, "nsubjpass"), (4, 3, "case"), (2, 4, "nmod:of"), (6, 5, "auxpass"),
        (9, 7, "case"), (9, 8, "det"), (6, 9, "nmod:agent"), (15, 10, "mark"), (15, 11, "nsubj"),
        (15, 12, "cop"), (15, 13, "neg"), (15, 14, "advmod"), (9, 15, "ccomp"), (15, 16, "cc"),
        (19, 17, "nsubj"), (19, 18, "cop"), (15, 19, "conj:and"), (9, 19, "ccomp"), (21, 20, "mark"),
        (19, 21, "xcomp"), (21, 22, "xcomp"),
    ]
    return build_graph(words, edges)
