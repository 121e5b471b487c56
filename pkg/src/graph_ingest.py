"""
Graph ingestion module: parses CoNLL-U into universal dependency graphs.

Each sentence becomes an immutable SentenceGraph whose vertices carry the
word, lemma and part-of-speech of a token and whose edges are typed
dependencies from governor to dependent. Enhanced (DEPS) edges are preferred
over the basic tree, so a vertex may have several governors.
"""
import os
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
from conllu import parse_token_and_metadata
from conllu.exceptions import ParseException
from conllu.models import Token, TokenList

from src.utils import document_name

logger = logging.getLogger("negbio.ingest")

# Column order of a CoNLL-U token line
CONLLU_FIELDS = ("id", "form", "lemma", "upos", "xpos", "feats", "head", "deprel", "deps", "misc")

DOC_ID_KEYS = ("doc_id", "newdoc id")


class ConlluParseError(ValueError):
    """Malformed CoNLL-U input; `line` is the 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class GraphError(ValueError):
    """Invalid sentence graph construction or query."""


@dataclass(frozen=True)
class Vertex:
    index: int
    word: str
    lemma: str
    pos: str
    span: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.index < 1:
            raise GraphError(f"vertex index must be >= 1, got {self.index}")
        if not self.word:
            raise GraphError(f"vertex {self.index} has an empty word")
        start, end = self.span
        if (start, end) != (0, 0) and not start < end:
            raise GraphError(f"vertex {self.index} has an invalid span {self.span}")

    def attribute(self, name: str) -> str:
        """Return the word, lemma or pos attribute by name."""
        return getattr(self, name)


@dataclass(frozen=True, order=True)
class Edge:
    governor: int
    dependent: int
    relation: str


@dataclass(frozen=True)
class SentenceGraph:
    """
    Universal dependency graph of one sentence.

    Vertex indices are contiguous from 1. Duplicate edges (same governor,
    dependent and relation) are rejected; parallel edges with different
    relations are allowed.
    """
    sentence_id: str
    vertices: Tuple[Vertex, ...]
    edges: FrozenSet[Edge]
    text: Optional[str] = None
    _out: Dict[int, Tuple[Edge, ...]] = field(init=False, repr=False, compare=False)
    _in: Dict[int, Tuple[Edge, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vertices = tuple(self.vertices)
        for position, vertex in enumerate(vertices, 1):
            if vertex.index != position:
                raise GraphError(
                    f"sentence {self.sentence_id}: vertex indices must be contiguous from 1, "
                    f"found {vertex.index} at position {position}"
                )

        graph = nx.MultiDiGraph()
        graph.add_nodes_from(v.index for v in vertices)
        for edge in self.edges:
            if not edge.relation:
                raise GraphError(f"sentence {self.sentence_id}: edge {edge} has an empty relation")
            if edge.governor == edge.dependent:
                raise GraphError(f"sentence {self.sentence_id}: self loop on vertex {edge.governor}")
            if edge.governor not in graph or edge.dependent not in graph:
                raise GraphError(f"sentence {self.sentence_id}: edge {edge} references a missing vertex")
            if graph.has_edge(edge.governor, edge.dependent, key=edge.relation):
                raise GraphError(f"sentence {self.sentence_id}: duplicate edge {edge}")
            graph.add_edge(edge.governor, edge.dependent, key=edge.relation)

        out_edges = {
            v: tuple(sorted((Edge(g, d, r) for g, d, r in graph.out_edges(v, keys=True)),
                            key=lambda e: (e.dependent, e.relation)))
            for v in graph.nodes
        }
        in_edges = {
            v: tuple(sorted((Edge(g, d, r) for g, d, r in graph.in_edges(v, keys=True)),
                            key=lambda e: (e.governor, e.relation)))
            for v in graph.nodes
        }

        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", frozenset(self.edges))
        object.__setattr__(self, "_out", out_edges)
        object.__setattr__(self, "_in", in_edges)

    def __len__(self) -> int:
        return len(self.vertices)

    def vertex(self, index: int) -> Vertex:
        """Return the vertex with the given 1-based index."""
        if not 1 <= index <= len(self.vertices):
            raise GraphError(f"sentence {self.sentence_id}: no vertex {index}")
        return self.vertices[index - 1]

    def has_vertex(self, index: int) -> bool:
        return 1 <= index <= len(self.vertices)

    def dependents_of(self, index: int, relation: Optional[str] = None) -> List[Tuple[Edge, Vertex]]:
        """Edges governed by `index`, ordered by dependent index."""
        self.vertex(index)
        return [
            (edge, self.vertices[edge.dependent - 1])
            for edge in self._out[index]
            if relation is None or edge.relation == relation
        ]

    def governors_of(self, index: int, relation: Optional[str] = None) -> List[Tuple[Edge, Vertex]]:
        """Edges whose dependent is `index`, ordered by governor index."""
        self.vertex(index)
        return [
            (edge, self.vertices[edge.governor - 1])
            for edge in self._in[index]
            if relation is None or edge.relation == relation
        ]

    def find_by_lemma(self, lemma: str) -> List[Vertex]:
        lemma = lemma.lower()
        return [v for v in self.vertices if v.lemma == lemma]


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: Tuple[SentenceGraph, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def sentence(self, sentence_id: str) -> SentenceGraph:
        for sentence in self.sentences:
            if sentence.sentence_id == sentence_id:
                return sentence
        raise KeyError(f"document {self.doc_id} has no sentence {sentence_id}")


def dependents_of(g: SentenceGraph, v: int, relation: Optional[str] = None) -> List[Tuple[Edge, Vertex]]:
    return g.dependents_of(v, relation)


def governors_of(g: SentenceGraph, v: int, relation: Optional[str] = None) -> List[Tuple[Edge, Vertex]]:
    return g.governors_of(v, relation)


def compute_spans(text: Optional[str], forms: List[str]) -> List[Tuple[int, int]]:
    """
    Locate each form in the sentence text, left to right.

    Forms that cannot be found get the (0, 0) sentinel and do not move the cursor.
    """
    if not text:
        return [(0, 0)] * len(forms)
    spans = []
    cursor = 0
    for form in forms:
        start = text.find(form, cursor)
        if start < 0:
            spans.append((0, 0))
            continue
        spans.append((start, start + len(form)))
        cursor = start + len(form)
    return spans


class _CorpusBuilder:
    """Groups sentence blocks into documents while parsing one stream."""

    def __init__(self, default_name: str):
        self.default_name = default_name
        self.documents: "OrderedDict[str, List[SentenceGraph]]" = OrderedDict()
        self.current: Optional[str] = None
        self.sentence_lines: Dict[Tuple[str, str], int] = {}

    def _switch_document(self, doc_id: str, line: int) -> None:
        if doc_id == self.current:
            return
        if doc_id in self.documents:
            raise ConlluParseError(f"doc_id {doc_id!r} reappears after another document", line)
        self.documents[doc_id] = []
        self.current = doc_id
        logger.debug(f"Started document {doc_id}")

    def add_block(self, block: List[Tuple[int, str]]) -> None:
        first_line = block[0][0]
        comment_lines = {}
        token_lines = []
        for lineno, line in block:
            if line.startswith("#"):
                comment_lines[lineno] = line
            else:
                token_lines.append((lineno, line))

        id_lines = _check_token_lines(token_lines)
        try:
            parsed = parse_token_and_metadata(
                "\n".join(line for _, line in block), fields=CONLLU_FIELDS
            )
        except ParseException as e:
            raise ConlluParseError(str(e), first_line) from e
        metadata = parsed.metadata or {}

        doc_id = next((metadata[k] for k in DOC_ID_KEYS if metadata.get(k)), None)
        if doc_id:
            doc_line = next(
                (n for n, l in comment_lines.items() if "doc_id" in l or "newdoc" in l), first_line
            )
            self._switch_document(str(doc_id).strip(), doc_line)

        if not token_lines:
            return
        if self.current is None:
            self._switch_document(self.default_name, first_line)

        sentences = self.documents[self.current]
        sentence_id = metadata.get("sent_id") or str(len(sentences) + 1)
        sentence_id = str(sentence_id).strip()
        key = (self.current, sentence_id)
        if key in self.sentence_lines:
            raise ConlluParseError(
                f"duplicate sent_id {sentence_id!r} in document {self.current!r} "
                f"(first seen on line {self.sentence_lines[key]})",
                first_line,
            )
        self.sentence_lines[key] = first_line
        sentences.append(_build_sentence(sentence_id, metadata.get("text"), token_lines, parsed, id_lines))

    def build(self) -> List[Document]:
        return [Document(doc_id, tuple(sentences)) for doc_id, sentences in self.documents.items()]


def _check_token_lines(token_lines: List[Tuple[int, str]]) -> Dict[int, int]:
    """Validate raw token lines and map regular token ids to line numbers."""
    id_lines = {}
    for lineno, line in token_lines:
        columns = line.split("\t")
        if len(columns) != len(CONLLU_FIELDS):
            raise ConlluParseError(
                f"expected {len(CONLLU_FIELDS)} tab-separated columns, found {len(columns)}", lineno
            )
        token_id, form, head = columns[0], columns[1], columns[6]
        if "-" in token_id or "." in token_id:
            continue
        if not token_id.isdigit():
            raise ConlluParseError(f"non-numeric ID {token_id!r}", lineno)
        if not head.isdigit():
            raise ConlluParseError(f"non-numeric HEAD {head!r}", lineno)
        if not form:
            raise ConlluParseError("empty FORM", lineno)
        id_lines[int(token_id)] = lineno
    return id_lines


def _build_sentence(sentence_id: str, text: Optional[str], token_lines: List[Tuple[int, str]],
                    parsed: TokenList, id_lines: Dict[int, int]) -> SentenceGraph:
    tokens = [t for t in parsed if isinstance(t["id"], int)]
    skipped = len(parsed) - len(tokens)
    if skipped:
        logger.debug(f"Sentence {sentence_id}: skipped {skipped} multiword/empty node lines")

    expected = list(range(1, len(tokens) + 1))
    if [t["id"] for t in tokens] != expected:
        line = id_lines.get(tokens[0]["id"]) if tokens else None
        raise ConlluParseError(f"sentence {sentence_id}: token ids must run 1..{len(tokens)}", line)

    forms = [str(t["form"]) for t in tokens]
    spans = compute_spans(text, forms)

    vertices = []
    edges = []
    for token, span in zip(tokens, spans):
        index = token["id"]
        line = id_lines[index]
        lemma = token["lemma"]
        if lemma in (None, "_", ""):
            lemma = token["form"]
        pos = token["xpos"] if token["xpos"] not in (None, "_") else token["upos"]
        vertices.append(Vertex(
            index=index,
            word=str(token["form"]),
            lemma=str(lemma).lower(),
            pos=str(pos) if pos not in (None, "") else "_",
            span=span,
        ))

        if token["head"] != 0 and token["head"] not in id_lines:
            raise ConlluParseError(f"HEAD {token['head']} references a nonexistent token", line)
        deps = token["deps"]
        if deps in (None, "_"):
            arcs = [(token["deprel"], token["head"])]
        elif isinstance(deps, str):
            raise ConlluParseError(f"malformed DEPS {deps!r}", line)
        else:
            arcs = list(deps)

        for relation, head in arcs:
            if not isinstance(head, int):
                # Enhanced edge from an empty node
                continue
            if head == 0:
                continue
            if head not in id_lines:
                raise ConlluParseError(f"HEAD {head} references a nonexistent token", line)
            if not relation or relation == "_":
                raise ConlluParseError("missing dependency relation", line)
            edge = Edge(governor=head, dependent=index, relation=str(relation))
            if edge in edges:
                raise ConlluParseError(f"duplicate edge {head}:{relation}", line)
            edges.append(edge)

    try:
        return SentenceGraph(sentence_id=sentence_id, vertices=tuple(vertices), edges=edges, text=text)
    except GraphError as e:
        raise ConlluParseError(str(e), token_lines[0][0]) from e


def parse_conllu(stream: Iterable[str], name: str = "document") -> List[Document]:
    """
    Parse a CoNLL-U character stream into documents.

    Args:
        stream: Lines of CoNLL-U text (LF or CRLF line endings)
        name: Document name used for sentences before any doc_id comment

    Returns:
        Documents in input order, each with its sentences in input order
    """
    builder = _CorpusBuilder(name)
    block: List[Tuple[int, str]] = []

    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n").rstrip("\r")
        if lineno == 1:
            line = line.lstrip("\ufeff")
        if not line.strip():
            if block:
                builder.add_block(block)
                block = []
            continue
        block.append((lineno, line))
    if block:
        builder.add_block(block)

    documents = builder.build()
    logger.debug(f"Parsed {len(documents)} documents from {name}")
    return documents


def load_conllu(path: str) -> List[Document]:
    """Parse a CoNLL-U file; documents without doc_id are named after the file."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        documents = parse_conllu(f, name=document_name(path))
    logger.info(f"Loaded {len(documents)} documents from {os.path.basename(path)}")
    return documents


def serialize_conllu(documents: Iterable[Document]) -> str:
    """
    Write documents back to CoNLL-U.

    HEAD/DEPREL carry the first governor of each vertex; DEPS lists every
    edge so that multi-governor graphs survive a round trip.
    """
    chunks = []
    for document in documents:
        for sentence in document.sentences:
            tokens = []
            for vertex in sentence.vertices:
                governors = [edge for edge, _ in sentence.governors_of(vertex.index)]
                if governors:
                    head, deprel = governors[0].governor, governors[0].relation
                    deps = "|".join(f"{e.governor}:{e.relation}" for e in governors)
                else:
                    head, deprel, deps = 0, "root", "0:root"
                tokens.append(Token([
                    ("id", vertex.index),
                    ("form", vertex.word),
                    ("lemma", vertex.lemma),
                    ("upos", "_"),
                    ("xpos", vertex.pos),
                    ("feats", None),
                    ("head", head),
                    ("deprel", deprel),
                    ("deps", deps),
                    ("misc", None),
                ]))
            metadata = OrderedDict([("doc_id", document.doc_id), ("sent_id", sentence.sentence_id)])
            if sentence.text:
                metadata["text"] = sentence.text
            chunks.append(TokenList(tokens, metadata=metadata).serialize())
    return "".join(chunks)
