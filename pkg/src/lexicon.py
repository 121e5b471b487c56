"""
Lexicon module: dictionary recognition of the 14 finding types.
"""
import os
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

from src.graph_ingest import SentenceGraph

logger = logging.getLogger("negbio.lexicon")


class FindingType(Enum):
    ATELECTASIS = "Atelectasis"
    CARDIOMEGALY = "Cardiomegaly"
    CONSOLIDATION = "Consolidation"
    EDEMA = "Edema"
    EFFUSION = "Effusion"
    EMPHYSEMA = "Emphysema"
    FIBROSIS = "Fibrosis"
    HERNIA = "Hernia"
    INFILTRATION = "Infiltration"
    MASS = "Mass"
    NODULE = "Nodule"
    PLEURAL_THICKENING = "Pleural Thickening"
    PNEUMONIA = "Pneumonia"
    PNEUMOTHORAX = "Pneumothorax"


class AssertionStatus(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNCERTAIN = "uncertain"


class LexiconError(ValueError):
    """Invalid lexicon line; `line` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class LexiconEntry:
    finding: FindingType
    phrase: Tuple[str, ...]
    head_offset: int = 0

    def __post_init__(self):
        phrase = tuple(self.phrase)
        if not phrase or not all(phrase):
            raise LexiconError(f"{self.finding.value}: phrase must contain at least one lemma")
        if not 0 <= self.head_offset < len(phrase):
            raise LexiconError(
                f"{self.finding.value}: head offset {self.head_offset} outside phrase {' '.join(phrase)!r}"
            )
        object.__setattr__(self, "phrase", phrase)


@dataclass(frozen=True)
class FindingMention:
    """
    A recognized finding inside one sentence.

    `span` holds the first and last vertex index, inclusive. The status is
    positive exactly when no rule (or trigger) is recorded.
    """
    finding: FindingType
    sentence_id: str
    span: Tuple[int, int]
    head: int
    status: AssertionStatus = AssertionStatus.POSITIVE
    matched_rule: Optional[str] = None

    def __post_init__(self):
        first, last = self.span
        if not 1 <= first <= last:
            raise ValueError(f"invalid mention span {self.span}")
        if not first <= self.head <= last:
            raise ValueError(f"head {self.head} outside span {self.span}")
        if (self.status is AssertionStatus.POSITIVE) != (self.matched_rule is None):
            raise ValueError(f"status {self.status.value} inconsistent with rule {self.matched_rule!r}")

    def with_status(self, status: AssertionStatus, matched_rule: Optional[str] = None) -> "FindingMention":
        return replace(self, status=status, matched_rule=matched_rule)

    def to_json(self) -> Dict:
        return {
            "finding": self.finding.value,
            "sentence_id": self.sentence_id,
            "span": [self.span[0], self.span[1]],
            "head": self.head,
            "status": self.status.value,
            "rule": self.matched_rule,
        }

    @classmethod
    def from_json(cls, obj: Dict) -> "FindingMention":
        return cls(
            finding=FindingType(obj["finding"]),
            sentence_id=str(obj["sentence_id"]),
            span=(int(obj["span"][0]), int(obj["span"][1])),
            head=int(obj["head"]),
            status=AssertionStatus(obj["status"]),
            matched_rule=obj.get("rule"),
        )


def load_lexicon(stream: Iterable[str]) -> List[LexiconEntry]:
    """
    Load lexicon lines of the form `finding<TAB>lemma phrase<TAB>head_offset`.

    Phrases are lowercased. `#` lines and blank lines are skipped.
    """
    entries: List[LexiconEntry] = []
    seen = {}

    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue

        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconError("expected finding<TAB>phrase<TAB>head_offset", lineno)
        name, phrase_text, offset_text = (part.strip() for part in parts)

        try:
            finding = FindingType(name)
        except ValueError:
            raise LexiconError(f"unknown finding type {name!r}", lineno)
        try:
            head_offset = int(offset_text)
        except ValueError:
            raise LexiconError(f"head offset must be an integer, got {offset_text!r}", lineno)

        phrase = tuple(phrase_text.lower().split())
        key = (finding, phrase)
        if key in seen:
            raise LexiconError(f"duplicate entry {name}/{phrase_text!r} (first on line {seen[key]})", lineno)
        try:
            entries.append(LexiconEntry(finding, phrase, head_offset))
        except LexiconError as e:
            raise LexiconError(str(e), lineno) from e
        seen[key] = lineno

    logger.debug(f"Loaded {len(entries)} lexicon entries")
    return entries


def load_lexicon_file(path: str) -> List[LexiconEntry]:
    with open(path, "r", encoding="utf-8") as f:
        entries = load_lexicon(f)
    covered = len({e.finding for e in entries})
    logger.info(f"Loaded {len(entries)} lexicon entries covering {covered} finding types from {os.path.basename(path)}")
    return entries


def recognize(g: SentenceGraph, lexicon: List[LexiconEntry]) -> List[FindingMention]:
    """
    Find lexicon phrases in the vertex lemmas of a sentence.

    Overlapping candidates are resolved longest first, then earliest start,
    then lexicon order. Returned mentions are sorted by span start and start
    out positive.
    """
    by_first: Dict[str, List[Tuple[int, LexiconEntry]]] = {}
    for order, entry in enumerate(lexicon):
        by_first.setdefault(entry.phrase[0], []).append((order, entry))

    lemmas = [v.lemma for v in g.vertices]
    candidates = []
    for start, lemma in enumerate(lemmas):
        for order, entry in by_first.get(lemma, ()):
            length = len(entry.phrase)
            if tuple(lemmas[start:start + length]) == entry.phrase:
                candidates.append((-length, start, order, entry))
    candidates.sort(key=lambda c: c[:3])

    occupied = set()
    mentions = []
    for negative_length, start, _, entry in candidates:
        positions = range(start, start - negative_length)
        if occupied.intersection(positions):
            continue
        occupied.update(positions)
        first = start + 1
        mentions.append(FindingMention(
            finding=entry.finding,
            sentence_id=g.sentence_id,
            span=(first, first + len(entry.phrase) - 1),
            head=first + entry.head_offset,
        ))

    mentions.sort(key=lambda m: m.span)
    if mentions:
        logger.debug(f"Sentence {g.sentence_id}: recognized "
                     f"{', '.join(f'{m.finding.value}@{m.head}' for m in mentions)}")
    return mentions
