"""
Baseline classifiers used for method comparison runs.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import config
from src.detector import DocumentResult
from src.graph_ingest import Document, SentenceGraph
from src.lexicon import AssertionStatus, FindingMention, LexiconEntry, recognize

logger = logging.getLogger("negbio.baseline")

Trigger = Tuple[str, ...]


class LexiconBaseline:
    """Recognition only: every mention stays positive."""

    method = "lexicon"

    def __init__(self, lexicon: List[LexiconEntry]):
        self.lexicon = tuple(lexicon)
        logger.info(f"Lexicon baseline initialized with {len(self.lexicon)} entries")

    def detect(self, document: Document) -> DocumentResult:
        mentions = []
        for sentence in document.sentences:
            mentions.extend(recognize(sentence, list(self.lexicon)))
        return DocumentResult.from_mentions(document.doc_id, mentions)


class SurfaceBaseline:
    """Handles trigger-window classification over the lemma sequence of a sentence."""

    method = "surface"

    def __init__(self, lexicon: List[LexiconEntry], negation_triggers: Sequence[str],
                 uncertainty_triggers: Sequence[str], post_negation_triggers: Sequence[str] = (),
                 window: Optional[int] = 5):
        """
        Initialize the surface baseline.

        Args:
            lexicon: Lexicon entries for recognition
            negation_triggers: Phrases that negate a mention following them
            uncertainty_triggers: Phrases that hedge a mention following them
            post_negation_triggers: Phrases that negate a mention preceding them
            window: Largest token distance between trigger and mention, None for no limit
        """
        if window is not None and window < 1:
            raise ValueError(f"window must be positive or None, got {window}")
        self.lexicon = tuple(lexicon)
        self.negation_triggers = self._prepare(negation_triggers)
        self.uncertainty_triggers = self._prepare(uncertainty_triggers)
        self.post_negation_triggers = self._prepare(post_negation_triggers)
        self.window = window

        logger.info(f"Surface baseline initialized: {len(self.negation_triggers)} negation, "
                    f"{len(self.post_negation_triggers)} post-negation, "
                    f"{len(self.uncertainty_triggers)} uncertainty triggers, "
                    f"window {window if window is not None else 'unbounded'}")

    @classmethod
    def from_settings(cls, lexicon: List[LexiconEntry], settings: Optional[Dict] = None) -> "SurfaceBaseline":
        settings = {**config.SURFACE_BASELINE, **(settings or {})}
        return cls(
            lexicon,
            negation_triggers=settings["negation_triggers"],
            uncertainty_triggers=settings["uncertainty_triggers"],
            post_negation_triggers=settings["post_negation_triggers"],
            window=settings["window"],
        )

    @staticmethod
    def _prepare(phrases: Sequence[str]) -> Tuple[Trigger, ...]:
        return tuple(tuple(p.lower().split()) for p in phrases if p.strip())

    def _within(self, distance: int) -> bool:
        return distance >= 1 and (self.window is None or distance <= self.window)

    @staticmethod
    def _occurrences(lemmas: List[str], trigger: Trigger) -> List[Tuple[int, int]]:
        """1-based (first, last) positions of a trigger in the lemma sequence."""
        size = len(trigger)
        return [
            (start + 1, start + size)
            for start in range(len(lemmas) - size + 1)
            if tuple(lemmas[start:start + size]) == trigger
        ]

    def _preceding(self, lemmas: List[str], triggers: Tuple[Trigger, ...], first: int) -> Optional[Trigger]:
        for trigger in triggers:
            for _, end in self._occurrences(lemmas, trigger):
                if self._within(first - end):
                    return trigger
        return None

    def _following(self, lemmas: List[str], triggers: Tuple[Trigger, ...], last: int) -> Optional[Trigger]:
        for trigger in triggers:
            for start, _ in self._occurrences(lemmas, trigger):
                if self._within(start - last):
                    return trigger
        return None

    def classify(self, g: SentenceGraph, m: FindingMention) -> FindingMention:
        lemmas = [v.lemma for v in g.vertices]
        first, last = m.span

        trigger = (self._preceding(lemmas, self.negation_triggers, first)
                   or self._following(lemmas, self.post_negation_triggers, last))
        if trigger:
            return m.with_status(AssertionStatus.NEGATIVE, f"surface:{' '.join(trigger)}")

        trigger = self._preceding(lemmas, self.uncertainty_triggers, first)
        if trigger:
            return m.with_status(AssertionStatus.UNCERTAIN, f"surface:{' '.join(trigger)}")

        return m.with_status(AssertionStatus.POSITIVE, None)

    def get_matched_triggers(self, g: SentenceGraph) -> List[str]:
        """
        Get every trigger phrase that occurs in a sentence.

        Args:
            g: The sentence to scan

        Returns:
            Trigger phrases in configuration order
        """
        lemmas = [v.lemma for v in g.vertices]
        triggers = self.negation_triggers + self.post_negation_triggers + self.uncertainty_triggers
        return [" ".join(t) for t in triggers if self._occurrences(lemmas, t)]

    def detect(self, document: Document) -> DocumentResult:
        mentions = []
        for sentence in document.sentences:
            for mention in recognize(sentence, list(self.lexicon)):
                mentions.append(self.classify(sentence, mention))
        return DocumentResult.from_mentions(document.doc_id, mentions)
