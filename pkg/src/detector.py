"""
Detector module: assigns an assertion status to every finding mention.

Each mention is classified by matching the rules with the anchor bound to
the mention's head vertex. Negation rules are tried before uncertainty
rules, each category in rank order, and the first match decides. Mention
statuses are then aggregated per document.
"""
import logging
from collections import OrderedDict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import config
from src.graph_ingest import Document, SentenceGraph
from src.lexicon import (AssertionStatus, FindingMention, FindingType, LexiconEntry,
                         load_lexicon_file, recognize)
from src.matcher import MatchBinding, MatchOptions, match_anchored
from src.pattern_lang import Category, Rule, load_rule_file

logger = logging.getLogger("negbio.detector")

CATEGORY_STATUS = {
    Category.NEGATION: AssertionStatus.NEGATIVE,
    Category.UNCERTAINTY: AssertionStatus.UNCERTAIN,
}


class DocumentLabel(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNCERTAIN = "uncertain"
    ABSENT = "absent"


# Aggregation precedence when a document mixes statuses for one finding type
_LABEL_PRECEDENCE = (
    (AssertionStatus.POSITIVE, DocumentLabel.POSITIVE),
    (AssertionStatus.UNCERTAIN, DocumentLabel.UNCERTAIN),
    (AssertionStatus.NEGATIVE, DocumentLabel.NEGATIVE),
)


def aggregate_labels(mentions: Iterable[FindingMention]) -> Dict[FindingType, DocumentLabel]:
    """Document label per finding type: positive > uncertain > negative > absent."""
    statuses: Dict[FindingType, set] = {t: set() for t in FindingType}
    for mention in mentions:
        statuses[mention.finding].add(mention.status)

    labels = OrderedDict()
    for finding in FindingType:
        labels[finding] = next(
            (label for status, label in _LABEL_PRECEDENCE if status in statuses[finding]),
            DocumentLabel.ABSENT,
        )
    return labels


@dataclass(frozen=True)
class DocumentResult:
    doc_id: str
    mentions: Tuple[FindingMention, ...]
    document_labels: Dict[FindingType, DocumentLabel]

    @classmethod
    def from_mentions(cls, doc_id: str, mentions: Iterable[FindingMention]) -> "DocumentResult":
        mentions = tuple(mentions)
        return cls(doc_id, mentions, aggregate_labels(mentions))

    def positive_findings(self) -> set:
        return {t for t, label in self.document_labels.items() if label is DocumentLabel.POSITIVE}

    def to_json(self) -> Dict:
        """JSON Lines object; every finding type is listed, in report order."""
        return OrderedDict([
            ("doc_id", self.doc_id),
            ("labels", OrderedDict(
                (t.value, self.document_labels.get(t, DocumentLabel.ABSENT).value) for t in FindingType
            )),
            ("mentions", [m.to_json() for m in self.mentions]),
        ])

    @classmethod
    def from_json(cls, obj: Dict) -> "DocumentResult":
        labels = {t: DocumentLabel.ABSENT for t in FindingType}
        for name, value in obj.get("labels", {}).items():
            labels[FindingType(name)] = DocumentLabel(value)
        mentions = tuple(FindingMention.from_json(m) for m in obj.get("mentions", []))
        return cls(str(obj["doc_id"]), mentions, labels)


def _ordered_rules(rules: Iterable[Rule]) -> List[Rule]:
    precedence = {Category.NEGATION: 0, Category.UNCERTAINTY: 1}
    return sorted(rules, key=lambda r: (precedence[r.category], r.rank))


def classify_mention(g: SentenceGraph, m: FindingMention, rules: Iterable[Rule],
                     options: Optional[MatchOptions] = None) -> FindingMention:
    """
    Classify one mention by matching rules at its head vertex.

    Args:
        g: Sentence graph containing the mention
        m: The mention; only its head is used for matching
        rules: Compiled rules of both categories

    Returns:
        A copy of the mention with status and matched rule set
    """
    for rule in _ordered_rules(rules):
        if match_anchored(g, rule.compiled, m.head, options) is not None:
            status = CATEGORY_STATUS[rule.category]
            logger.debug(f"Sentence {g.sentence_id}: {m.finding.value}@{m.head} {status.value} by {rule.rule_id}")
            return m.with_status(status, rule.rule_id)
    return m.with_status(AssertionStatus.POSITIVE, None)


def explain(g: SentenceGraph, m: FindingMention, rules: Iterable[Rule],
            options: Optional[MatchOptions] = None) -> List[Tuple[str, MatchBinding]]:
    """
    All rules matching at the mention head with their first binding.

    Ordered the way classify_mention tries them (negation rules first, then
    rank), so the first entry is the rule that decides the mention.
    """
    explanations = []
    for rule in _ordered_rules(rules):
        binding = match_anchored(g, rule.compiled, m.head, options)
        if binding is not None:
            explanations.append((rule.rule_id, binding))
    return explanations


def detect_document(d: Document, lexicon: List[LexiconEntry], rules: Iterable[Rule],
                    options: Optional[MatchOptions] = None) -> DocumentResult:
    """Recognize and classify every mention of a document, then aggregate."""
    rules = list(rules)
    mentions = []
    for sentence in d.sentences:
        for mention in recognize(sentence, lexicon):
            mentions.append(classify_mention(sentence, mention, rules, options))
    return DocumentResult.from_mentions(d.doc_id, mentions)


class Detector:
    """Immutable detection engine bundling lexicon, rules and match options."""

    method = "graph"

    def __init__(self, lexicon: List[LexiconEntry], rules: List[Rule],
                 options: Optional[MatchOptions] = None,
                 use_negation_rules: bool = True, use_uncertainty_rules: bool = True):
        """
        Initialize the detector.

        Args:
            lexicon: Lexicon entries for recognition
            rules: Compiled rules, both categories
            options: Matcher options; defaults come from config.SETTINGS
            use_negation_rules: Switch negation rules on or off
            use_uncertainty_rules: Switch uncertainty rules on or off
        """
        self._lexicon = tuple(lexicon)
        self._options = options or MatchOptions.from_settings()
        enabled = {
            Category.NEGATION: use_negation_rules,
            Category.UNCERTAINTY: use_uncertainty_rules,
        }
        self._rules = tuple(_ordered_rules(r for r in rules if enabled[r.category]))
        self._enabled = enabled

        logger.info(f"Detector ready: {len(self._lexicon)} lexicon entries, {len(self._rules)} active rules "
                    f"(negation {'on' if use_negation_rules else 'off'}, "
                    f"uncertainty {'on' if use_uncertainty_rules else 'off'})")

    @classmethod
    def from_files(cls, rules_path: Optional[str] = None, lexicon_path: Optional[str] = None,
                   **kwargs) -> "Detector":
        rules = load_rule_file(rules_path or config.PATHS["rules"])
        lexicon = load_lexicon_file(lexicon_path or config.PATHS["lexicon"])
        kwargs.setdefault("use_negation_rules", config.SETTINGS["use_negation_rules"])
        kwargs.setdefault("use_uncertainty_rules", config.SETTINGS["use_uncertainty_rules"])
        return cls(lexicon, rules, **kwargs)

    @property
    def lexicon(self) -> Tuple[LexiconEntry, ...]:
        return self._lexicon

    @property
    def rules(self) -> Tuple[Rule, ...]:
        return self._rules

    @property
    def options(self) -> MatchOptions:
        return self._options

    def uses(self, category: Category) -> bool:
        return self._enabled[category]

    def classify(self, g: SentenceGraph, m: FindingMention) -> FindingMention:
        return classify_mention(g, m, self._rules, self._options)

    def detect(self, document: Document) -> DocumentResult:
        return detect_document(document, list(self._lexicon), self._rules, self._options)
