"""
Evaluation module: scores detection results against gold annotations.

Two protocols are supported: document-level positive findings, counted per
(document, finding type) pair, and mention-level negation, counted per
(document, finding type, sentence, head) tuple.
"""
import logging
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from tabulate import tabulate

from src.detector import DocumentResult
from src.lexicon import AssertionStatus, FindingType

logger = logging.getLogger("negbio.eval")

NegatedMention = Tuple[FindingType, str, int]


class EvaluationError(ValueError):
    """Results and gold cannot be compared; `missing_ids` names the offending documents."""

    def __init__(self, message: str, missing_ids: Sequence[str] = ()):
        self.missing_ids = list(missing_ids)
        if self.missing_ids:
            message = f"{message}: {', '.join(self.missing_ids)}"
        super().__init__(message)


@dataclass(frozen=True)
class GoldDocument:
    doc_id: str
    positive_findings: FrozenSet[FindingType] = frozenset()
    negated_mentions: Optional[FrozenSet[NegatedMention]] = None

    @classmethod
    def from_json(cls, obj: Dict) -> "GoldDocument":
        doc_id = str(obj["doc_id"])
        findings = [FindingType(name) for name in obj.get("positive_findings", [])]
        if len(set(findings)) != len(findings):
            raise EvaluationError("duplicate positive finding in gold document", [doc_id])

        negated = None
        if obj.get("negated_mentions") is not None:
            items = [
                (FindingType(m["finding"]), str(m["sentence_id"]), int(m["head"]))
                for m in obj["negated_mentions"]
            ]
            if len(set(items)) != len(items):
                raise EvaluationError("duplicate negated mention in gold document", [doc_id])
            negated = frozenset(items)
        return cls(doc_id, frozenset(findings), negated)


@dataclass(frozen=True)
class PRF:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError(f"counts must be non-negative: {self}")

    def __add__(self, other: "PRF") -> "PRF":
        return PRF(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def precision(self) -> float:
        denominator = self.tp + self.fp
        return self.tp / denominator if denominator else 0.0

    @property
    def recall(self) -> float:
        denominator = self.tp + self.fn
        return self.tp / denominator if denominator else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    @property
    def undefined(self) -> bool:
        """True when precision or recall is a 0/0 case reported as 0."""
        return self.tp + self.fp == 0 or self.tp + self.fn == 0

    @property
    def support(self) -> int:
        return self.tp + self.fp + self.fn


@dataclass(frozen=True)
class Evaluation:
    """Micro-averaged overall scores plus the per-type breakdown."""
    overall: PRF
    per_type: Dict[FindingType, PRF]

    def macro(self) -> Tuple[float, float, float]:
        """Unweighted mean of per-type P, R, F over types with any support."""
        scored = [prf for prf in self.per_type.values() if prf.support]
        if not scored:
            return 0.0, 0.0, 0.0
        n = len(scored)
        return (
            sum(p.precision for p in scored) / n,
            sum(p.recall for p in scored) / n,
            sum(p.f1 for p in scored) / n,
        )


def _align(results: Iterable[DocumentResult], gold: Iterable[GoldDocument]) -> List[Tuple[DocumentResult, GoldDocument]]:
    system = OrderedDict()
    for result in results:
        if result.doc_id in system:
            raise EvaluationError("duplicate doc_id in results", [result.doc_id])
        system[result.doc_id] = result
    reference = OrderedDict()
    for document in gold:
        if document.doc_id in reference:
            raise EvaluationError("duplicate doc_id in gold", [document.doc_id])
        reference[document.doc_id] = document

    without_gold = sorted(set(system) - set(reference))
    if without_gold:
        raise EvaluationError("documents without gold annotations", without_gold)
    without_results = sorted(set(reference) - set(system))
    if without_results:
        raise EvaluationError("gold documents without results", without_results)

    return [(system[doc_id], reference[doc_id]) for doc_id in sorted(system)]


def eval_positive(results: Iterable[DocumentResult], gold: Iterable[GoldDocument]) -> Evaluation:
    """
    Document-level evaluation of positive findings.

    A (document, type) pair is a true positive when both sides label it
    positive, a false positive when only the system does and a false
    negative when only the gold does.

    Raises:
        EvaluationError: if the document ids of results and gold differ
    """
    counts = {t: [0, 0, 0] for t in FindingType}
    for result, reference in _align(results, gold):
        predicted = result.positive_findings()
        expected = set(reference.positive_findings)
        for finding in predicted & expected:
            counts[finding][0] += 1
        for finding in predicted - expected:
            counts[finding][1] += 1
        for finding in expected - predicted:
            counts[finding][2] += 1

    per_type = OrderedDict((t, PRF(*counts[t])) for t in FindingType)
    overall = sum(per_type.values(), PRF())
    logger.info(f"Positive findings: tp={overall.tp} fp={overall.fp} fn={overall.fn}")
    return Evaluation(overall, per_type)


def eval_negation(results: Iterable[DocumentResult], gold: Iterable[GoldDocument]) -> PRF:
    """
    Mention-level evaluation of negations.

    Raises:
        EvaluationError: if ids differ or a gold document lacks negated_mentions
    """
    pairs = _align(results, gold)
    lacking = [reference.doc_id for _, reference in pairs if reference.negated_mentions is None]
    if lacking:
        raise EvaluationError("gold documents without negated_mentions", lacking)

    predicted = set()
    expected = set()
    for result, reference in pairs:
        predicted.update(
            (result.doc_id, m.finding, m.sentence_id, m.head)
            for m in result.mentions if m.status is AssertionStatus.NEGATIVE
        )
        expected.update((reference.doc_id,) + item for item in reference.negated_mentions)

    prf = PRF(len(predicted & expected), len(predicted - expected), len(expected - predicted))
    logger.info(f"Negations: tp={prf.tp} fp={prf.fp} fn={prf.fn}")
    return prf


def format_scores(precision: float, recall: float, f1: float) -> str:
    return f"{precision * 100:.1f} {recall * 100:.1f} {f1 * 100:.1f}"


def format_prf_row(prf: PRF) -> str:
    """Bare `"P R F"` percentages with one decimal place."""
    return format_scores(prf.precision, prf.recall, prf.f1)


def _cells(prf: PRF) -> List[str]:
    precision_mark = "*" if prf.tp + prf.fp == 0 else ""
    recall_mark = "*" if prf.tp + prf.fn == 0 else ""
    return [f"{prf.precision * 100:.1f}{precision_mark}", f"{prf.recall * 100:.1f}{recall_mark}", f"{prf.f1 * 100:.1f}"]


def report(rows: Sequence[Tuple[str, PRF]], title: str = "") -> str:
    """
    Render rows of (label, PRF) as a plain P/R/F table.

    A `*` marks a precision or recall that is a 0/0 case.
    """
    table = [[label] + _cells(prf) for label, prf in rows]
    return tabulate(table, headers=[title, "P", "R", "F"], tablefmt="plain", disable_numparse=True)


def breakdown_rows(evaluation: Evaluation) -> List[Tuple[str, PRF]]:
    """Per-type rows (types with support only) followed by the overall row."""
    rows = [(t.value, prf) for t, prf in evaluation.per_type.items() if prf.support]
    rows.append(("overall", evaluation.overall))
    return rows
