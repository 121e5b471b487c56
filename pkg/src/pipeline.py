"""
Pipeline module for coordinating corpus-level detection.
"""
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional

import config
from src.detector import DocumentResult
from src.graph_ingest import ConlluParseError, Document, load_conllu

logger = logging.getLogger("negbio.pipeline")


class NegBioPipeline:
    """Main pipeline class that runs an engine over whole corpora."""

    def __init__(self, engine, jobs: Optional[int] = None):
        """
        Initialize the pipeline.

        Args:
            engine: Any object with a `detect(document) -> DocumentResult` method
                (the graph detector or one of the baselines)
            jobs: Worker threads; defaults to config.SETTINGS["jobs"]
        """
        self.engine = engine
        self.jobs = max(1, jobs if jobs is not None else config.SETTINGS["jobs"])

        # Statistics of the last run
        self.document_count = 0
        self.sentence_count = 0
        self.mention_count = 0
        self.status_counts: Counter = Counter()

        logger.info(f"Pipeline initialized with method {getattr(engine, 'method', type(engine).__name__)} "
                    f"and {self.jobs} job(s)")

    def load_documents(self, paths: Iterable[str]) -> List[Document]:
        """
        Load CoNLL-U files into one corpus.

        Raises:
            ConlluParseError: on malformed input or a doc_id present in two files
        """
        documents: List[Document] = []
        origin: Dict[str, str] = {}
        for path in paths:
            for document in load_conllu(path):
                if document.doc_id in origin:
                    raise ConlluParseError(
                        f"doc_id {document.doc_id!r} appears in both {origin[document.doc_id]} and {path}"
                    )
                origin[document.doc_id] = path
                documents.append(document)
        return documents

    def process_corpus(self, documents: List[Document]) -> List[DocumentResult]:
        """
        Detect every document and return results sorted by doc_id.

        Work is fanned out to a thread pool when more than one job is
        configured; results are merged after all documents finish, so the
        output does not depend on the number of jobs.
        """
        if self.jobs > 1 and len(documents) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as executor:
                results = list(executor.map(self.engine.detect, documents))
        else:
            results = [self.engine.detect(document) for document in documents]

        results.sort(key=lambda r: r.doc_id)
        self._record(documents, results)
        return results

    def process_files(self, paths: Iterable[str]) -> List[DocumentResult]:
        return self.process_corpus(self.load_documents(paths))

    def _record(self, documents: List[Document], results: List[DocumentResult]) -> None:
        self.document_count = len(results)
        self.sentence_count = sum(len(d.sentences) for d in documents)
        self.mention_count = sum(len(r.mentions) for r in results)
        self.status_counts = Counter(m.status.value for r in results for m in r.mentions)

        logger.info(f"Processed {self.document_count} documents, {self.sentence_count} sentences, "
                    f"{self.mention_count} mentions (positive: {self.status_counts['positive']}, "
                    f"negative: {self.status_counts['negative']}, uncertain: {self.status_counts['uncertain']})")

    def get_stats(self) -> Dict:
        """
        Get statistics about the last run.

        Returns:
            Dictionary containing processing statistics
        """
        return {
            "document_count": self.document_count,
            "sentence_count": self.sentence_count,
            "mention_count": self.mention_count,
            "positive_count": self.status_counts["positive"],
            "negative_count": self.status_counts["negative"],
            "uncertain_count": self.status_counts["uncertain"],
        }
