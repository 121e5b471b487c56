"""
Data storage module for JSON Lines results and gold files.
"""
import os
import json
import logging
import tempfile
from typing import Iterable, List, Optional, Tuple

from src.detector import DocumentResult
from src.evalkit import GoldDocument

logger = logging.getLogger("negbio.storage")


class StorageError(ValueError):
    """Malformed JSON Lines file; `line` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DataStorage:
    """Handles reading and writing one JSON Lines file."""

    def __init__(self, filename: str):
        """Initialize the data storage with the target filename."""
        self.filename = filename

    def _read_objects(self) -> List[Tuple[int, dict]]:
        objects = []
        with open(self.filename, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as e:
                    raise StorageError(f"invalid JSON in {self.filename}: {e.msg}", lineno) from e
                if not isinstance(obj, dict) or "doc_id" not in obj:
                    raise StorageError(f"expected an object with doc_id in {self.filename}", lineno)
                objects.append((lineno, obj))
        return objects

    def load_results(self) -> List[DocumentResult]:
        """Load detection results written by save_results."""
        results = []
        for lineno, obj in self._read_objects():
            try:
                results.append(DocumentResult.from_json(obj))
            except (KeyError, TypeError, ValueError) as e:
                raise StorageError(f"invalid result in {self.filename}: {e}", lineno) from e
        logger.debug(f"Loaded {len(results)} results from {self.filename}")
        return results

    def load_gold(self) -> List[GoldDocument]:
        gold = []
        for lineno, obj in self._read_objects():
            try:
                gold.append(GoldDocument.from_json(obj))
            except (KeyError, TypeError, ValueError) as e:
                raise StorageError(f"invalid gold document in {self.filename}: {e}", lineno) from e
        logger.debug(f"Loaded {len(gold)} gold documents from {self.filename}")
        return gold

    def save_results(self, results: Iterable[DocumentResult]) -> int:
        """
        Write results atomically: a temporary file in the target directory is
        moved into place only after every line has been written.

        Returns:
            Number of documents written
        """
        directory = os.path.dirname(os.path.abspath(self.filename))
        fd, temp_path = tempfile.mkstemp(dir=directory, prefix=".negbio-", suffix=".tmp")
        count = 0
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
                for result in results:
                    f.write(dumps_result(result))
                    count += 1
            os.replace(temp_path, self.filename)
        except BaseException:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise
        logger.debug(f"Saved {count} results to {self.filename}")
        return count


def dumps_result(result: DocumentResult) -> str:
    """One JSON Lines record, newline included."""
    return json.dumps(result.to_json()) + "\n"
