"""
Utilities module with helper functions.
"""
import os
import sys
import glob
import logging
from typing import Iterable, List, Optional

import config

# Setup logging helpers
def setup_logging(log_file: Optional[str] = None, log_level=logging.INFO):
    """Set up logging with a stderr handler and an optional file handler."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True
    )

    # Return the package logger
    return logging.getLogger("negbio")

def resolve_log_level(name: Optional[str] = None) -> int:
    """
    Resolve a log level name from the argument, LOG_LEVEL or the settings default.

    Unknown names fall back to INFO.
    """
    name = name or os.getenv("LOG_LEVEL") or config.SETTINGS["log_level"]
    level = logging.getLevelName(str(name).upper())
    return level if isinstance(level, int) else logging.INFO

# Path helpers
def expand_inputs(patterns: Iterable[str]) -> List[str]:
    """Expand paths and glob patterns into a sorted, duplicate-free list of files."""
    found = set()
    for pattern in patterns:
        matches = glob.glob(pattern)
        if matches:
            found.update(m for m in matches if os.path.isfile(m))
        elif os.path.isfile(pattern):
            found.add(pattern)
    return sorted(found)

def check_paths(paths: Iterable[Optional[str]]) -> List[str]:
    """Check that every referenced file exists; return the missing ones."""
    missing = []

    for path in paths:
        if path and not os.path.isfile(path):
            missing.append(path)

    return missing

def document_name(path: str) -> str:
    """Name used for a document when the input carries no doc_id."""
    return os.path.splitext(os.path.basename(path))[0]
