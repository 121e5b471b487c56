"""
Command-line interface: detect, eval and match subcommands.

Exit codes: 0 success, 1 input or data error, 2 pattern syntax error.
Diagnostics go to standard error, data to standard output or --out.
"""
import os
import sys
import logging
import argparse
from dataclasses import dataclass, field
from typing import List, Optional

import config
from src.baseline import LexiconBaseline, SurfaceBaseline
from src.data_storage import DataStorage, StorageError, dumps_result
from src.detector import Detector
from src.evalkit import EvaluationError, breakdown_rows, eval_negation, eval_positive, format_scores, report
from src.graph_ingest import ConlluParseError, GraphError, load_conllu
from src.lexicon import LexiconError, load_lexicon_file
from src.matcher import MatchOptions, iter_bindings
from src.pattern_lang import PatternSyntaxError, RuleFileError, compile_pattern, load_rule_file, parse_pattern
from src.pipeline import NegBioPipeline
from src.utils import check_paths, document_name, expand_inputs, resolve_log_level, setup_logging

logger = logging.getLogger("negbio.cli")

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_PATTERN_ERROR = 2

INPUT_ERRORS = (ConlluParseError, GraphError, RuleFileError, LexiconError, StorageError, EvaluationError, OSError)


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1); exit 2 is kept for pattern syntax errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    inputs: List[str] = field(default_factory=list)
    rules: str = config.PATHS["rules"]
    lexicon: str = config.PATHS["lexicon"]
    output: Optional[str] = None
    gold: Optional[str] = None
    mode: str = "positive"
    jobs: int = config.SETTINGS["jobs"]
    method: str = "graph"
    use_negation_rules: bool = config.SETTINGS["use_negation_rules"]
    use_uncertainty_rules: bool = config.SETTINGS["use_uncertainty_rules"]
    window: Optional[int] = config.SURFACE_BASELINE["window"]
    global_injectivity: bool = config.SETTINGS["global_injectivity"]
    label_prefix_match: bool = config.SETTINGS["label_prefix_match"]
    pattern: Optional[str] = None
    anchor: Optional[str] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        values = {k: v for k, v in vars(args).items() if k in cls.__dataclass_fields__ and v is not None}
        if getattr(args, "no_negation", False):
            values["use_negation_rules"] = False
        if getattr(args, "no_uncertainty", False):
            values["use_uncertainty_rules"] = False
        if getattr(args, "unbounded_window", False):
            values["window"] = None
        return cls(**values)

    @property
    def match_options(self) -> MatchOptions:
        return MatchOptions(self.global_injectivity, self.label_prefix_match)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="negbio", description="Negation and uncertainty detection over dependency graphs")
    parser.add_argument("--log-level", help="Diagnostic log level (default: LOG_LEVEL or INFO)")
    subparsers = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)
    subparsers.required = True

    detect = subparsers.add_parser("detect", help="Label findings in CoNLL-U documents")
    detect.add_argument("--rules", help="Rule file (default: bundled rules)")
    detect.add_argument("--lexicon", help="Lexicon file (default: bundled lexicon)")
    detect.add_argument("--in", dest="inputs", action="append", required=True, metavar="PATH",
                        help="CoNLL-U file or glob; repeatable")
    detect.add_argument("--out", dest="output", help="Output JSON Lines file (default: stdout)")
    detect.add_argument("--jobs", type=int, help="Worker threads")
    detect.add_argument("--method", choices=["graph", "surface", "lexicon"], help="Classifier (default: graph)")
    detect.add_argument("--no-negation", action="store_true", help="Disable negation rules")
    detect.add_argument("--no-uncertainty", action="store_true", help="Disable uncertainty rules")
    detect.add_argument("--window", type=int, help="Surface baseline trigger window in tokens")
    detect.add_argument("--unbounded-window", action="store_true", help="Surface baseline scopes to sentence end")
    detect.add_argument("--global-injectivity", action="store_true", default=None,
                        help="Bind all query nodes to distinct vertices")
    detect.add_argument("--label-prefix-match", action="store_true", default=None,
                        help="Let a pattern label match its subtypes")
    detect.set_defaults(handler=cmd_detect, subparser=detect)

    evaluate = subparsers.add_parser("eval", help="Score results against gold annotations")
    evaluate.add_argument("--in", dest="inputs", action="append", required=True, metavar="PATH",
                          help="Results file or glob; repeatable, one report row each")
    evaluate.add_argument("--gold", required=True, help="Gold JSON Lines file")
    evaluate.add_argument("--mode", choices=["positive", "negation"], help="Evaluation protocol (default: positive)")
    evaluate.set_defaults(handler=cmd_eval, subparser=evaluate)

    match = subparsers.add_parser("match", help="Print all bindings of a pattern")
    match.add_argument("--pattern", required=True, help="Pattern source")
    match.add_argument("--in", dest="inputs", action="append", required=True, metavar="PATH",
                       help="CoNLL-U file or glob; repeatable")
    match.add_argument("--anchor", help="Anchor vertex index or lemma (default: every vertex)")
    match.set_defaults(handler=cmd_match, subparser=match)

    return parser


def _build_engine(run: RunConfig):
    lexicon = load_lexicon_file(run.lexicon)
    if run.method == "lexicon":
        return LexiconBaseline(lexicon)
    if run.method == "surface":
        return SurfaceBaseline.from_settings(lexicon, {"window": run.window})
    return Detector(
        lexicon,
        load_rule_file(run.rules),
        options=run.match_options,
        use_negation_rules=run.use_negation_rules,
        use_uncertainty_rules=run.use_uncertainty_rules,
    )


def cmd_detect(run: RunConfig) -> int:
    """Run detection over the inputs and write JSON Lines results."""
    required = [run.lexicon] + ([run.rules] if run.method == "graph" else [])
    missing = check_paths(required)
    if missing:
        logger.error(f"Missing input files: {', '.join(missing)}")
        return EXIT_INPUT_ERROR

    try:
        engine = _build_engine(run)
        pipeline = NegBioPipeline(engine, jobs=run.jobs)
        results = pipeline.process_files(expand_inputs(run.inputs))
        if run.output:
            DataStorage(run.output).save_results(results)
            logger.info(f"Wrote {len(results)} documents to {run.output}")
        else:
            sys.stdout.write("".join(dumps_result(r) for r in results))
    except INPUT_ERRORS as e:
        logger.error(f"Detection failed: {e}")
        return EXIT_INPUT_ERROR

    return EXIT_OK


def cmd_eval(run: RunConfig) -> int:
    """Print a P/R/F report, one row per results file."""
    missing = check_paths([run.gold])
    if missing or not run.gold:
        logger.error(f"Missing gold file: {run.gold}")
        return EXIT_INPUT_ERROR

    paths = expand_inputs(run.inputs)
    try:
        gold = DataStorage(run.gold).load_gold()
        rows = []
        evaluations = []
        for path in paths:
            results = DataStorage(path).load_results()
            if run.mode == "negation":
                rows.append((document_name(path), eval_negation(results, gold)))
            else:
                evaluation = eval_positive(results, gold)
                evaluations.append(evaluation)
                rows.append((document_name(path), evaluation.overall))
    except INPUT_ERRORS as e:
        logger.error(f"Evaluation failed: {e}")
        return EXIT_INPUT_ERROR

    title = "negation" if run.mode == "negation" else "positive"
    print(report(rows, title=title))
    if len(evaluations) == 1:
        print()
        print(report(breakdown_rows(evaluations[0]), title="finding"))
        print(f"macro {format_scores(*evaluations[0].macro())}")
    return EXIT_OK


def _anchors(graph, anchor: Optional[str]) -> List[int]:
    if anchor is None:
        return [v.index for v in graph.vertices]
    if anchor.isdigit():
        index = int(anchor)
        return [index] if graph.has_vertex(index) else []
    return [v.index for v in graph.find_by_lemma(anchor)]


def cmd_match(run: RunConfig) -> int:
    """Print every binding of a pattern, per sentence and anchor candidate."""
    try:
        query = compile_pattern(parse_pattern(run.pattern))
    except PatternSyntaxError as e:
        logger.error(f"Pattern syntax error: {e}")
        return EXIT_PATTERN_ERROR

    options = run.match_options
    found = 0
    try:
        for path in expand_inputs(run.inputs):
            for document in load_conllu(path):
                for graph in document.sentences:
                    for start in _anchors(graph, run.anchor):
                        for binding in iter_bindings(graph, query, start, options):
                            nodes = " ".join(
                                f"{node}={vertex}:{graph.vertex(vertex).word}"
                                for node, vertex in enumerate(binding.assignment)
                            )
                            scope = ",".join(str(v) for v in sorted(binding.scope))
                            print(f"{document.doc_id}\t{graph.sentence_id}\t{start}\t{nodes}\tscope={scope}")
                            found += 1
    except INPUT_ERRORS as e:
        logger.error(f"Matching failed: {e}")
        return EXIT_INPUT_ERROR

    logger.info(f"Found {found} bindings")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(
        log_file=os.getenv("LOG_FILE") or config.SETTINGS["log_file"],
        log_level=resolve_log_level(args.log_level),
    )
    run = RunConfig.from_args(args)

    if not expand_inputs(run.inputs):
        args.subparser.print_usage(sys.stderr)
        logger.error(f"No input files match {' '.join(run.inputs)}")
        return EXIT_INPUT_ERROR

    return args.handler(run)
