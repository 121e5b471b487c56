"""
Pattern language module for Semgrex-style dependency rules.

Supported subset:
    {}                          wildcard node
    {lemma:/clear/, pos:/JJ/}   attribute tests, whole-token regex match
    A <rel B                    A is the dependent of B
    A >rel B                    A is the governor of B
    A < B, A > B                any relation label
    A <r (B >s C) <t D          parentheses close a subtree, so D constrains A

Unparenthesized chains associate to the right: in `A <r B <s C`, C
constrains B.
"""
import os
import re
import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

from ply import lex, yacc

logger = logging.getLogger("negbio.pattern")

ATTRIBUTES = ("word", "lemma", "pos")
LABEL_RE = re.compile(r"[a-z_]+(?::[a-z_]+)?")


class PatternSyntaxError(ValueError):
    """Invalid pattern source; `offset` is a byte offset into the UTF-8 source."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at byte {offset}")


class RuleFileError(ValueError):
    """Invalid rule file line."""

    def __init__(self, message: str, line: Optional[int] = None, rule_id: Optional[str] = None):
        self.line = line
        self.rule_id = rule_id
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Direction(Enum):
    DEPENDENT_OF = "<"
    GOVERNOR_OF = ">"


class Category(Enum):
    NEGATION = "negation"
    UNCERTAINTY = "uncertainty"


@dataclass(frozen=True)
class NodeConstraint:
    """Attribute tests of one pattern node; no tests means wildcard."""
    tests: Tuple[Tuple[str, str], ...] = ()
    _compiled: Tuple[Tuple[str, "re.Pattern"], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tests = tuple((str(a), str(r)) for a, r in self.tests)
        seen = set()
        for attribute, _ in tests:
            if attribute not in ATTRIBUTES:
                raise ValueError(f"unknown attribute {attribute!r}")
            if attribute in seen:
                raise ValueError(f"duplicate attribute {attribute!r}")
            seen.add(attribute)
        object.__setattr__(self, "tests", tests)
        object.__setattr__(self, "_compiled", tuple((a, re.compile(r)) for a, r in tests))

    @property
    def is_wildcard(self) -> bool:
        return not self.tests

    def matches(self, vertex) -> bool:
        """True when every regex matches the whole of the vertex attribute."""
        return all(p.fullmatch(vertex.attribute(a)) is not None for a, p in self._compiled)

    def render(self) -> str:
        if not self.tests:
            return "{}"
        body = ", ".join(f"{a}:/{_escape_regex(r)}/" for a, r in self.tests)
        return "{" + body + "}"


@dataclass(frozen=True)
class RelationOp:
    direction: Direction
    label: Optional[str] = None

    def __post_init__(self):
        if self.label is not None and not LABEL_RE.fullmatch(self.label):
            raise ValueError(f"invalid relation label {self.label!r}")

    def render(self) -> str:
        return self.direction.value + (self.label or "")


@dataclass(frozen=True)
class PatternAst:
    anchor: NodeConstraint
    children: Tuple[Tuple[RelationOp, "PatternAst"], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def size(self) -> int:
        return 1 + sum(child.size() for _, child in self.children)


@dataclass(frozen=True)
class QueryArc:
    source: int
    target: int
    relation: RelationOp


@dataclass(frozen=True)
class QueryGraph:
    """
    Compiled pattern: nodes numbered in preorder, anchor is node 0.

    Every arc goes from a parent node to a child node with a larger id, so
    the arcs form a tree rooted at the anchor.
    """
    nodes: Tuple[NodeConstraint, ...]
    arcs: Tuple[QueryArc, ...]
    _parent: Dict[int, QueryArc] = field(init=False, repr=False, compare=False)
    _children: Dict[int, Tuple[QueryArc, ...]] = field(init=False, repr=False, compare=False)

    anchor = 0

    def __post_init__(self):
        nodes, arcs = tuple(self.nodes), tuple(self.arcs)
        if not nodes:
            raise ValueError("a query graph needs at least one node")
        if len(arcs) != len(nodes) - 1:
            raise ValueError(f"{len(nodes)} nodes need {len(nodes) - 1} arcs, got {len(arcs)}")
        parent = {}
        children: Dict[int, List[QueryArc]] = {i: [] for i in range(len(nodes))}
        for arc in arcs:
            if not 0 <= arc.source < arc.target < len(nodes):
                raise ValueError(f"arc {arc.source}->{arc.target} does not point from parent to child")
            if arc.target in parent:
                raise ValueError(f"node {arc.target} has two parents")
            parent[arc.target] = arc
            children[arc.source].append(arc)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "_parent", parent)
        object.__setattr__(self, "_children", {k: tuple(v) for k, v in children.items()})

    def __len__(self) -> int:
        return len(self.nodes)

    def parent_arc(self, node_id: int) -> Optional[QueryArc]:
        return self._parent.get(node_id)

    def child_arcs(self, node_id: int) -> Tuple[QueryArc, ...]:
        return self._children[node_id]


@dataclass(frozen=True)
class Rule:
    rule_id: str
    category: Category
    pattern_source: str
    compiled: QueryGraph
    rank: int
    line: int = 0


def _escape_regex(regex: str) -> str:
    return regex.replace("/", "\\/")


def _unescape_regex(body: str) -> str:
    # Only an escaped slash is rewritten; every other escape belongs to the regex
    return re.sub(r"\\(.)", lambda m: "/" if m.group(1) == "/" else m.group(0), body)


class _PatternParser:
    """ply lexer and LALR parser for the pattern grammar."""

    tokens = ("REL", "REGEX", "NAME", "LBRACE", "RBRACE", "LPAREN", "RPAREN", "COLON", "COMMA")

    t_LBRACE = r"\{"
    t_RBRACE = r"\}"
    t_LPAREN = r"\("
    t_RPAREN = r"\)"
    t_COLON = r":"
    t_COMMA = r","
    t_ignore = " \t\r\n"

    def t_REL(self, t):
        r"[<>](?:[a-z_]+(?::[a-z_]+)?)?"
        return t

    def t_REGEX(self, t):
        r"/(?:[^/\\]|\\.)*/"
        t.value = _unescape_regex(t.value[1:-1])
        return t

    def t_NAME(self, t):
        r"[A-Za-z_][A-Za-z0-9_]*"
        return t

    def t_error(self, t):
        raise PatternSyntaxError(f"illegal character {t.value[0]!r}", self._offset(t.lexpos))

    # Grammar

    def p_pattern(self, p):
        "pattern : node children"
        p[0] = PatternAst(p[1], tuple(p[2]))

    def p_node_wildcard(self, p):
        "node : LBRACE RBRACE"
        p[0] = NodeConstraint()

    def p_node_tests(self, p):
        "node : LBRACE tests RBRACE"
        seen = set()
        for attribute, regex, attr_pos, regex_pos in p[2]:
            if attribute in seen:
                raise PatternSyntaxError(f"duplicate attribute {attribute!r}", self._offset(attr_pos))
            seen.add(attribute)
            try:
                re.compile(regex)
            except (re.error, OverflowError, RecursionError) as e:
                raise PatternSyntaxError(f"invalid regex /{regex}/: {e}", self._offset(regex_pos)) from e
        p[0] = NodeConstraint(tuple((a, r) for a, r, _, _ in p[2]))

    def p_tests_one(self, p):
        "tests : test"
        p[0] = [p[1]]

    def p_tests_more(self, p):
        "tests : tests COMMA test"
        p[0] = p[1] + [p[3]]

    def p_test(self, p):
        "test : NAME COLON REGEX"
        if p[1] not in ATTRIBUTES:
            raise PatternSyntaxError(f"unknown attribute {p[1]!r}", self._offset(p.lexpos(1)))
        p[0] = (p[1], p[3], p.lexpos(1), p.lexpos(3))

    def p_children_empty(self, p):
        "children :"
        p[0] = []

    def p_children_chain(self, p):
        "children : REL node children"
        p[0] = [(self._relation(p[1]), PatternAst(p[2], tuple(p[3])))]

    def p_children_group(self, p):
        "children : REL LPAREN pattern RPAREN children"
        p[0] = [(self._relation(p[1]), p[3])] + p[5]

    def p_error(self, p):
        if p is None:
            raise PatternSyntaxError("unexpected end of pattern", self._offset(len(self._source)))
        raise PatternSyntaxError(f"unexpected {p.value!r}", self._offset(p.lexpos))

    def __init__(self):
        self._source = ""
        self.lexer = lex.lex(module=self, errorlog=lex.NullLogger())
        self.parser = yacc.yacc(
            module=self,
            start="pattern",
            debug=False,
            write_tables=False,
            tabmodule="negbio_pattern_parsetab",
            errorlog=yacc.NullLogger(),
        )

    @staticmethod
    def _relation(token: str) -> RelationOp:
        return RelationOp(Direction(token[0]), token[1:] or None)

    def _offset(self, position: int) -> int:
        return len(self._source[:position].encode("utf-8"))

    def parse(self, source: str) -> PatternAst:
        self._source = source
        return self.parser.parse(source, lexer=self.lexer.clone())


_parser: Optional[_PatternParser] = None
_parser_lock = threading.Lock()


def parse_pattern(source: str) -> PatternAst:
    """
    Parse a pattern source string.

    Raises:
        PatternSyntaxError: on any lexical, syntactic or regex error
    """
    global _parser
    if not source or not source.strip():
        raise PatternSyntaxError("empty pattern", 0)
    with _parser_lock:
        if _parser is None:
            _parser = _PatternParser()
        return _parser.parse(source)


def render_pattern(ast: PatternAst) -> str:
    """
    Render an AST as canonical source.

    A child is parenthesized when it has children of its own or when
    another child follows it; otherwise its chain is written inline.
    """
    parts = [ast.anchor.render()]
    last = len(ast.children) - 1
    for position, (relation, child) in enumerate(ast.children):
        body = render_pattern(child)
        if child.children or position < last:
            parts.append(f"{relation.render()} ({body})")
        else:
            parts.append(f"{relation.render()} {body}")
    return " ".join(parts)


def compile_pattern(ast: PatternAst) -> QueryGraph:
    """Compile an AST into a query graph with preorder node ids (anchor = 0)."""
    nodes: List[NodeConstraint] = []
    arcs: List[QueryArc] = []

    def visit(node: PatternAst) -> int:
        node_id = len(nodes)
        nodes.append(node.anchor)
        for relation, child in node.children:
            child_id = visit(child)
            arcs.append(QueryArc(node_id, child_id, relation))
        return node_id

    visit(ast)
    arcs.sort(key=lambda arc: arc.target)
    return QueryGraph(tuple(nodes), tuple(arcs))


def load_rules(stream: Iterable[str]) -> List[Rule]:
    """
    Load a rule file: one `rule_id<TAB>category<TAB>pattern` per line.

    Blank lines and lines starting with `#` are ignored. Patterns are parsed
    and compiled eagerly.
    """
    rules: List[Rule] = []
    seen: Dict[str, int] = {}

    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue

        parts = line.split("\t")
        if len(parts) != 3:
            raise RuleFileError("expected rule_id<TAB>category<TAB>pattern", lineno)
        rule_id, category_token, source = (part.strip() for part in parts)

        if not rule_id:
            raise RuleFileError("empty rule id", lineno)
        if rule_id in seen:
            raise RuleFileError(f"duplicate rule id {rule_id!r} (first on line {seen[rule_id]})", lineno, rule_id)
        try:
            category = Category(category_token)
        except ValueError:
            raise RuleFileError(
                f"rule {rule_id}: category must be 'negation' or 'uncertainty', got {category_token!r}",
                lineno, rule_id,
            )
        try:
            ast = parse_pattern(source)
        except PatternSyntaxError as e:
            raise RuleFileError(f"rule {rule_id}: {e}", lineno, rule_id) from e

        seen[rule_id] = lineno
        rules.append(Rule(
            rule_id=rule_id,
            category=category,
            pattern_source=source,
            compiled=compile_pattern(ast),
            rank=len(rules),
            line=lineno,
        ))

    logger.debug(f"Loaded {len(rules)} rules")
    return rules


def load_rule_file(path: str) -> List[Rule]:
    with open(path, "r", encoding="utf-8") as f:
        rules = load_rules(f)
    negation = sum(1 for r in rules if r.category is Category.NEGATION)
    logger.info(f"Loaded {len(rules)} rules from {os.path.basename(path)} "
                f"({negation} negation, {len(rules) - negation} uncertainty)")
    return rules
