"""
Matcher module: anchored subgraph matching of query graphs in sentence graphs.
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

import config
from src.graph_ingest import SentenceGraph
from src.pattern_lang import Direction, QueryArc, QueryGraph, RelationOp

logger = logging.getLogger("negbio.matcher")


@dataclass(frozen=True)
class MatchOptions:
    global_injectivity: bool = False     # Distinct vertices for all query nodes, not only siblings
    label_prefix_match: bool = False     # Pattern label "nmod" also matches edge label "nmod:of"

    @classmethod
    def from_settings(cls, settings: Optional[Dict] = None) -> "MatchOptions":
        settings = settings if settings is not None else config.SETTINGS
        return cls(
            global_injectivity=bool(settings.get("global_injectivity", False)),
            label_prefix_match=bool(settings.get("label_prefix_match", False)),
        )


@dataclass(frozen=True)
class MatchBinding:
    """Vertex bound to each query node; `assignment[i]` belongs to query node i."""
    assignment: Tuple[int, ...]

    @property
    def mapping(self) -> Dict[int, int]:
        return dict(enumerate(self.assignment))

    @property
    def scope(self) -> FrozenSet[int]:
        return frozenset(self.assignment)

    @property
    def start(self) -> int:
        return self.assignment[0]


@dataclass
class SearchStats:
    """Work counters of one or more searches."""
    candidate_tests: int = 0
    bindings: int = 0


def label_matches(edge_label: str, pattern_label: Optional[str], prefix: bool = False) -> bool:
    if pattern_label is None or edge_label == pattern_label:
        return True
    return prefix and edge_label.startswith(pattern_label + ":")


def _neighbours(g: SentenceGraph, vertex: int, relation: RelationOp, options: MatchOptions) -> List[int]:
    """Vertices reachable from `vertex` over one edge satisfying `relation`, ascending and unique."""
    if relation.direction is Direction.DEPENDENT_OF:
        edges = [(edge.relation, edge.governor) for edge, _ in g.governors_of(vertex)]
    else:
        edges = [(edge.relation, edge.dependent) for edge, _ in g.dependents_of(vertex)]
    found = {
        other for label, other in edges
        if label_matches(label, relation.label, options.label_prefix_match)
    }
    return sorted(found)


def iter_bindings(g: SentenceGraph, q: QueryGraph, start: int,
                  options: Optional[MatchOptions] = None,
                  stats: Optional[SearchStats] = None) -> Iterator[MatchBinding]:
    """
    Yield every binding of `q` in `g` with the anchor bound to `start`.

    Query nodes are bound in id order (preorder, so a node's parent is
    always bound first) and candidates are tried in ascending vertex index,
    which makes the sequence deterministic.

    Raises:
        GraphError: if `start` is not a vertex of `g`
    """
    options = options or MatchOptions()
    stats = stats if stats is not None else SearchStats()
    anchor_vertex = g.vertex(start)

    stats.candidate_tests += 1
    if not q.nodes[0].matches(anchor_vertex):
        return

    size = len(q)
    assignment: List[int] = [start] + [0] * (size - 1)
    candidates_memo: Dict[Tuple[int, int], List[int]] = {}

    def candidates(node_id: int, arc: QueryArc) -> List[int]:
        key = (node_id, assignment[arc.source])
        cached = candidates_memo.get(key)
        if cached is None:
            constraint = q.nodes[node_id]
            cached = []
            for vertex in _neighbours(g, assignment[arc.source], arc.relation, options):
                stats.candidate_tests += 1
                if constraint.matches(g.vertex(vertex)):
                    cached.append(vertex)
            candidates_memo[key] = cached
        return cached

    def taken(node_id: int, arc: QueryArc) -> set:
        if options.global_injectivity:
            return set(assignment[:node_id])
        return {assignment[s.target] for s in q.child_arcs(arc.source) if s.target < node_id}

    def extend(node_id: int) -> Iterator[MatchBinding]:
        if node_id == size:
            stats.bindings += 1
            yield MatchBinding(tuple(assignment))
            return
        arc = q.parent_arc(node_id)
        blocked = taken(node_id, arc)
        for vertex in candidates(node_id, arc):
            if vertex in blocked:
                continue
            assignment[node_id] = vertex
            yield from extend(node_id + 1)
        assignment[node_id] = 0

    yield from extend(1)


def match_anchored(g: SentenceGraph, q: QueryGraph, start: int,
                   options: Optional[MatchOptions] = None,
                   stats: Optional[SearchStats] = None) -> Optional[MatchBinding]:
    """Return the first binding with the anchor at `start`, or None."""
    return next(iter_bindings(g, q, start, options, stats), None)


def match_any(g: SentenceGraph, q: QueryGraph, start: int,
              options: Optional[MatchOptions] = None) -> bool:
    return match_anchored(g, q, start, options) is not None


def validate_binding(g: SentenceGraph, q: QueryGraph, binding: MatchBinding,
                     options: Optional[MatchOptions] = None) -> bool:
    """
    Check a binding against the query without searching.

    Used as an independent soundness check of the search.
    """
    options = options or MatchOptions()
    assignment = binding.assignment
    if len(assignment) != len(q):
        return False
    if not all(g.has_vertex(v) for v in assignment):
        return False
    if not all(node.matches(g.vertex(v)) for node, v in zip(q.nodes, assignment)):
        return False

    for arc in q.arcs:
        source, target = assignment[arc.source], assignment[arc.target]
        if arc.relation.direction is Direction.DEPENDENT_OF:
            edges = g.governors_of(source)
            witnessed = any(e.governor == target and
                            label_matches(e.relation, arc.relation.label, options.label_prefix_match)
                            for e, _ in edges)
        else:
            edges = g.dependents_of(source)
            witnessed = any(e.dependent == target and
                            label_matches(e.relation, arc.relation.label, options.label_prefix_match)
                            for e, _ in edges)
        if not witnessed:
            return False

    if options.global_injectivity:
        return len(set(assignment)) == len(assignment)
    for node_id in range(len(q)):
        children = [assignment[arc.target] for arc in q.child_arcs(node_id)]
        if len(set(children)) != len(children):
            return False
    return True
