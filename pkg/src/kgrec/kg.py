"""Property-graph store for the master and slave knowledge graphs.

Nodes and edges follow a fixed paper-centred ontology.  Graphs are read
from and written to a pair of CSV files (nodes, edges).  The target and
exclude description texts used for ranking are composed from node
descriptions.
"""

from __future__ import annotations

import csv
import re
import string
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import (AmbiguityError, DuplicateIdError, EmptyDescriptionError,
                     EmptyInputError, KgRecError, OntologyError, ParseError,
                     ReferentialError, SchemaError)

NODE_COLUMNS = ("node_id", "label", "name", "description", "graph_role", "aliases")
EDGE_COLUMNS = ("src", "dst", "relation")
ALIAS_SEP = ";"


class Label(str, Enum):
    PAPER = "Paper"
    AUTHOR = "Author"
    VENUE = "Venue"
    DOMAIN = "Domain"
    MOTIVATION = "Motivation"
    CHALLENGE = "Challenge"
    TECHNOLOGY = "Technology"
    REFERENCE = "Reference"


class Relation(str, Enum):
    HAS_AUTHOR = "has_author"
    PUBLISHED_IN = "published_in"
    IN_DOMAIN = "in_domain"
    HAS_MOTIVATION = "has_motivation"
    ADDRESSES_CHALLENGE = "addresses_challenge"
    PROPOSES_TECHNOLOGY = "proposes_technology"
    CITES = "cites"


class GraphRole(str, Enum):
    MASTER = "master"
    SLAVE = "slave"


# relation -> (allowed source labels, allowed destination labels)
ENDPOINTS: dict[Relation, tuple[frozenset, frozenset]] = {
    Relation.HAS_AUTHOR: (frozenset({Label.PAPER}), frozenset({Label.AUTHOR})),
    Relation.PUBLISHED_IN: (frozenset({Label.PAPER}), frozenset({Label.VENUE})),
    Relation.IN_DOMAIN: (frozenset({Label.PAPER, Label.TECHNOLOGY, Label.CHALLENGE}),
                         frozenset({Label.DOMAIN})),
    Relation.HAS_MOTIVATION: (frozenset({Label.PAPER}), frozenset({Label.MOTIVATION})),
    Relation.ADDRESSES_CHALLENGE: (frozenset({Label.PAPER, Label.TECHNOLOGY}),
                                   frozenset({Label.CHALLENGE})),
    Relation.PROPOSES_TECHNOLOGY: (frozenset({Label.PAPER}), frozenset({Label.TECHNOLOGY})),
    Relation.CITES: (frozenset({Label.PAPER}), frozenset({Label.REFERENCE})),
}


@dataclass(frozen=True)
class KgNode:
    node_id: str
    label: Label
    name: str
    description: str = ""
    graph_role: GraphRole = GraphRole.MASTER
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class KgEdge:
    src: str
    dst: str
    relation: Relation


@dataclass(frozen=True)
class CompositionResult:
    text: str
    source_node_ids: tuple[str, ...]


class FrozenGraphError(KgRecError):
    pass


@dataclass
class Graph:
    """Typed property graph; mutable until :meth:`freeze` is called."""

    role: GraphRole = GraphRole.MASTER
    nodes: dict[str, KgNode] = field(default_factory=dict)
    edges: list[KgEdge] = field(default_factory=list)
    frozen: bool = False

    def _check_mutable(self):
        if self.frozen:
            raise FrozenGraphError("graph is frozen")

    def add_node(self, node: KgNode) -> None:
        self._check_mutable()
        if node.node_id in self.nodes:
            raise DuplicateIdError(node.node_id)
        self.nodes[node.node_id] = node

    def add_edge(self, edge: KgEdge) -> None:
        self._check_mutable()
        check_edge(self.nodes, edge)
        self.edges.append(edge)

    def freeze(self) -> "Graph":
        self.frozen = True
        return self

    def degree(self, node_id: str) -> int:
        return sum((e.src == node_id) + (e.dst == node_id) for e in self.edges)

    def node(self, node_id: str) -> KgNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise OntologyError(f"node {node_id!r} not found in graph") from None

    def label_counts(self) -> dict[str, int]:
        return dict(sorted(Counter(n.label.value for n in self.nodes.values()).items()))

    def relation_counts(self) -> dict[str, int]:
        return dict(sorted(Counter(e.relation.value for e in self.edges).items()))


def _edge_name(edge: KgEdge) -> str:
    return f"{edge.relation.value}({edge.src},{edge.dst})"


def check_edge(nodes: dict[str, KgNode], edge: KgEdge) -> None:
    for end in (edge.src, edge.dst):
        if end not in nodes:
            raise ReferentialError(f"edge {_edge_name(edge)} references missing node {end!r}")
    srcs, dsts = ENDPOINTS[edge.relation]
    src_label, dst_label = nodes[edge.src].label, nodes[edge.dst].label
    if src_label not in srcs or dst_label not in dsts:
        raise OntologyError(
            f"edge {_edge_name(edge)} connects {src_label.value} -> {dst_label.value}, "
            f"not allowed for {edge.relation.value}")


def _read_rows(path: Path, columns: Sequence[str]) -> Iterable[tuple[int, dict]]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, strict=True)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: missing header row") from None
        except csv.Error as exc:
            raise ParseError(f"{path}: {exc}", reader.line_num) from None
        for col in columns:
            if col not in header:
                raise SchemaError(f"{path}: missing required column {col!r}")
        while True:
            try:
                row = next(reader)
            except StopIteration:
                return
            except csv.Error as exc:
                raise ParseError(f"{path}: {exc}", reader.line_num) from None
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}: expected {len(header)} fields, found {len(row)}",
                                 reader.line_num)
            yield reader.line_num, dict(zip(header, row))


def _enum(cls, value: str, what: str, path: Path, line: int):
    try:
        return cls(value.strip())
    except ValueError:
        raise SchemaError(f"{path}:{line}: illegal {what} {value!r}") from None


def import_graph(nodes_path, edges_path, role) -> Graph:
    """Load a graph from node and edge CSV files; every node gets ``role``."""
    role = GraphRole(role)
    nodes_path, edges_path = Path(nodes_path), Path(edges_path)
    graph = Graph(role=role)
    for line, row in _read_rows(nodes_path, NODE_COLUMNS):
        node_id = row["node_id"].strip()
        if not node_id:
            raise SchemaError(f"{nodes_path}:{line}: empty node_id")
        if row["graph_role"].strip():
            _enum(GraphRole, row["graph_role"], "graph_role", nodes_path, line)
        aliases = tuple(a.strip() for a in row["aliases"].split(ALIAS_SEP) if a.strip())
        graph.add_node(KgNode(
            node_id=node_id,
            label=_enum(Label, row["label"], "label", nodes_path, line),
            name=row["name"].strip(),
            description=row["description"].strip(),
            graph_role=role,
            aliases=aliases,
        ))
    for line, row in _read_rows(edges_path, EDGE_COLUMNS):
        graph.add_edge(KgEdge(
            src=row["src"].strip(),
            dst=row["dst"].strip(),
            relation=_enum(Relation, row["relation"], "relation", edges_path, line),
        ))
    return graph


def export_graph(graph: Graph, nodes_path, edges_path) -> None:
    with Path(nodes_path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(NODE_COLUMNS)
        for n in graph.nodes.values():
            writer.writerow([n.node_id, n.label.value, n.name, n.description,
                             n.graph_role.value, ALIAS_SEP.join(n.aliases)])
    with Path(edges_path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EDGE_COLUMNS)
        for e in graph.edges:
            writer.writerow([e.src, e.dst, e.relation.value])


def merge_into(target: Graph, extra: Graph) -> Graph:
    """Add the nodes and edges of ``extra`` to ``target`` (external knowledge)."""
    for node in extra.nodes.values():
        target.add_node(replace(node, graph_role=target.role))
    for edge in extra.edges:
        target.add_edge(edge)
    return target


_PUNCT = str.maketrans("", "", string.punctuation)
_SPACES = re.compile(r"\s+")


def normalize_name(name: str) -> str:
    return _SPACES.sub(" ", name.lower().translate(_PUNCT)).strip()


def load_aliases(path) -> dict[str, str]:
    """Read an ``alias,canonical`` CSV into a normalized alias map."""
    path = Path(path)
    mapping: dict[str, str] = {}
    for line, row in _read_rows(path, ("alias", "canonical")):
        alias, canonical = normalize_name(row["alias"]), normalize_name(row["canonical"])
        if not alias or not canonical:
            raise SchemaError(f"{path}:{line}: empty alias or canonical name")
        prev = mapping.get(alias)
        if prev is not None and prev != canonical:
            raise AmbiguityError(
                f"alias {row['alias']!r} maps to both {prev!r} and {canonical!r}")
        mapping[alias] = canonical
    return mapping


def align_entities(graph: Graph, alias_path=None, aliases: Optional[dict] = None) -> Graph:
    """Merge same-label nodes whose normalized names or aliases coincide.

    The merged node keeps the smallest node_id, the union of aliases and the
    longest description.  Edges are re-pointed and exact duplicates dropped.
    Returns a new graph.
    """
    alias_map = dict(aliases or {})
    if alias_path is not None:
        for k, v in load_aliases(alias_path).items():
            if alias_map.get(k, v) != v:
                raise AmbiguityError(f"alias {k!r} maps to both {alias_map[k]!r} and {v!r}")
            alias_map[k] = v

    parent: dict[str, str] = {nid: nid for nid in graph.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            lo, hi = sorted((ra, rb))
            parent[hi] = lo

    owner: dict[tuple[Label, str], str] = {}
    for nid in sorted(graph.nodes):
        node = graph.nodes[nid]
        keys = {normalize_name(node.name)} | {normalize_name(a) for a in node.aliases}
        keys |= {alias_map[k] for k in list(keys) if k in alias_map}
        for key in keys:
            if not key:
                continue
            slot = (node.label, key)
            if slot in owner:
                union(owner[slot], nid)
            else:
                owner[slot] = nid

    groups: dict[str, list[str]] = {}
    for nid in graph.nodes:
        groups.setdefault(find(nid), []).append(nid)

    merged = Graph(role=graph.role)
    for nid, node in graph.nodes.items():
        root = find(nid)
        if root != nid:
            continue
        members = sorted(groups[root])
        if len(members) == 1:
            merged.nodes[nid] = node
            continue
        member_nodes = [graph.nodes[m] for m in members]
        description = max(member_nodes, key=lambda n: len(n.description)).description
        alias_union = sorted({a for n in member_nodes for a in n.aliases})
        merged.nodes[root] = replace(node, description=description, aliases=tuple(alias_union))

    seen = set()
    for edge in graph.edges:
        new = KgEdge(find(edge.src), find(edge.dst), edge.relation)
        if new not in seen:
            seen.add(new)
            merged.edges.append(new)
    return merged


def _described(graph: Graph, node_id: str, label: Label) -> str:
    node = graph.node(node_id)
    if node.label is not label:
        raise OntologyError(
            f"node {node_id!r} is labeled {node.label.value}, expected {label.value}")
    if not node.description.strip():
        raise EmptyDescriptionError(node_id)
    return node.description


def compose_target_text(graph: Graph, challenge_id: str, tech_ids: Sequence[str]) -> CompositionResult:
    parts = [_described(graph, challenge_id, Label.CHALLENGE)]
    parts += [_described(graph, t, Label.TECHNOLOGY) for t in tech_ids]
    return CompositionResult(" ".join(parts), (challenge_id, *tech_ids))


def compose_exclude_text(graph: Graph, tech_ids: Sequence[str]) -> CompositionResult:
    if not tech_ids:
        raise EmptyInputError("an exclude query must name at least one technology")
    parts = [_described(graph, t, Label.TECHNOLOGY) for t in tech_ids]
    return CompositionResult(" ".join(parts), tuple(tech_ids))
