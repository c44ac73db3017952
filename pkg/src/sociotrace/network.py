"""Socio-technical network construction per time window.

The bipartite pair: G_chg (authors x files-or-entities, edge weight = that
author's change count to the artifact in the window) and G_comm (authors x
threads, weight = reply count). Uni-modal derivations: a projection that
eliminates one node kind, connecting each pair of kept neighbors with
weight(u, x) + weight(v, x) summed over eliminated nodes x; and a temporal
transformation where consecutive changes to the same artifact by distinct
authors A then B yield a directed edge A -> B (arrow follows time) with
weight = lines added by A's change + lines added by B's change.

Community detection is seeded weighted label propagation, order-pinned so
identical inputs always give identical assignments.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .errors import InvalidRangeError


@dataclass(frozen=True)
class TimeWindow:
    index: int
    start: datetime
    end: datetime  # exclusive

    def contains(self, instant: datetime) -> bool:
        return self.start <= instant < self.end


@dataclass
class ChangeEvent:
    """One identity-resolved change row, the join of a FileChangeRecord or
    EntityChangeRecord with commit metadata and an identity id."""

    identity_id: int
    author_label: str
    timestamp: datetime
    file_path: str
    lines_added: int
    lines_removed: int
    commit_hash: str
    is_binary: bool = False
    change_kind: str = "modify"
    entity_name: str = ""

    @property
    def artifact_key(self) -> str:
        if self.entity_name:
            return f"{self.file_path}::{self.entity_name}"
        return self.file_path


@dataclass
class CommEvent:
    """One identity-resolved communication row (mail message or issue
    comment); thread_id carries a mail:/issue: namespace prefix."""

    identity_id: int
    author_label: str
    timestamp: datetime
    thread_id: str


@dataclass
class BipartiteGraph:
    left_kind: str
    right_kind: str
    left_nodes: dict[str, str] = field(default_factory=dict)  # id -> label
    right_nodes: dict[str, str] = field(default_factory=dict)
    edges: dict[tuple[str, str], float] = field(default_factory=dict)


@dataclass
class UniModalGraph:
    node_kind: str
    directed: bool
    nodes: dict[str, str] = field(default_factory=dict)
    edges: dict[tuple[str, str], float] = field(default_factory=dict)
    community: dict[str, int] | None = None

    def neighbors(self, node: str) -> dict[str, float]:
        out: dict[str, float] = {}
        for (u, v), w in self.edges.items():
            if u == node:
                out[v] = out.get(v, 0.0) + w
            elif v == node:
                out[u] = out.get(u, 0.0) + w
        return out


@dataclass
class SocioTechnicalNetwork:
    window: TimeWindow
    g_chg: BipartiteGraph
    g_comm: BipartiteGraph
    collab: UniModalGraph
    comm: UniModalGraph


def canonical_edge(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


def window_slices(start: datetime, end: datetime, window_days: int) -> list[TimeWindow]:
    """Abutting windows of window_days starting at start; the last one is
    truncated at end, so coverage of [start, end) is exact."""
    if window_days < 1:
        raise InvalidRangeError(f"window_days must be >= 1, got {window_days}")
    if start >= end:
        raise InvalidRangeError(f"start {start.isoformat()} must be earlier than end {end.isoformat()}")
    step = timedelta(days=window_days)
    windows = []
    cursor = start
    index = 0
    while cursor < end:
        windows.append(TimeWindow(index=index, start=cursor, end=min(cursor + step, end)))
        cursor += step
        index += 1
    return windows


def build_author_file_network(changes: list[ChangeEvent], window: TimeWindow) -> BipartiteGraph:
    """Edge weight = the author's count of change rows to the artifact
    within the window. Right nodes are files, or file::entity composites
    when rows carry entity names."""
    right_kind = "file"
    graph = BipartiteGraph(left_kind="author", right_kind=right_kind)
    for event in changes:
        if not window.contains(event.timestamp):
            continue
        if event.entity_name:
            graph.right_kind = "entity"
        left = str(event.identity_id)
        right = event.artifact_key
        graph.left_nodes[left] = event.author_label
        graph.right_nodes[right] = right
        graph.edges[(left, right)] = graph.edges.get((left, right), 0.0) + 1.0
    return graph


def build_author_thread_network(events: list[CommEvent], window: TimeWindow) -> BipartiteGraph:
    """Edge weight = messages or comments by the identity in the thread
    within the window. Mail and issue threads coexist as distinct right
    nodes through their namespace prefix."""
    graph = BipartiteGraph(left_kind="author", right_kind="thread")
    for event in events:
        if not window.contains(event.timestamp):
            continue
        left = str(event.identity_id)
        right = event.thread_id
        graph.left_nodes[left] = event.author_label
        graph.right_nodes[right] = right
        graph.edges[(left, right)] = graph.edges.get((left, right), 0.0) + 1.0
    return graph


def project_bipartite(g: BipartiteGraph, keep: str = "left") -> UniModalGraph:
    """Eliminate one node kind: every pair {u, v} of kept nodes adjacent
    to an eliminated node x gains weight(u, x) + weight(v, x) on edge
    {u, v}. Kept nodes with no co-neighbor remain as isolated nodes."""
    if keep == "left":
        kept_nodes = g.left_nodes
        kind = g.left_kind
        incident: dict[str, list[tuple[str, float]]] = {}
        for (l, r), w in g.edges.items():
            incident.setdefault(r, []).append((l, w))
    else:
        kept_nodes = g.right_nodes
        kind = g.right_kind
        incident = {}
        for (l, r), w in g.edges.items():
            incident.setdefault(l, []).append((r, w))
    out = UniModalGraph(node_kind=kind, directed=False, nodes=dict(kept_nodes))
    for neighbors in incident.values():
        for (u, wu), (v, wv) in itertools.combinations(sorted(neighbors), 2):
            if u == v:
                continue
            key = canonical_edge(u, v)
            out.edges[key] = out.edges.get(key, 0.0) + wu + wv
    return out


def temporal_collaboration(changes: list[ChangeEvent], window: TimeWindow) -> UniModalGraph:
    """Directed author graph: order each artifact's change rows by
    (timestamp, commit hash); each consecutive pair with distinct
    identities (A earlier, B later) adds lines_added(A) + lines_added(B)
    to edge A -> B. Same-author consecutive rows add nothing. Authors
    active in the window appear as nodes even when edgeless."""
    out = UniModalGraph(node_kind="author", directed=True)
    per_artifact: dict[str, list[ChangeEvent]] = {}
    for event in changes:
        if not window.contains(event.timestamp):
            continue
        out.nodes[str(event.identity_id)] = event.author_label
        per_artifact.setdefault(event.artifact_key, []).append(event)
    for rows in per_artifact.values():
        rows.sort(key=lambda e: (e.timestamp, e.commit_hash))
        for earlier, later in zip(rows, rows[1:]):
            if earlier.identity_id == later.identity_id:
                continue
            key = (str(earlier.identity_id), str(later.identity_id))
            out.edges[key] = out.edges.get(key, 0.0) + earlier.lines_added + later.lines_added
    return out


def build_issue_file_network(
    commit_issue_refs: dict[str, list[str]],
    changes: list[ChangeEvent],
    window: TimeWindow,
) -> BipartiteGraph:
    """Edge (issue, file) weight = number of commits in the window that
    both reference the issue and change the file."""
    graph = BipartiteGraph(left_kind="issue", right_kind="file")
    per_commit_files: dict[str, set[str]] = {}
    for event in changes:
        if window.contains(event.timestamp):
            per_commit_files.setdefault(event.commit_hash, set()).add(event.file_path)
    for commit_hash, files in per_commit_files.items():
        refs = set(commit_issue_refs.get(commit_hash, []))
        for issue in refs:
            graph.left_nodes[issue] = issue
            for file_path in files:
                graph.right_nodes[file_path] = file_path
                key = (issue, file_path)
                graph.edges[key] = graph.edges.get(key, 0.0) + 1.0
    return graph


def symmetrize(g: UniModalGraph) -> UniModalGraph:
    """Directed -> undirected by summing opposing edge weights."""
    if not g.directed:
        return g
    out = UniModalGraph(node_kind=g.node_kind, directed=False, nodes=dict(g.nodes))
    for (u, v), w in g.edges.items():
        if u == v:
            continue
        key = canonical_edge(u, v)
        out.edges[key] = out.edges.get(key, 0.0) + w
    return out


def weighted_modularity(g: UniModalGraph, assignment: dict[str, int]) -> float:
    """Newman modularity over an undirected weighted graph; used to pick
    among label-propagation restarts and by tests as an oracle."""
    two_m = sum(2 * w for w in g.edges.values())
    if two_m == 0:
        return 0.0
    strength: dict[str, float] = {n: 0.0 for n in g.nodes}
    for (u, v), w in g.edges.items():
        strength[u] += w
        strength[v] += w
    q = 0.0
    for (u, v), w in g.edges.items():
        if assignment[u] == assignment[v]:
            q += w / two_m * 2
    for u in g.nodes:
        for v in g.nodes:
            if assignment[u] == assignment[v]:
                q -= (strength[u] * strength[v]) / (two_m * two_m)
    return q


def _label_propagation_once(g: UniModalGraph, rng: random.Random) -> dict[str, int]:
    nodes = sorted(g.nodes)
    label = {n: i for i, n in enumerate(nodes)}
    adjacency = {n: sorted(g.neighbors(n).items()) for n in nodes}
    for _ in range(100):
        changed = False
        for node in nodes:
            neighbor_weights: dict[int, float] = {}
            for other, w in adjacency[node]:
                neighbor_weights[label[other]] = neighbor_weights.get(label[other], 0.0) + w
            if not neighbor_weights:
                continue
            best_weight = max(neighbor_weights.values())
            best = sorted(l for l, w in neighbor_weights.items() if w == best_weight)
            if label[node] in best:
                continue
            label[node] = best[0] if len(best) == 1 else rng.choice(best)
            changed = True
        if not changed:
            break
    return label


def detect_communities(g: UniModalGraph, seed: int = 42, restarts: int = 5) -> dict[str, int]:
    """Seeded weighted label propagation. Several seeded restarts run and
    the assignment with the highest modularity wins (first found on ties),
    which keeps the known flood-prone cases stable. Community ids are
    renumbered 1..C by first appearance in sorted node order."""
    undirected = symmetrize(g)
    if not undirected.nodes:
        return {}
    best_label: dict[str, int] | None = None
    best_q = float("-inf")
    for attempt in range(restarts):
        rng = random.Random(seed + attempt)
        label = _label_propagation_once(undirected, rng)
        q = weighted_modularity(undirected, label)
        if q > best_q + 1e-12:
            best_q = q
            best_label = label
    assert best_label is not None
    renumber: dict[int, int] = {}
    out: dict[str, int] = {}
    for node in sorted(undirected.nodes):
        old = best_label[node]
        if old not in renumber:
            renumber[old] = len(renumber) + 1
        out[node] = renumber[old]
    return out


def graph_export_dict(g, meta: dict) -> dict:
    """Shared JSON export shape for both graph flavors: {meta, nodes,
    edges} with string ids and deterministic ordering."""
    if isinstance(g, BipartiteGraph):
        nodes = [
            {"id": node_id, "label": label, "type": g.left_kind}
            for node_id, label in sorted(g.left_nodes.items())
        ] + [
            {"id": node_id, "label": label, "type": g.right_kind}
            for node_id, label in sorted(g.right_nodes.items())
        ]
        directed = False
    else:
        community = g.community or {}
        nodes = []
        for node_id, label in sorted(g.nodes.items()):
            node = {"id": node_id, "label": label, "type": g.node_kind}
            if node_id in community:
                node["community"] = community[node_id]
            nodes.append(node)
        directed = g.directed
    edges = [
        {"source": u, "target": v, "weight": w}
        for (u, v), w in sorted(g.edges.items())
    ]
    full_meta = dict(meta)
    full_meta["directed"] = directed
    return {"meta": full_meta, "nodes": nodes, "edges": edges}
