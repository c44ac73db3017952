"""Per-window social smells, congruence, and conventional metrics.

Smell definitions over the projected collaboration graph (collab) and the
projected communication graph (comm), both on identity ids:

- Missing Link: a collab edge whose endpoints both appear as comm nodes
  but share no comm edge.
- Organizational Silo: a collab edge with at least one endpoint absent
  from comm's node set entirely.
- covered: a collab edge that is also a comm edge.

The three cases partition collab's edge set, so their counts always sum
to |collab edges|. st_congruence = covered / |collab edges| (null when
collab has no edges); missing_communicability is its complement.

Radio Silence counts unique boundary spanners on comm: a node v scores
one point per unordered community pair (Ci, Cj) where every comm edge
crossing the pair is incident to v (and at least one crossing edge
exists). A single crossing edge therefore scores 2, one per endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from .network import (
    ChangeEvent,
    CommEvent,
    TimeWindow,
    UniModalGraph,
    canonical_edge,
    symmetrize,
)


@dataclass
class SmellReport:
    window: TimeWindow
    org_silo_count: int
    missing_link_count: int
    missing_link_pairs: list[tuple[int, int]]
    radio_silence_count: int
    st_congruence: float | None
    missing_communicability: float | None


@dataclass
class Demographics:
    window: TimeWindow
    committing_devs: int
    emailing_devs: int
    files_changed: int
    threads_active: int
    distinct_timezones: int


def _classify_edges(
    collab: UniModalGraph, comm: UniModalGraph
) -> tuple[list[tuple[str, str]], list[tuple[str, str]], list[tuple[str, str]]]:
    """Partition collab's edges into (missing_link, covered, org_silo)."""
    collab_u = symmetrize(collab)
    comm_u = symmetrize(comm)
    comm_nodes = set(comm_u.nodes)
    comm_edges = {canonical_edge(u, v) for (u, v) in comm_u.edges}
    missing, covered, silo = [], [], []
    for (u, v) in collab_u.edges:
        edge = canonical_edge(u, v)
        if u not in comm_nodes or v not in comm_nodes:
            silo.append(edge)
        elif edge in comm_edges:
            covered.append(edge)
        else:
            missing.append(edge)
    return missing, covered, silo


def _sorted_id_pairs(edges: list[tuple[str, str]]) -> list[tuple[int, int]]:
    pairs = []
    for u, v in edges:
        a, b = sorted((int(u), int(v)))
        pairs.append((a, b))
    return sorted(pairs)


def missing_links(collab: UniModalGraph, comm: UniModalGraph) -> tuple[int, list[tuple[int, int]]]:
    missing, _, _ = _classify_edges(collab, comm)
    pairs = _sorted_id_pairs(missing)
    return len(pairs), pairs


def org_silo(collab: UniModalGraph, comm: UniModalGraph) -> int:
    _, _, silo = _classify_edges(collab, comm)
    return len(silo)


def covered_links(collab: UniModalGraph, comm: UniModalGraph) -> int:
    _, covered, _ = _classify_edges(collab, comm)
    return len(covered)


def st_congruence(collab: UniModalGraph, comm: UniModalGraph) -> float | None:
    collab_u = symmetrize(collab)
    if not collab_u.edges:
        return None
    _, covered, _ = _classify_edges(collab, comm)
    return len(covered) / len(collab_u.edges)


def missing_communicability(collab: UniModalGraph, comm: UniModalGraph) -> float | None:
    congruence = st_congruence(collab, comm)
    if congruence is None:
        return None
    return 1.0 - congruence


def radio_silence(comm: UniModalGraph, communities: dict[str, int]) -> int:
    """Number of (node, {Ci, Cj}) incidences where the node carries every
    comm edge crossing that community pair."""
    comm_u = symmetrize(comm)
    crossing: dict[tuple[int, int], list[tuple[str, str]]] = {}
    for (u, v) in comm_u.edges:
        cu, cv = communities[u], communities[v]
        if cu == cv:
            continue
        pair = (min(cu, cv), max(cu, cv))
        crossing.setdefault(pair, []).append((u, v))
    count = 0
    for pair, edges in crossing.items():
        candidates = set(edges[0])
        for u, v in edges[1:]:
            candidates &= {u, v}
        count += len(candidates)
    return count


def churn_metrics(
    changes: list[ChangeEvent], window: TimeWindow
) -> tuple[list[tuple[int, str, int]], int]:
    """Churn = lines added + removed, grouped by (identity, file) within
    the window; plus the window total."""
    grouped: dict[tuple[int, str], int] = {}
    for event in changes:
        if not window.contains(event.timestamp):
            continue
        key = (event.identity_id, event.file_path)
        grouped[key] = grouped.get(key, 0) + event.lines_added + event.lines_removed
    rows = [(identity, path, churn) for (identity, path), churn in sorted(grouped.items())]
    total = sum(churn for _, _, churn in rows)
    return rows, total


def loc_estimate(changes: list[ChangeEvent], window_end: datetime) -> list[tuple[str, int]]:
    """Additive LOC estimate per file from numstat history up to the
    window end: sum of added minus removed over non-binary changes,
    floored at 0; files whose latest change is a delete report 0."""
    totals: dict[str, int] = {}
    last_kind: dict[str, tuple[datetime, str, str]] = {}
    for event in changes:
        if event.timestamp >= window_end:
            continue
        if event.is_binary:
            totals.setdefault(event.file_path, 0)
        else:
            totals[event.file_path] = (
                totals.get(event.file_path, 0) + event.lines_added - event.lines_removed
            )
        stamp = (event.timestamp, event.commit_hash, event.change_kind)
        if event.file_path not in last_kind or stamp[:2] >= last_kind[event.file_path][:2]:
            last_kind[event.file_path] = stamp
    rows = []
    for path in sorted(totals):
        loc = max(totals[path], 0)
        if last_kind[path][2] == "delete":
            loc = 0
        rows.append((path, loc))
    return rows


def bug_counts(
    issue_file_edges: list[tuple[str, str]],
    issues,
    bug_labels: set[str] | None = None,
) -> list[tuple[str, int]]:
    """bug_count(file) = distinct bug-flagged issues adjacent to the file
    in the issue-file network. An issue is a bug when any label matches
    bug_labels case-insensitively or its issue_type is "Bug"."""
    labels = {l.casefold() for l in (bug_labels or {"bug"})}
    bug_keys = set()
    for issue in issues:
        if issue.issue_type.casefold() == "bug" or any(
            l.casefold() in labels for l in issue.labels
        ):
            bug_keys.add(issue.issue_key)
    per_file: dict[str, set[str]] = {}
    for issue_key, file_path in issue_file_edges:
        if issue_key in bug_keys:
            per_file.setdefault(file_path, set()).add(issue_key)
    return [(path, len(keys)) for path, keys in sorted(per_file.items())]


def demographics(
    changes: list[ChangeEvent], comm_events: list[CommEvent], window: TimeWindow
) -> Demographics:
    """Counts for the window: developers committing, developers in the
    fused reply network, files changed, threads active, and distinct UTC
    offsets across every event timestamp."""
    committing = set()
    files = set()
    offsets = set()
    for event in changes:
        if window.contains(event.timestamp):
            committing.add(event.identity_id)
            files.add(event.file_path)
            offsets.add(event.timestamp.utcoffset())
    emailing = set()
    threads = set()
    for event in comm_events:
        if window.contains(event.timestamp):
            emailing.add(event.identity_id)
            threads.add(event.thread_id)
            offsets.add(event.timestamp.utcoffset())
    return Demographics(
        window=window,
        committing_devs=len(committing),
        emailing_devs=len(emailing),
        files_changed=len(files),
        threads_active=len(threads),
        distinct_timezones=len(offsets),
    )


def smell_report(
    window: TimeWindow,
    collab: UniModalGraph,
    comm: UniModalGraph,
    communities: dict[str, int],
) -> SmellReport:
    missing, covered, silo = _classify_edges(collab, comm)
    congruence = st_congruence(collab, comm)
    return SmellReport(
        window=window,
        org_silo_count=len(silo),
        missing_link_count=len(missing),
        missing_link_pairs=_sorted_id_pairs(missing),
        radio_silence_count=radio_silence(comm, communities),
        st_congruence=congruence,
        missing_communicability=None if congruence is None else 1.0 - congruence,
    )
