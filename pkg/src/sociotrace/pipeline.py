"""End-to-end batch pipeline: parse -> identities -> per-window networks,
smells, demographics -> exports, plus the manifest that records what ran.

Every write goes through the atomic CSV/JSON helpers, all iteration
orders are pinned, and floats are serialized with 6 significant digits,
so identical inputs produce byte-identical outputs (manifest timestamps
aside).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import subprocess
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from . import __version__
from .config import ProjectConfig, config_to_dict
from .comms.issues import IssueComment, IssueRecord, parse_github_issues, parse_jira_issues
from .comms.mail import MailMessage, parse_mbox, thread_messages
from .errors import ToolInvocationError
from .identity import CanonicalIdentity, IdentityRow, RawActor, match_identities
from .metrics import Demographics, SmellReport, churn_metrics, demographics, loc_estimate, bug_counts, smell_report
from .network import (
    BipartiteGraph,
    ChangeEvent,
    CommEvent,
    TimeWindow,
    UniModalGraph,
    build_author_file_network,
    build_author_thread_network,
    build_issue_file_network,
    detect_communities,
    graph_export_dict,
    project_bipartite,
    temporal_collaboration,
    window_slices,
)
from .tables import atomic_write_text, format_float, write_csv, write_records
from .vcs import (
    CommitRecord,
    EntityChangeRecord,
    FileChangeRecord,
    apply_path_filters,
    extract_issue_refs,
    parse_gitlog,
    parse_gitlog_entity,
)

UI_INDEX = "ui_index.json"
MANIFEST = "manifest.json"

GRAPH_KINDS_BASE = ("collab_projection", "collab_temporal", "comm_projection", "reply")


@dataclass
class PipelineRunManifest:
    config_digest: str
    tool_versions: dict[str, str]
    started_at: str
    finished_at: str
    outputs: list[str]
    effective_config: dict
    status: str = "ok"
    failure_stage: str | None = None


@dataclass
class PipelineData:
    """Everything the per-window builders consume, parsed once."""

    commits: list[CommitRecord] = field(default_factory=list)
    file_changes: list[FileChangeRecord] = field(default_factory=list)
    entity_changes: list[EntityChangeRecord] = field(default_factory=list)
    messages: list[MailMessage] = field(default_factory=list)
    issues: list[IssueRecord] = field(default_factory=list)
    issue_comments: list[IssueComment] = field(default_factory=list)
    identity_rows: list[IdentityRow] = field(default_factory=list)
    identities: list[CanonicalIdentity] = field(default_factory=list)
    change_events: list[ChangeEvent] = field(default_factory=list)
    comm_events: list[CommEvent] = field(default_factory=list)
    commit_issue_refs: dict[str, list[str]] = field(default_factory=dict)


def compose_actor_raw(name: str, email: str) -> str:
    """Stable raw-actor string for identity resolution."""
    name = name.strip()
    email = email.strip()
    if name and email:
        return f"{name} <{email}>"
    return name or email


def git_tool(config: ProjectConfig) -> str:
    return os.environ.get("SOCIOTRACE_GIT") or config.tool_paths.git or "git"


def tool_version(binary: str) -> str:
    try:
        proc = subprocess.run([binary, "--version"], capture_output=True, text=True, timeout=30)
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    line = (proc.stdout or proc.stderr).splitlines()
    return line[0].strip() if line else "unknown"


# --- stage: version control --------------------------------------------------

def collect_vcs(config: ProjectConfig) -> tuple[list[CommitRecord], list[FileChangeRecord]]:
    commits, changes = parse_gitlog(config.git_repo_path, config.git_branch, git_tool(config))
    changes = apply_path_filters(
        changes, config.file_include_patterns, config.file_exclude_patterns
    )
    return commits, changes


def collect_entities(
    config: ProjectConfig, changes: list[FileChangeRecord]
) -> list[EntityChangeRecord]:
    if not config.tool_paths.tags_extractor:
        raise ToolInvocationError("tags_extractor", "no tags extractor configured")
    return parse_gitlog_entity(
        config.git_repo_path,
        git_tool(config),
        config.tool_paths.tags_extractor,
        config.entity_kinds,
        changes,
    )


# --- stage: communication sources --------------------------------------------

def collect_mail(config: ProjectConfig) -> list[MailMessage]:
    messages: list[MailMessage] = []
    for path in config.mbox_paths:
        messages.extend(parse_mbox(path))
    messages.sort(key=lambda m: (m.sent_timestamp, m.message_id))
    return thread_messages(messages)


def collect_issues(config: ProjectConfig) -> tuple[list[IssueRecord], list[IssueComment]]:
    source = config.issue_source
    if source.kind == "none" or not source.dir:
        return [], []
    if source.kind == "jira":
        return parse_jira_issues(source.dir)
    return parse_github_issues(source.dir)


# --- stage: identities --------------------------------------------------------

def collect_actors(
    commits: list[CommitRecord],
    messages: list[MailMessage],
    issues: list[IssueRecord],
    comments: list[IssueComment],
) -> list[RawActor]:
    seen: set[tuple[str, str]] = set()
    actors: list[RawActor] = []

    def add(raw: str, source: str):
        raw = raw.strip()
        if raw and (raw, source) not in seen:
            seen.add((raw, source))
            actors.append(RawActor(raw=raw, source=source))

    for commit in commits:
        add(compose_actor_raw(commit.author_name, commit.author_email), "git_author")
        add(compose_actor_raw(commit.committer_name, commit.committer_email), "git_committer")
    for message in messages:
        add(compose_actor_raw(message.from_name, message.from_email), "mail_from")
    for issue in issues:
        add(compose_actor_raw(issue.reporter_name, issue.reporter_email), "issue_reporter")
    for comment in comments:
        add(compose_actor_raw(comment.author_name, comment.author_email), "issue_commenter")
    actors.sort(key=lambda a: (a.raw, a.source))
    return actors


def collect(config: ProjectConfig) -> PipelineData:
    """Parse every configured source and join identities onto events."""
    data = PipelineData()
    data.commits, data.file_changes = collect_vcs(config)
    if config.granularity == "entity":
        data.entity_changes = collect_entities(config, data.file_changes)
    data.messages = collect_mail(config)
    data.issues, data.issue_comments = collect_issues(config)

    actors = collect_actors(data.commits, data.messages, data.issues, data.issue_comments)
    if actors:
        data.identity_rows, data.identities = match_identities(
            actors, config.identity_email_blacklist
        )
    id_of: dict[str, int] = {}
    label_of: dict[int, str] = {}
    for row in data.identity_rows:
        id_of[row.raw] = row.identity_id
        label_of[row.identity_id] = row.display_name

    commit_by_hash = {c.commit_hash: c for c in data.commits}

    def author_identity(commit: CommitRecord) -> tuple[int, str]:
        raw = compose_actor_raw(commit.author_name, commit.author_email)
        identity = id_of.get(raw, 0)
        return identity, label_of.get(identity, raw)

    if config.granularity == "entity":
        for entity_change in data.entity_changes:
            commit = commit_by_hash[entity_change.commit_hash]
            identity, label = author_identity(commit)
            data.change_events.append(
                ChangeEvent(
                    identity_id=identity,
                    author_label=label,
                    timestamp=commit.author_timestamp,
                    file_path=entity_change.file_path,
                    lines_added=entity_change.lines_changed_in_entity,
                    lines_removed=0,
                    commit_hash=entity_change.commit_hash,
                    is_binary=False,
                    change_kind="modify",
                    entity_name=entity_change.entity_name,
                )
            )
    else:
        for file_change in data.file_changes:
            commit = commit_by_hash[file_change.commit_hash]
            identity, label = author_identity(commit)
            data.change_events.append(
                ChangeEvent(
                    identity_id=identity,
                    author_label=label,
                    timestamp=commit.author_timestamp,
                    file_path=file_change.file_path,
                    lines_added=file_change.lines_added,
                    lines_removed=file_change.lines_removed,
                    commit_hash=file_change.commit_hash,
                    is_binary=file_change.is_binary,
                    change_kind=file_change.change_kind,
                )
            )

    for message in data.messages:
        raw = compose_actor_raw(message.from_name, message.from_email)
        identity = id_of.get(raw, 0)
        data.comm_events.append(
            CommEvent(
                identity_id=identity,
                author_label=label_of.get(identity, raw),
                timestamp=message.sent_timestamp,
                thread_id=f"mail:{message.thread_id}",
            )
        )
    # issue creation counts as a communication event on the issue's thread,
    # alongside its comments
    for issue in data.issues:
        raw = compose_actor_raw(issue.reporter_name, issue.reporter_email)
        identity = id_of.get(raw, 0)
        data.comm_events.append(
            CommEvent(
                identity_id=identity,
                author_label=label_of.get(identity, raw),
                timestamp=issue.created_timestamp,
                thread_id=f"issue:{issue.issue_key}",
            )
        )
    for comment in data.issue_comments:
        raw = compose_actor_raw(comment.author_name, comment.author_email)
        identity = id_of.get(raw, 0)
        data.comm_events.append(
            CommEvent(
                identity_id=identity,
                author_label=label_of.get(identity, raw),
                timestamp=comment.created_timestamp,
                thread_id=f"issue:{comment.issue_key}",
            )
        )

    if config.issue_id_pattern:
        for commit in data.commits:
            refs = extract_issue_refs(commit.message, config.issue_id_pattern)
            if refs:
                data.commit_issue_refs[commit.commit_hash] = refs
    return data


# --- windowing ----------------------------------------------------------------

def analysis_windows(config: ProjectConfig, data: PipelineData) -> list[TimeWindow]:
    stamps = [e.timestamp for e in data.change_events] + [e.timestamp for e in data.comm_events]
    start = config.analysis_start
    end = config.analysis_end
    if start is None:
        if not stamps:
            return []
        start = min(stamps)
    if end is None:
        if not stamps:
            return []
        # windows are end-exclusive; nudge past the last event so it lands
        # inside the final window
        end = max(stamps) + timedelta(seconds=1)
    if start >= end:
        return []
    return window_slices(start, end, config.window_days)


# --- per-window products --------------------------------------------------------

@dataclass
class WindowProducts:
    window: TimeWindow
    g_chg: BipartiteGraph
    g_comm: BipartiteGraph
    collab_projection: UniModalGraph
    collab_temporal: UniModalGraph
    comm_projection: UniModalGraph
    issue_file: BipartiteGraph | None
    smells: SmellReport
    demo: Demographics


def build_window_products(config: ProjectConfig, data: PipelineData, window: TimeWindow) -> WindowProducts:
    g_chg = build_author_file_network(data.change_events, window)
    g_comm = build_author_thread_network(data.comm_events, window)
    collab_projection = project_bipartite(g_chg, keep="left")
    collab_projection.community = detect_communities(collab_projection)
    collab_temporal = temporal_collaboration(data.change_events, window)
    collab_temporal.community = detect_communities(collab_temporal)
    comm_projection = project_bipartite(g_comm, keep="left")
    comm_projection.community = detect_communities(comm_projection)
    issue_file = None
    if config.issue_source.kind != "none" or data.commit_issue_refs:
        issue_file = build_issue_file_network(data.commit_issue_refs, data.change_events, window)
    smells = smell_report(window, collab_projection, comm_projection, comm_projection.community)
    demo = demographics(data.change_events, data.comm_events, window)
    return WindowProducts(
        window=window,
        g_chg=g_chg,
        g_comm=g_comm,
        collab_projection=collab_projection,
        collab_temporal=collab_temporal,
        comm_projection=comm_projection,
        issue_file=issue_file,
        smells=smells,
        demo=demo,
    )


# --- writers --------------------------------------------------------------------

def write_table(path: str, record_type: type, records: list) -> str:
    write_records(path, record_type, records)
    return path


def write_graph(graph, path: str, meta: dict) -> str:
    doc = graph_export_dict(graph, meta)
    for edge in doc["edges"]:
        edge["weight"] = float(format_float(edge["weight"]))
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")
    return path


def _graph_meta(config: ProjectConfig, window: TimeWindow, kind: str) -> dict:
    return {
        "project": config.project_name,
        "window_index": window.index,
        "window_start": window.start.isoformat(),
        "window_end": window.end.isoformat(),
        "kind": kind,
    }


def window_graph_files(products: WindowProducts, config: ProjectConfig, out_dir: str) -> dict[str, str]:
    """Write this window's graphs; returns {kind: filename}."""
    prefix = f"window_{products.window.index:05d}"
    named = {
        "collab_projection": products.collab_projection,
        "collab_temporal": products.collab_temporal,
        "comm_projection": products.comm_projection,
        "reply": products.g_comm,
    }
    if products.issue_file is not None:
        named["issue_file"] = products.issue_file
    files = {}
    for kind, graph in named.items():
        name = f"{prefix}_{kind}.json"
        write_graph(graph, os.path.join(out_dir, name), _graph_meta(config, products.window, kind))
        files[kind] = name
    return files


def write_identity_table(path: str, rows: list[IdentityRow]) -> None:
    write_csv(
        path,
        ["raw", "source", "identity_id", "display_name"],
        [[r.raw, r.source, str(r.identity_id), r.display_name] for r in rows],
    )


def write_ui_index(
    out_dir: str,
    config: ProjectConfig,
    windows: list[TimeWindow],
    graph_files: dict[int, dict[str, str]],
) -> str:
    doc = {
        "project": config.project_name,
        "generated_by": f"sociotrace {__version__}",
        "granularity": config.granularity,
        "window_days": config.window_days,
        "windows": [
            {
                "index": w.index,
                "start": w.start.isoformat(),
                "end": w.end.isoformat(),
                "graphs": graph_files.get(w.index, {}),
            }
            for w in windows
        ],
        "smells_csv": "smells.csv",
        "demographics_csv": "demographics.csv",
    }
    path = os.path.join(out_dir, UI_INDEX)
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")
    return path


def rebuild_ui_index(out_dir: str, config: ProjectConfig) -> str:
    """Regenerate ui_index.json from graph files already on disk."""
    graph_files: dict[int, dict[str, str]] = {}
    windows: dict[int, TimeWindow] = {}
    for name in sorted(os.listdir(out_dir)):
        if not (name.startswith("window_") and name.endswith(".json")):
            continue
        with open(os.path.join(out_dir, name), "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError:
                continue
        meta = doc.get("meta", {})
        if "window_index" not in meta or "kind" not in meta:
            continue
        index = int(meta["window_index"])
        graph_files.setdefault(index, {})[meta["kind"]] = name
        windows[index] = TimeWindow(
            index=index,
            start=datetime.fromisoformat(meta["window_start"]),
            end=datetime.fromisoformat(meta["window_end"]),
        )
    ordered = [windows[i] for i in sorted(windows)]
    return write_ui_index(out_dir, config, ordered, graph_files)


# --- run orchestration ------------------------------------------------------------

def config_digest(config_path: str) -> str:
    with open(config_path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def collect_tool_versions(config: ProjectConfig) -> dict[str, str]:
    versions = {"toolkit": f"sociotrace {__version__}", "git": tool_version(git_tool(config))}
    if config.tool_paths.tags_extractor:
        versions["tags_extractor"] = tool_version(config.tool_paths.tags_extractor)
    return versions


def write_manifest(out_dir: str, manifest: PipelineRunManifest) -> str:
    path = os.path.join(out_dir, MANIFEST)
    atomic_write_text(path, json.dumps(dataclasses.asdict(manifest), indent=1) + "\n")
    return path


def run_all(config: ProjectConfig, out_dir: str, config_path: str = "") -> PipelineRunManifest:
    """The `all` subcommand: every table, graph, metric, and the manifest.
    Fails fast; a failure manifest records the stage that broke."""
    os.makedirs(out_dir, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    digest = config_digest(config_path) if config_path else ""
    versions = collect_tool_versions(config)
    outputs: list[str] = []
    stage = "collect"
    try:
        data = collect(config)
        stage = "tables"
        write_records(os.path.join(out_dir, "commits.csv"), CommitRecord, data.commits)
        write_records(os.path.join(out_dir, "file_changes.csv"), FileChangeRecord, data.file_changes)
        outputs += ["commits.csv", "file_changes.csv"]
        if config.granularity == "entity":
            write_records(
                os.path.join(out_dir, "entity_changes.csv"), EntityChangeRecord, data.entity_changes
            )
            outputs.append("entity_changes.csv")
        write_records(os.path.join(out_dir, "mail_messages.csv"), MailMessage, data.messages)
        outputs.append("mail_messages.csv")
        if config.issue_source.kind != "none":
            write_records(os.path.join(out_dir, "issues.csv"), IssueRecord, data.issues)
            write_records(
                os.path.join(out_dir, "issue_comments.csv"), IssueComment, data.issue_comments
            )
            outputs += ["issues.csv", "issue_comments.csv"]
        write_identity_table(os.path.join(out_dir, "identities.csv"), data.identity_rows)
        outputs.append("identities.csv")

        stage = "windows"
        windows = analysis_windows(config, data)
        smell_rows: list[SmellReport] = []
        demo_rows: list[Demographics] = []
        churn_rows: list[list[str]] = []
        churn_total_rows: list[list[str]] = []
        loc_rows: list[list[str]] = []
        bug_rows: list[list[str]] = []
        graph_files: dict[int, dict[str, str]] = {}
        for window in windows:
            products = build_window_products(config, data, window)
            files = window_graph_files(products, config, out_dir)
            graph_files[window.index] = files
            outputs += sorted(files.values())
            smell_rows.append(products.smells)
            demo_rows.append(products.demo)
            rows, total = churn_metrics(data.change_events, window)
            for identity, path, churn in rows:
                churn_rows.append([str(window.index), str(identity), path, str(churn)])
            churn_total_rows.append([str(window.index), str(total)])
            for path, loc in loc_estimate(data.change_events, window.end):
                loc_rows.append([str(window.index), path, str(loc)])
            if products.issue_file is not None:
                edges = [(issue, path) for (issue, path) in products.issue_file.edges]
                for path, count in bug_counts(edges, data.issues):
                    bug_rows.append([str(window.index), path, str(count)])

        stage = "metrics"
        write_records(os.path.join(out_dir, "smells.csv"), SmellReport, smell_rows)
        write_records(os.path.join(out_dir, "demographics.csv"), Demographics, demo_rows)
        write_csv(
            os.path.join(out_dir, "churn.csv"),
            ["window_index", "identity_id", "file_path", "churn"],
            churn_rows,
        )
        write_csv(
            os.path.join(out_dir, "churn_totals.csv"), ["window_index", "total_churn"], churn_total_rows
        )
        write_csv(os.path.join(out_dir, "loc.csv"), ["window_index", "file_path", "loc"], loc_rows)
        outputs += ["smells.csv", "demographics.csv", "churn.csv", "churn_totals.csv", "loc.csv"]
        if config.issue_source.kind != "none":
            write_csv(
                os.path.join(out_dir, "bug_counts.csv"),
                ["window_index", "file_path", "bug_count"],
                bug_rows,
            )
            outputs.append("bug_counts.csv")

        stage = "ui-index"
        write_ui_index(out_dir, config, windows, graph_files)
        outputs.append(UI_INDEX)
    except Exception:
        manifest = PipelineRunManifest(
            config_digest=digest,
            tool_versions=versions,
            started_at=started,
            finished_at=datetime.now(timezone.utc).isoformat(),
            outputs=sorted(set(outputs)),
            effective_config=config_to_dict(config),
            status="failed",
            failure_stage=stage,
        )
        write_manifest(out_dir, manifest)
        raise
    manifest = PipelineRunManifest(
        config_digest=digest,
        tool_versions=versions,
        started_at=started,
        finished_at=datetime.now(timezone.utc).isoformat(),
        outputs=sorted(set(outputs)),
        effective_config=config_to_dict(config),
        status="ok",
    )
    write_manifest(out_dir, manifest)
    return manifest


# --- single-stage runs (the other CLI subcommands) ---------------------------

def run_gitlog(config: ProjectConfig, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    commits, changes = collect_vcs(config)
    write_records(os.path.join(out_dir, "commits.csv"), CommitRecord, commits)
    write_records(os.path.join(out_dir, "file_changes.csv"), FileChangeRecord, changes)
    return ["commits.csv", "file_changes.csv"]


def run_gitlog_entity(config: ProjectConfig, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    commits, changes = collect_vcs(config)
    entity_changes = collect_entities(config, changes)
    write_records(os.path.join(out_dir, "commits.csv"), CommitRecord, commits)
    write_records(os.path.join(out_dir, "file_changes.csv"), FileChangeRecord, changes)
    write_records(os.path.join(out_dir, "entity_changes.csv"), EntityChangeRecord, entity_changes)
    return ["commits.csv", "file_changes.csv", "entity_changes.csv"]


def run_mbox(config: ProjectConfig, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    messages = collect_mail(config)
    write_records(os.path.join(out_dir, "mail_messages.csv"), MailMessage, messages)
    return ["mail_messages.csv"]


def run_issues_parse(config: ProjectConfig, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    issues, comments = collect_issues(config)
    write_records(os.path.join(out_dir, "issues.csv"), IssueRecord, issues)
    write_records(os.path.join(out_dir, "issue_comments.csv"), IssueComment, comments)
    return ["issues.csv", "issue_comments.csv"]


def run_issues_fetch(config: ProjectConfig, out_dir: str) -> list[str]:
    from .comms.fetch import fetch_issues
    from .errors import InvalidValueError

    source = config.issue_source
    if source.kind == "none":
        raise InvalidValueError(config.source_path or "<config>", "issue_source.kind",
                                "issues-fetch needs a jira or github issue source")
    target = source.dir or os.path.join(out_dir, "issue_pages")
    token = os.environ.get("SOCIOTRACE_TRACKER_TOKEN", "")
    fetch_issues(source.kind, source.base_url, source.project_key, target, token=token)
    return [target]


def run_identity(config: ProjectConfig, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    data = collect(config)
    write_identity_table(os.path.join(out_dir, "identities.csv"), data.identity_rows)
    return ["identities.csv"]


def run_network(config: ProjectConfig, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    data = collect(config)
    windows = analysis_windows(config, data)
    outputs: list[str] = []
    graph_files: dict[int, dict[str, str]] = {}
    for window in windows:
        products = build_window_products(config, data, window)
        files = window_graph_files(products, config, out_dir)
        graph_files[window.index] = files
        outputs += sorted(files.values())
    write_ui_index(out_dir, config, windows, graph_files)
    outputs.append(UI_INDEX)
    return outputs


def run_smells(config: ProjectConfig, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    data = collect(config)
    windows = analysis_windows(config, data)
    smell_rows = []
    demo_rows = []
    for window in windows:
        products = build_window_products(config, data, window)
        smell_rows.append(products.smells)
        demo_rows.append(products.demo)
    write_records(os.path.join(out_dir, "smells.csv"), SmellReport, smell_rows)
    write_records(os.path.join(out_dir, "demographics.csv"), Demographics, demo_rows)
    return ["smells.csv", "demographics.csv"]


def run_export_ui(config: ProjectConfig, out_dir: str) -> list[str]:
    rebuild_ui_index(out_dir, config)
    return [UI_INDEX]
