"""Git history parsing into standardized change tables.

Talks to the git binary directly. One `git log` invocation produces both
commit metadata and per-file change stats; entity-level extraction replays
`git diff`/`git show` per touched file and intersects changed line ranges
with definitions reported by a ctags-compatible extractor.

Pinned git flags: `-c core.quotepath=false log <branch> --date-order
--reverse -M --raw --numstat --date=raw` with a unit-separator pretty
format. `--raw` supplies change status (A/M/D/Rnnn) and rename paths,
`--numstat` supplies added/removed counts and the binary marker "-"; the
two listings appear per commit in the same file order, so they zip.
"""

from __future__ import annotations

import json
import os
import re
import subprocess
import tempfile
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .errors import (
    BranchNotFoundError,
    InvalidPatternError,
    NotARepositoryError,
    ToolInvocationError,
    UnsupportedTagOutputError,
)

RECORD_SEP = "\x1e"
FIELD_SEP = "\x1f"
PRETTY_FORMAT = (
    f"{RECORD_SEP}%H{FIELD_SEP}%an{FIELD_SEP}%ae{FIELD_SEP}%cn{FIELD_SEP}%ce"
    f"{FIELD_SEP}%ad{FIELD_SEP}%cd{FIELD_SEP}%P{FIELD_SEP}%B{FIELD_SEP}"
)

# git's hash of the empty tree; diffing against it yields a root commit's
# full content as additions
EMPTY_TREE = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"

MAX_OFFSET_MINUTES = 16 * 60

CHANGE_KIND = {"A": "add", "M": "modify", "D": "delete", "R": "rename", "C": "add", "T": "modify"}


@dataclass
class CommitRecord:
    commit_hash: str
    author_name: str
    author_email: str
    committer_name: str
    committer_email: str
    author_timestamp: datetime
    committer_timestamp: datetime
    message: str
    is_merge: bool


@dataclass
class FileChangeRecord:
    commit_hash: str
    file_path: str
    lines_added: int
    lines_removed: int
    is_binary: bool
    change_kind: str


@dataclass
class EntityChangeRecord:
    commit_hash: str
    file_path: str
    entity_name: str
    entity_kind: str
    entity_start_line: int
    entity_end_line: int
    lines_changed_in_entity: int


def run_git(args: list[str], repo_path: str, git_tool_path: str = "git") -> str:
    cmd = [git_tool_path, "-c", "core.quotepath=false", *args]
    try:
        proc = subprocess.run(
            cmd,
            cwd=repo_path,
            capture_output=True,
            text=True,
            encoding="utf-8",
            errors="replace",
        )
    except FileNotFoundError as exc:
        if exc.filename == repo_path:
            raise NotARepositoryError(repo_path)
        raise ToolInvocationError(git_tool_path, "binary not found")
    except NotADirectoryError:
        raise NotARepositoryError(repo_path)
    if proc.returncode != 0:
        raise ToolInvocationError(git_tool_path, f"exit {proc.returncode}: {proc.stderr.strip()}")
    return proc.stdout


def _git_ok(args: list[str], repo_path: str, git_tool_path: str) -> bool:
    try:
        run_git(args, repo_path, git_tool_path)
        return True
    except ToolInvocationError as exc:
        if exc.detail == "binary not found":
            raise
        return False


def parse_raw_date(text: str) -> datetime:
    """`--date=raw` gives "<unix seconds> <+|->HHMM". Keeps the original
    offset; offsets outside the representable range fall back to UTC."""
    seconds_str, _, offset_str = text.strip().partition(" ")
    seconds = int(seconds_str)
    offset_minutes = 0
    if offset_str and len(offset_str) >= 5:
        sign = -1 if offset_str[0] == "-" else 1
        offset_minutes = sign * (int(offset_str[1:3]) * 60 + int(offset_str[3:5]))
    if abs(offset_minutes) > MAX_OFFSET_MINUTES:
        offset_minutes = 0
    tz = timezone(timedelta(minutes=offset_minutes))
    return datetime.fromtimestamp(seconds, tz)


def _resolve_branch(repo_path: str, branch: str, git_tool_path: str) -> str | None:
    """Returns a revision to log, or None for a repository with no commits."""
    if not os.path.isdir(repo_path):
        raise NotARepositoryError(repo_path)
    if not _git_ok(["rev-parse", "--git-dir"], repo_path, git_tool_path):
        raise NotARepositoryError(repo_path)
    if not branch:
        try:
            head = run_git(["rev-parse", "--abbrev-ref", "HEAD"], repo_path, git_tool_path).strip()
        except ToolInvocationError as exc:
            if exc.detail == "binary not found":
                raise
            head = ""  # unborn branch in an empty repository
        branch = head or "HEAD"
    if _git_ok(["rev-parse", "--verify", "--quiet", branch + "^{commit}"], repo_path, git_tool_path):
        return branch
    any_commit = run_git(["rev-list", "-n1", "--all"], repo_path, git_tool_path).strip()
    if not any_commit:
        return None
    raise BranchNotFoundError(branch, repo_path)


_NUMSTAT_RE = re.compile(r"^(\d+|-)\t(\d+|-)\t(.*)$")


def _parse_diff_block(lines: list[str], commit_hash: str) -> list[FileChangeRecord]:
    """Zip the --raw entries (status + authoritative paths) with the
    --numstat entries (counts + binary marker). git emits both listings in
    the same per-commit file order."""
    raw_entries: list[tuple[str, str]] = []  # (status_letter, path)
    stat_entries: list[tuple[int, int, bool]] = []  # (added, removed, is_binary)
    for line in lines:
        if line.startswith(":"):
            # :oldmode newmode oldsha newsha STATUS\tpath[\tnewpath]
            meta, _, paths = line.partition("\t")
            status = meta.split()[-1]
            letter = status[0]
            parts = paths.split("\t")
            path = parts[-1] if letter in ("R", "C") and len(parts) > 1 else parts[0]
            raw_entries.append((letter, path))
        else:
            m = _NUMSTAT_RE.match(line)
            if m:
                added_s, removed_s, _ = m.groups()
                binary = added_s == "-"
                stat_entries.append(
                    (0 if binary else int(added_s), 0 if binary else int(removed_s), binary)
                )
    records = []
    for (letter, path), (added, removed, binary) in zip(raw_entries, stat_entries):
        records.append(
            FileChangeRecord(
                commit_hash=commit_hash,
                file_path=path.replace("\\", "/"),
                lines_added=added,
                lines_removed=removed,
                is_binary=binary,
                change_kind=CHANGE_KIND.get(letter, "modify"),
            )
        )
    return records


def parse_gitlog(
    repo_path: str, branch: str = "", git_tool_path: str = "git"
) -> tuple[list[CommitRecord], list[FileChangeRecord]]:
    """All commits reachable from branch, oldest first, plus per-file
    change rows. Merge commits appear only in the commit table."""
    rev = _resolve_branch(repo_path, branch, git_tool_path)
    if rev is None:
        return [], []
    out = run_git(
        [
            "log",
            rev,
            "--date-order",
            "--reverse",
            "-M",
            "--raw",
            "--numstat",
            "--date=raw",
            f"--pretty=format:{PRETTY_FORMAT}",
        ],
        repo_path,
        git_tool_path,
    )
    commits: list[CommitRecord] = []
    changes: list[FileChangeRecord] = []
    for chunk in out.split(RECORD_SEP):
        if not chunk.strip():
            continue
        fields = chunk.split(FIELD_SEP)
        if len(fields) < 10:
            continue
        (chash, an, ae, cn, ce, ad, cd, parents, body, diff_block) = fields[:10]
        is_merge = len(parents.split()) > 1
        commits.append(
            CommitRecord(
                commit_hash=chash,
                author_name=an,
                author_email=ae,
                committer_name=cn,
                committer_email=ce,
                author_timestamp=parse_raw_date(ad),
                committer_timestamp=parse_raw_date(cd),
                message=body.rstrip("\n"),
                is_merge=is_merge,
            )
        )
        if not is_merge:
            changes.extend(_parse_diff_block(diff_block.splitlines(), chash))
    return commits, changes


def compile_patterns(patterns: list[str]) -> list[re.Pattern]:
    compiled = []
    for pat in patterns:
        try:
            compiled.append(re.compile(pat))
        except re.error as exc:
            raise InvalidPatternError(pat, str(exc))
    return compiled


def apply_path_filters(
    changes: list[FileChangeRecord],
    include_patterns: list[str],
    exclude_patterns: list[str],
) -> list[FileChangeRecord]:
    """Keep a row iff (no includes, or some include matches the full
    repository-relative path) and no exclude matches. Order preserved."""
    include = compile_patterns(include_patterns)
    exclude = compile_patterns(exclude_patterns)
    kept = []
    for row in changes:
        if include and not any(p.search(row.file_path) for p in include):
            continue
        if any(p.search(row.file_path) for p in exclude):
            continue
        kept.append(row)
    return kept


def extract_issue_refs(message: str, issue_id_pattern: str) -> list[str]:
    """Every non-overlapping match's capture group, in order, duplicates
    preserved."""
    try:
        pattern = re.compile(issue_id_pattern)
    except re.error as exc:
        raise InvalidPatternError(issue_id_pattern, str(exc))
    if pattern.groups != 1:
        raise InvalidPatternError(issue_id_pattern, "must have exactly one capture group")
    return [m.group(1) for m in pattern.finditer(message)]


# --- entity granularity ------------------------------------------------------

_HUNK_RE = re.compile(r"^@@ -\d+(?:,\d+)? \+(\d+)(?:,(\d+))? @@")


def changed_post_image_ranges(
    repo_path: str, commit_hash: str, file_path: str, git_tool_path: str = "git"
) -> list[tuple[int, int]]:
    """Post-image line ranges touched by this commit for one file, from a
    zero-context diff against the first parent (empty tree for roots).
    Renames are treated as whole-file additions (--no-renames)."""
    parents = run_git(
        ["log", "-1", "--pretty=%P", commit_hash], repo_path, git_tool_path
    ).split()
    base = parents[0] if parents else EMPTY_TREE
    out = run_git(
        ["diff", "-U0", "--no-renames", base, commit_hash, "--", file_path],
        repo_path,
        git_tool_path,
    )
    ranges = []
    for line in out.splitlines():
        m = _HUNK_RE.match(line)
        if m:
            start = int(m.group(1))
            count = int(m.group(2)) if m.group(2) is not None else 1
            if count > 0:
                ranges.append((start, start + count - 1))
    return ranges


def file_content_at(
    repo_path: str, commit_hash: str, file_path: str, git_tool_path: str = "git"
) -> str:
    return run_git(["show", f"{commit_hash}:{file_path}"], repo_path, git_tool_path)


@dataclass
class EntitySpan:
    name: str
    kind: str
    start: int
    end: int


def extract_entities(
    content: str, basename: str, kinds: list[str], tags_tool_path: str
) -> list[EntitySpan]:
    """Run the tags extractor over one file snapshot. Expects JSON-lines
    output with name/kind/line and optionally end; definitions missing an
    end line extend to the next definition's start - 1, or to end of file."""
    with tempfile.TemporaryDirectory(prefix="sociotrace-tags-") as tmpdir:
        snapshot = os.path.join(tmpdir, basename)
        with open(snapshot, "w", encoding="utf-8") as fh:
            fh.write(content)
        cmd = [tags_tool_path, "--output-format=json", "--fields=+neK", "-o", "-", snapshot]
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True, encoding="utf-8")
        except FileNotFoundError:
            raise ToolInvocationError(tags_tool_path, "binary not found")
        if proc.returncode != 0:
            raise ToolInvocationError(tags_tool_path, f"exit {proc.returncode}: {proc.stderr.strip()}")
    entries = []
    for line in proc.stdout.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            raise UnsupportedTagOutputError(f"non-JSON line: {line[:80]!r}")
        if not isinstance(obj, dict) or obj.get("_type") not in (None, "tag"):
            continue
        if "name" not in obj or "line" not in obj:
            raise UnsupportedTagOutputError("tag entry missing name or line")
        entries.append(obj)
    entries.sort(key=lambda o: (int(o["line"]), str(o["name"])))
    eof = content.count("\n") + (0 if content.endswith("\n") or not content else 1)
    spans = []
    for i, obj in enumerate(entries):
        start = int(obj["line"])
        if "end" in obj and obj["end"] is not None:
            end = int(obj["end"])
        else:
            end = entries[i + 1]["line"] - 1 if i + 1 < len(entries) else eof
            end = max(end, start)
        spans.append(EntitySpan(str(obj["name"]), str(obj.get("kind", "")), start, int(end)))
    wanted = set(kinds)
    return [s for s in spans if s.kind in wanted]


def attribute_lines(spans: list[EntitySpan], ranges: list[tuple[int, int]]) -> dict[int, int]:
    """Count changed lines per span index, attributing each line to the
    innermost (smallest) containing span only, so nested definitions never
    double-count a line."""
    counts = {i: 0 for i in range(len(spans))}
    changed_lines = sorted({ln for lo, hi in ranges for ln in range(lo, hi + 1)})
    for ln in changed_lines:
        containing = [
            (span.end - span.start, i)
            for i, span in enumerate(spans)
            if span.start <= ln <= span.end
        ]
        if containing:
            counts[min(containing)[1]] += 1
    return counts


def parse_gitlog_entity(
    repo_path: str,
    git_tool_path: str,
    tags_tool_path: str,
    kinds: list[str],
    changes: list[FileChangeRecord],
) -> list[EntityChangeRecord]:
    """One row per (commit, file, entity) where the entity's span
    intersects a changed post-image range. lines_changed_in_entity counts
    the changed lines attributed to that entity under the innermost rule,
    so an enclosing definition can legitimately report 0."""
    records: list[EntityChangeRecord] = []
    for change in changes:
        if change.is_binary or change.change_kind == "delete":
            continue
        ranges = changed_post_image_ranges(
            repo_path, change.commit_hash, change.file_path, git_tool_path
        )
        if not ranges:
            continue
        content = file_content_at(repo_path, change.commit_hash, change.file_path, git_tool_path)
        spans = extract_entities(
            content, os.path.basename(change.file_path), kinds, tags_tool_path
        )
        counts = attribute_lines(spans, ranges)
        per_file: list[EntityChangeRecord] = []
        for i, span in enumerate(spans):
            intersects = any(lo <= span.end and span.start <= hi for lo, hi in ranges)
            if not intersects:
                continue
            per_file.append(
                EntityChangeRecord(
                    commit_hash=change.commit_hash,
                    file_path=change.file_path,
                    entity_name=span.name,
                    entity_kind=span.kind,
                    entity_start_line=span.start,
                    entity_end_line=span.end,
                    lines_changed_in_entity=counts[i],
                )
            )
        per_file.sort(key=lambda r: (r.entity_start_line, r.entity_name))
        records.extend(per_file)
    return records
