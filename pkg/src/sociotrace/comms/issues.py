"""Issue-tracker page parsing (JIRA and GitHub).

Reads the page documents written by fetch_issues: JSON files named
page_00001.json ... each wrapping one raw API page in an envelope
{fetched_at, url, kind, data}. Parsing never talks to the network.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from datetime import datetime, timezone

from ..errors import MalformedDocumentError


@dataclass
class IssueRecord:
    issue_key: str
    title: str
    labels: list[str]
    issue_type: str
    created_timestamp: datetime
    reporter_name: str
    reporter_email: str
    status: str


@dataclass
class IssueComment:
    issue_key: str
    comment_id: str
    author_name: str
    author_email: str
    created_timestamp: datetime
    body_length: int


def parse_tracker_timestamp(text: str) -> datetime:
    """Tracker APIs emit ISO-8601 variants: trailing Z, +0000 without a
    colon, or fractional seconds. Normalizes all of them, keeping the
    original offset."""
    value = text.strip()
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    # +0000 -> +00:00 for Python 3.10's fromisoformat
    m = re.search(r"([+-]\d{2})(\d{2})$", value)
    if m and ":" not in value[m.start():]:
        value = value[: m.start()] + m.group(1) + ":" + m.group(2)
    parsed = datetime.fromisoformat(value)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


def _page_files(source_dir: str) -> list[str]:
    names = sorted(n for n in os.listdir(source_dir) if re.fullmatch(r"page_\d+\.json", n))
    return [os.path.join(source_dir, n) for n in names]


def _load_page(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedDocumentError(path, exc.lineno, exc.msg)
    if not isinstance(doc, dict) or "data" not in doc:
        raise MalformedDocumentError(path, None, "missing envelope key 'data'")
    return doc


def _require(obj: dict, key: str, path: str, where: str):
    if key not in obj or obj[key] is None:
        raise MalformedDocumentError(path, None, f"{where}: missing field {key!r}")
    return obj[key]


def parse_jira_issues(source_dir: str) -> tuple[list[IssueRecord], list[IssueComment]]:
    """JIRA search pages carry comments embedded in each issue's fields."""
    issues: list[IssueRecord] = []
    comments: list[IssueComment] = []
    for path in _page_files(source_dir):
        doc = _load_page(path)
        kind = doc.get("kind", "issues")
        if kind not in ("issues", "comments"):
            raise MalformedDocumentError(path, None, f"unknown page kind {kind!r}")
        if kind != "issues":
            # JIRA pages embed comments inside each issue
            continue
        data = doc["data"]
        entries = data.get("issues", []) if isinstance(data, dict) else data
        for i, entry in enumerate(entries):
            where = f"$.issues[{i}]"
            key = str(_require(entry, "key", path, where))
            fields = _require(entry, "fields", path, where)
            reporter = fields.get("reporter") or {}
            issues.append(
                IssueRecord(
                    issue_key=key,
                    title=str(fields.get("summary", "")),
                    labels=[str(l) for l in fields.get("labels", [])],
                    issue_type=str((fields.get("issuetype") or {}).get("name", "")),
                    created_timestamp=parse_tracker_timestamp(
                        _require(fields, "created", path, f"{where}.fields")
                    ),
                    reporter_name=str(reporter.get("displayName", "")),
                    reporter_email=str(reporter.get("emailAddress") or ""),
                    status=str((fields.get("status") or {}).get("name", "")),
                )
            )
            for j, com in enumerate((fields.get("comment") or {}).get("comments", [])):
                cwhere = f"{where}.fields.comment.comments[{j}]"
                author = com.get("author") or {}
                comments.append(
                    IssueComment(
                        issue_key=key,
                        comment_id=str(_require(com, "id", path, cwhere)),
                        author_name=str(author.get("displayName", "")),
                        author_email=str(author.get("emailAddress") or ""),
                        created_timestamp=parse_tracker_timestamp(
                            _require(com, "created", path, cwhere)
                        ),
                        body_length=len(com.get("body") or ""),
                    )
                )
    return issues, comments


def parse_github_issues(source_dir: str) -> tuple[list[IssueRecord], list[IssueComment]]:
    """GitHub issue listings include pull requests; those are dropped.
    Comments come from the repo-wide comments endpoint and are joined to
    issues by the trailing number of issue_url; comments for unknown keys
    (PRs, out-of-range pages) are dropped to keep referential integrity."""
    issues: list[IssueRecord] = []
    comments: list[IssueComment] = []
    for path in _page_files(source_dir):
        doc = _load_page(path)
        kind = doc.get("kind", "issues")
        if kind not in ("issues", "comments"):
            raise MalformedDocumentError(path, None, f"unknown page kind {kind!r}")
        data = doc["data"]
        if not isinstance(data, list):
            raise MalformedDocumentError(path, None, "$.data: expected a list")
        if kind == "issues":
            for i, entry in enumerate(data):
                if "pull_request" in entry:
                    continue
                where = f"$.data[{i}]"
                number = _require(entry, "number", path, where)
                user = entry.get("user") or {}
                issues.append(
                    IssueRecord(
                        issue_key=f"#{number}",
                        title=str(entry.get("title", "")),
                        labels=[str(l.get("name", "")) for l in entry.get("labels", [])],
                        issue_type="",
                        created_timestamp=parse_tracker_timestamp(
                            _require(entry, "created_at", path, where)
                        ),
                        reporter_name=str(user.get("login", "")),
                        reporter_email="",
                        status=str(entry.get("state", "")),
                    )
                )
        elif kind == "comments":
            for i, com in enumerate(data):
                where = f"$.data[{i}]"
                issue_url = str(_require(com, "issue_url", path, where))
                number = issue_url.rstrip("/").rsplit("/", 1)[-1]
                user = com.get("user") or {}
                comments.append(
                    IssueComment(
                        issue_key=f"#{number}",
                        comment_id=str(_require(com, "id", path, where)),
                        author_name=str(user.get("login", "")),
                        author_email="",
                        created_timestamp=parse_tracker_timestamp(
                            _require(com, "created_at", path, where)
                        ),
                        body_length=len(com.get("body") or ""),
                    )
                )
    known = {r.issue_key for r in issues}
    comments = [c for c in comments if c.issue_key in known]
    return issues, comments
