"""Project configuration: load, validate, serialize.

A project is described by one YAML file. The loader fills documented
defaults, enforces structural invariants, and keeps unknown keys around so
validation can warn about them without failing (config files get exchanged
between tool versions and must survive skew).
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Any

import yaml

from .errors import (
    InvalidValueError,
    MalformedDocumentError,
    MissingRequiredFieldError,
)

DEFAULT_WINDOW_DAYS = 90

GRANULARITIES = ("file", "entity")
ISSUE_SOURCE_KINDS = ("jira", "github", "none")

# Top-level YAML keys we understand. Anything else is a warning finding.
KNOWN_KEYS = (
    "project_name",
    "git_repo_path",
    "git_branch",
    "file_include_patterns",
    "file_exclude_patterns",
    "mbox_paths",
    "issue_source",
    "issue_id_pattern",
    "window_days",
    "analysis_start",
    "analysis_end",
    "granularity",
    "entity_kinds",
    "tool_paths",
    "identity_email_blacklist",
)

ISSUE_SOURCE_KEYS = ("kind", "dir", "base_url", "project_key")
TOOL_PATH_KEYS = ("git", "tags_extractor")


@dataclass
class IssueSource:
    kind: str = "none"
    dir: str = ""
    base_url: str = ""
    project_key: str = ""


@dataclass
class ToolPaths:
    git: str = "git"
    tags_extractor: str = ""


@dataclass
class ProjectConfig:
    project_name: str
    git_repo_path: str
    git_branch: str = ""
    file_include_patterns: list[str] = field(default_factory=list)
    file_exclude_patterns: list[str] = field(default_factory=list)
    mbox_paths: list[str] = field(default_factory=list)
    issue_source: IssueSource = field(default_factory=IssueSource)
    issue_id_pattern: str = ""
    window_days: int = DEFAULT_WINDOW_DAYS
    analysis_start: datetime | None = None
    analysis_end: datetime | None = None
    granularity: str = "file"
    entity_kinds: list[str] = field(default_factory=list)
    tool_paths: ToolPaths = field(default_factory=ToolPaths)
    identity_email_blacklist: list[str] = field(default_factory=list)
    # unknown top-level keys, preserved for validation warnings only
    extra_keys: dict[str, Any] = field(default_factory=dict, compare=False)
    source_path: str = field(default="", compare=False)


@dataclass
class Finding:
    severity: str  # "error" | "warning"
    field: str
    message: str


def _coerce_timestamp(value: Any, path: str, name: str) -> datetime | None:
    """YAML may hand us a datetime, a date, or a string."""
    if value is None:
        return None
    if isinstance(value, datetime):
        if value.tzinfo is None:
            return value.replace(tzinfo=timezone.utc)
        return value
    if isinstance(value, date):
        return datetime(value.year, value.month, value.day, tzinfo=timezone.utc)
    if isinstance(value, str):
        try:
            parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError as exc:
            raise InvalidValueError(path, name, f"not an ISO-8601 timestamp: {exc}")
        if parsed.tzinfo is None:
            parsed = parsed.replace(tzinfo=timezone.utc)
        return parsed
    raise InvalidValueError(path, name, f"expected timestamp, got {type(value).__name__}")


def _str_list(value: Any, path: str, name: str) -> list[str]:
    if value is None:
        return []
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return list(value)
    raise InvalidValueError(path, name, "expected a list of strings")


def load_config(path: str) -> ProjectConfig:
    """Load a project configuration file, applying defaults.

    Raises FileNotFoundError, MalformedDocumentError (with YAML parser line
    number), MissingRequiredFieldError, or InvalidValueError. The returned
    object satisfies every structural invariant.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise MalformedDocumentError(path, line, str(getattr(exc, "problem", exc)))
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise MalformedDocumentError(path, None, "top level must be a mapping")

    for required in ("project_name", "git_repo_path"):
        if required not in doc or doc[required] in (None, ""):
            raise MissingRequiredFieldError(path, required)
        if not isinstance(doc[required], str):
            raise InvalidValueError(path, required, "expected a string")

    window_days = doc.get("window_days", DEFAULT_WINDOW_DAYS)
    if not isinstance(window_days, int) or isinstance(window_days, bool) or window_days < 1:
        raise InvalidValueError(path, "window_days", f"must be an integer >= 1, got {window_days!r}")

    granularity = doc.get("granularity", "file")
    if granularity not in GRANULARITIES:
        raise InvalidValueError(path, "granularity", f"must be one of {GRANULARITIES}, got {granularity!r}")

    issue_raw = doc.get("issue_source") or {}
    if not isinstance(issue_raw, dict):
        raise InvalidValueError(path, "issue_source", "expected a mapping")
    kind = issue_raw.get("kind", "none")
    if kind not in ISSUE_SOURCE_KINDS:
        raise InvalidValueError(path, "issue_source.kind", f"must be one of {ISSUE_SOURCE_KINDS}, got {kind!r}")
    issue_source = IssueSource(
        kind=kind,
        dir=str(issue_raw.get("dir", "") or ""),
        base_url=str(issue_raw.get("base_url", "") or ""),
        project_key=str(issue_raw.get("project_key", "") or ""),
    )

    tools_raw = doc.get("tool_paths") or {}
    if not isinstance(tools_raw, dict):
        raise InvalidValueError(path, "tool_paths", "expected a mapping")
    tool_paths = ToolPaths(
        git=str(tools_raw.get("git", "git") or "git"),
        tags_extractor=str(tools_raw.get("tags_extractor", "") or ""),
    )

    entity_kinds = _str_list(doc.get("entity_kinds"), path, "entity_kinds")
    if granularity == "entity":
        if not tool_paths.tags_extractor:
            raise MissingRequiredFieldError(path, "tool_paths.tags_extractor")
        if not entity_kinds:
            raise MissingRequiredFieldError(path, "entity_kinds")

    include = _str_list(doc.get("file_include_patterns"), path, "file_include_patterns")
    exclude = _str_list(doc.get("file_exclude_patterns"), path, "file_exclude_patterns")
    for fieldname, patterns in (
        ("file_include_patterns", include),
        ("file_exclude_patterns", exclude),
    ):
        for pat in patterns:
            try:
                re.compile(pat)
            except re.error as exc:
                raise InvalidValueError(path, fieldname, f"pattern {pat!r} does not compile: {exc}")

    issue_id_pattern = str(doc.get("issue_id_pattern", "") or "")
    if issue_id_pattern:
        try:
            compiled = re.compile(issue_id_pattern)
        except re.error as exc:
            raise InvalidValueError(path, "issue_id_pattern", f"does not compile: {exc}")
        if compiled.groups != 1:
            raise InvalidValueError(path, "issue_id_pattern", "must have exactly one capture group")

    start = _coerce_timestamp(doc.get("analysis_start"), path, "analysis_start")
    end = _coerce_timestamp(doc.get("analysis_end"), path, "analysis_end")
    if start is not None and end is not None and start >= end:
        raise InvalidValueError(path, "analysis_start", "must be earlier than analysis_end")

    extra = {k: v for k, v in doc.items() if k not in KNOWN_KEYS}

    return ProjectConfig(
        project_name=doc["project_name"],
        git_repo_path=doc["git_repo_path"],
        git_branch=str(doc.get("git_branch", "") or ""),
        file_include_patterns=include,
        file_exclude_patterns=exclude,
        mbox_paths=_str_list(doc.get("mbox_paths"), path, "mbox_paths"),
        issue_source=issue_source,
        issue_id_pattern=issue_id_pattern,
        window_days=window_days,
        analysis_start=start,
        analysis_end=end,
        granularity=granularity,
        entity_kinds=entity_kinds,
        tool_paths=tool_paths,
        identity_email_blacklist=_str_list(doc.get("identity_email_blacklist"), path, "identity_email_blacklist"),
        extra_keys=extra,
        source_path=str(path),
    )


def validate_config(config: ProjectConfig) -> list[Finding]:
    """Collect findings without raising. Empty list means fully valid.

    Unknown keys are warnings; everything else that breaks an invariant is
    an error. Useful for configs constructed programmatically, which bypass
    load_config's checks.
    """
    findings: list[Finding] = []

    if not config.project_name:
        findings.append(Finding("error", "project_name", "must be non-empty"))
    if not config.git_repo_path:
        findings.append(Finding("error", "git_repo_path", "must be non-empty"))
    if config.window_days < 1:
        findings.append(Finding("error", "window_days", f"must be >= 1, got {config.window_days}"))
    if config.granularity not in GRANULARITIES:
        findings.append(Finding("error", "granularity", f"must be one of {GRANULARITIES}"))
    elif config.granularity == "entity":
        if not config.tool_paths.tags_extractor:
            findings.append(Finding("error", "tool_paths.tags_extractor", "required when granularity is entity"))
        if not config.entity_kinds:
            findings.append(Finding("error", "entity_kinds", "required when granularity is entity"))
    if config.issue_source.kind not in ISSUE_SOURCE_KINDS:
        findings.append(Finding("error", "issue_source.kind", f"must be one of {ISSUE_SOURCE_KINDS}"))

    for fieldname in ("file_include_patterns", "file_exclude_patterns"):
        for pat in getattr(config, fieldname):
            try:
                re.compile(pat)
            except re.error as exc:
                findings.append(Finding("error", fieldname, f"pattern {pat!r} does not compile: {exc}"))

    if config.issue_id_pattern:
        try:
            compiled = re.compile(config.issue_id_pattern)
        except re.error as exc:
            findings.append(Finding("error", "issue_id_pattern", f"does not compile: {exc}"))
        else:
            if compiled.groups != 1:
                findings.append(Finding("error", "issue_id_pattern", "must have exactly one capture group"))

    if config.analysis_start is not None and config.analysis_end is not None:
        if config.analysis_start >= config.analysis_end:
            findings.append(Finding("error", "analysis_start", "must be earlier than analysis_end"))

    for key in sorted(config.extra_keys):
        findings.append(Finding("warning", key, f"unknown key {key!r} ignored"))

    return findings


def config_to_dict(config: ProjectConfig) -> dict[str, Any]:
    """Canonical plain-dict form: the subset that round-trips through YAML."""
    out: dict[str, Any] = {
        "project_name": config.project_name,
        "git_repo_path": config.git_repo_path,
        "git_branch": config.git_branch,
        "file_include_patterns": list(config.file_include_patterns),
        "file_exclude_patterns": list(config.file_exclude_patterns),
        "mbox_paths": list(config.mbox_paths),
        "issue_source": dataclasses.asdict(config.issue_source),
        "issue_id_pattern": config.issue_id_pattern,
        "window_days": config.window_days,
        "analysis_start": config.analysis_start.isoformat() if config.analysis_start else None,
        "analysis_end": config.analysis_end.isoformat() if config.analysis_end else None,
        "granularity": config.granularity,
        "entity_kinds": list(config.entity_kinds),
        "tool_paths": dataclasses.asdict(config.tool_paths),
        "identity_email_blacklist": list(config.identity_email_blacklist),
    }
    return out


def serialize_config(config: ProjectConfig) -> str:
    """YAML text that load_config reads back into an equal ProjectConfig."""
    return yaml.safe_dump(config_to_dict(config), sort_keys=False, default_flow_style=False)
