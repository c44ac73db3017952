"""Mailing-list archive parsing and message threading.

Reads RFC 4155-style mbox files ("From " delimiters), decodes RFC 2047
headers, undoes pipermail's address obfuscation ("user at host"), and
groups messages into threads via reference headers with a normalized-
subject fallback for messages that carry no usable references.
"""

from __future__ import annotations

import hashlib
import mailbox
import os
import re
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from email.header import Header, decode_header, make_header
from email.utils import getaddresses, parsedate_to_datetime

from ..errors import MalformedArchiveError

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass
class MailMessage:
    message_id: str
    from_name: str
    from_email: str
    sent_timestamp: datetime
    subject: str
    in_reply_to: str | None
    references: list[str]
    thread_id: str | None = None


def _repair_bytes(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        return data.decode("latin-1")


def _header_text(value) -> str:
    """Coerce a header value from mailbox to plain text.

    Raw 8-bit headers (unencoded UTF-8 or Latin-1 names are common in
    real archives) come back as Header objects whose unknown-8bit chunks
    hold the original bytes; recover those instead of letting them
    surface as replacement characters.
    """
    if value is None:
        return ""
    if isinstance(value, Header):
        parts = []
        for data, _charset in decode_header(value):
            parts.append(_repair_bytes(data) if isinstance(data, bytes) else data)
        return " ".join(parts)
    text = str(value)
    try:
        raw = text.encode("utf-8", "surrogateescape")
    except UnicodeEncodeError:
        return text
    return _repair_bytes(raw)


def _decode(header_value) -> str:
    if not header_value:
        return ""
    text = _header_text(header_value)
    try:
        text = str(make_header(decode_header(text)))
    except Exception:
        pass
    return re.sub(r"\s+", " ", text).strip()


# pipermail writes "jsmith at example.com (John Smith)"; the comment is the
# display name and " at " stands in for "@"
_PIPERMAIL_RE = re.compile(r"^\s*(\S+)\s+at\s+([\w.\-]+)\s*(?:\((.*)\))?\s*$")


def parse_from_header(raw: str) -> tuple[str, str]:
    """Returns (name, email) from a From header value."""
    text = _decode(raw)
    if "@" not in text:
        m = _PIPERMAIL_RE.match(text)
        if m:
            local, domain, comment = m.groups()
            return (comment or "").strip(), f"{local}@{domain}"
    pairs = getaddresses([text])
    if pairs:
        name, addr = pairs[0]
        return name.strip(), addr.strip()
    return text, ""


_MSGID_RE = re.compile(r"<([^<>]+)>")


def _message_ids(header_value: str | None) -> list[str]:
    if not header_value:
        return []
    found = _MSGID_RE.findall(header_value)
    if found:
        return found
    token = header_value.strip()
    return [token] if token else []


def _parse_date(header_value: str | None) -> datetime:
    """Missing or unparseable Date headers sort to the epoch rather than
    discarding the message."""
    if not header_value:
        return EPOCH
    try:
        parsed = parsedate_to_datetime(header_value)
    except (ValueError, TypeError):
        return EPOCH
    if parsed is None:
        return EPOCH
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


def synthesize_message_id(from_header: str, date_header: str, subject: str) -> str:
    digest = hashlib.sha1(
        "\x00".join([from_header, date_header, subject]).encode("utf-8", "replace")
    ).hexdigest()
    return f"synthetic-{digest}"


def parse_mbox(path: str) -> list[MailMessage]:
    """One MailMessage per message, sorted by sent_timestamp ascending
    (message_id breaks ties). thread_id stays None until thread_messages."""
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    box = mailbox.mbox(path, create=False)
    messages: list[MailMessage] = []
    seen_ids: set[str] = set()
    for msg in box:
        from_header = _header_text(msg.get("From", ""))
        date_header = _header_text(msg.get("Date", ""))
        subject = _decode(msg.get("Subject", ""))
        ids = _message_ids(_header_text(msg.get("Message-ID")))
        message_id = ids[0] if ids else synthesize_message_id(from_header, date_header, subject)
        # archives occasionally duplicate a message verbatim; keep rows
        # unique by suffixing repeats deterministically
        base, n = message_id, 1
        while message_id in seen_ids:
            message_id = f"{base}-dup{n}"
            n += 1
        seen_ids.add(message_id)
        name, email_addr = parse_from_header(from_header)
        in_reply_to_ids = _message_ids(_header_text(msg.get("In-Reply-To")))
        references = _message_ids(_header_text(msg.get("References")))
        messages.append(
            MailMessage(
                message_id=message_id,
                from_name=name,
                from_email=email_addr,
                sent_timestamp=_parse_date(date_header),
                subject=subject,
                in_reply_to=in_reply_to_ids[0] if in_reply_to_ids else None,
                references=references,
            )
        )
    if not messages and os.path.getsize(path) > 0:
        raise MalformedArchiveError(path, "no valid message delimiter found")
    messages.sort(key=lambda m: (m.sent_timestamp, m.message_id))
    return messages


def normalize_subject(subject: str) -> str:
    """Strip leading re:/fwd: tokens case-insensitively, collapse
    whitespace, casefold."""
    text = subject
    while True:
        stripped = re.sub(
            r"^\s*(\[\d+\]\s*)?(re|fwd?|aw)\s*(\[\d+\])?\s*:\s*", "", text, count=1, flags=re.I
        )
        if stripped == text:
            break
        text = stripped
    return re.sub(r"\s+", " ", text).strip().casefold()


class _UnionFind:
    def __init__(self, items):
        self.parent = {item: item for item in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def thread_messages(messages: list[MailMessage]) -> list[MailMessage]:
    """Fill thread_id on every message; input order preserved.

    Components are built from in_reply_to/references links that resolve
    within the archive. Messages with no resolved link fall back to
    normalized-subject matching against the earliest message sharing that
    subject (joining the earliest only keeps two reference-linked threads
    that happen to share a subject from being bridged). The component's id
    is its earliest member's message_id.
    """
    by_id = {m.message_id: m for m in messages}
    uf = _UnionFind(by_id.keys())
    order_key = {m.message_id: (m.sent_timestamp, m.message_id) for m in messages}

    earliest_for_subject: dict[str, str] = {}
    for m in sorted(messages, key=lambda m: order_key[m.message_id]):
        key = normalize_subject(m.subject)
        if key and key not in earliest_for_subject:
            earliest_for_subject[key] = m.message_id

    for m in messages:
        refs = [r for r in ([m.in_reply_to] if m.in_reply_to else []) + m.references if r in by_id]
        if refs:
            for r in refs:
                uf.union(m.message_id, r)
        else:
            key = normalize_subject(m.subject)
            anchor = earliest_for_subject.get(key)
            if anchor is not None and anchor != m.message_id:
                uf.union(m.message_id, anchor)

    root_of: dict[str, str] = {}
    for m in messages:
        comp = uf.find(m.message_id)
        if comp not in root_of or order_key[m.message_id] < order_key[root_of[comp]]:
            root_of[comp] = m.message_id

    return [replace(m, thread_id=root_of[uf.find(m.message_id)]) for m in messages]
