"""Developer identity resolution across git, mail, and issue sources.

Three steps: formatting (strip wrapping symbols, undo " at "/" dot "
obfuscation inside the address segment only, never inside a display name),
name-email separation (including "Last, First" reversal), and pair-wise
matching folded into identities by transitive closure.

Matching rules, any one suffices:
  1. emails equal case-insensitively (unless that email is blacklisted);
  2. names equal case-insensitively after whitespace collapse;
  3. one name equals the other with word order reversed;
  4. an email's local part equals the other's name with separators
     removed, provided every name word has length >= 2 (so "jdoe" never
     matches the initialed "J Doe", but "johndoe" matches "John Doe").

The closure is computed with union-find over equivalence buckets rather
than n^2 predicate calls; the buckets encode exactly the four rules, which
a property test cross-checks against the brute-force pairwise closure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import UnparseableActorError

SOURCES = ("git_author", "git_committer", "mail_from", "issue_reporter", "issue_commenter")


@dataclass(frozen=True)
class RawActor:
    raw: str
    source: str


@dataclass(frozen=True)
class ParsedActor:
    name: str
    email: str
    raw: str


@dataclass
class CanonicalIdentity:
    identity_id: int
    members: list[ParsedActor]
    display_name: str
    all_emails: list[str]
    flagged: bool = False


@dataclass
class IdentityRow:
    raw: str
    source: str
    identity_id: int
    display_name: str


_AT_RE = re.compile(r"\s+at\s+", re.I)
_DOT_RE = re.compile(r"\s+dot\s+", re.I)
_ADDRESSY_RE = re.compile(r"^[\w.+\-]+@[\w.\-]+$")


def _deobfuscate(segment: str) -> str:
    """Undo ' at ' / ' dot ' spelling inside an address-like segment."""
    candidate = _DOT_RE.sub(".", _AT_RE.sub("@", segment.strip()))
    candidate = candidate.strip().strip(",").strip()
    return candidate


def _clean_name(segment: str) -> str:
    name = segment.strip()
    name = re.sub(r'^[\s"\'(]+|[\s"\'),]+$', "", name)
    if name.count(",") == 1:
        last, first = (part.strip() for part in name.split(","))
        if last and first:
            name = f"{first} {last}"
    name = name.strip().strip(",").strip()
    return re.sub(r"\s+", " ", name)


def _looks_like_address(token: str) -> bool:
    return bool(_ADDRESSY_RE.match(token)) and token.count("@") == 1


def normalize_actor(raw: str) -> ParsedActor:
    """Formatting + separation. Raises UnparseableActorError when neither
    a name nor an address-like token can be found."""
    if not raw or not raw.strip():
        raise UnparseableActorError(raw)
    s = raw.strip()

    bracket = re.search(r"<([^<>]*)>", s)
    if bracket:
        addr_segment = bracket.group(1)
        name_segment = (s[: bracket.start()] + " " + s[bracket.end():]).strip()
        email = _deobfuscate(addr_segment)
        if not _looks_like_address(email):
            email = ""
        name = _clean_name(name_segment)
        if not name and not email:
            raise UnparseableActorError(raw)
        return ParsedActor(name=name, email=email, raw=raw)

    # no brackets: a trailing "(comment)" is a display name (pipermail
    # style); the rest is scanned for the token carrying "@", possibly
    # after undoing " at " obfuscation over a trailing address-like run
    comment = ""
    body = s
    mc = re.search(r"\(([^()]*)\)\s*$", s)
    if mc:
        comment = mc.group(1).strip()
        body = s[: mc.start()].strip()
    tokens = body.split()
    email = ""
    name_tokens: list[str] = []
    at_tokens = [i for i, t in enumerate(tokens) if "@" in t]
    if at_tokens:
        i = at_tokens[0]
        email = tokens[i].strip("<>,\"'")
        if not _looks_like_address(email):
            email = ""
            name_tokens = tokens
        else:
            name_tokens = tokens[:i] + tokens[i + 1:]
    else:
        m = re.search(r"(\S+)\s+at\s+(\S+(?:\s+dot\s+\S+)*)\s*$", body, re.I)
        if m:
            candidate = _deobfuscate(m.group(0))
            if _looks_like_address(candidate):
                email = candidate
                name_tokens = body[: m.start()].split()
            else:
                name_tokens = tokens
        else:
            name_tokens = tokens
    name = _clean_name(" ".join(name_tokens)) or _clean_name(comment)
    if not name and not email:
        raise UnparseableActorError(raw)
    return ParsedActor(name=name, email=email, raw=raw)


def _name_words(name: str) -> tuple[str, ...]:
    return tuple(w for w in re.split(r"\s+", name.strip().casefold()) if w)


def _compressed_name(name: str) -> str:
    """Name with separator characters removed, casefolded."""
    return re.sub(r"[\s.\-_']+", "", name.casefold())


def _local_part(email: str) -> str:
    return email.split("@", 1)[0].casefold() if email else ""


def _local_rule_applies(name: str) -> bool:
    words = _name_words(name)
    return bool(words) and all(len(w) >= 2 for w in words)


def is_match(a: ParsedActor, b: ParsedActor, email_blacklist: list[str] | set[str] = ()) -> bool:
    blacklist = {e.casefold() for e in email_blacklist}
    if a.email and b.email and a.email.casefold() == b.email.casefold():
        if a.email.casefold() not in blacklist:
            return True
    wa, wb = _name_words(a.name), _name_words(b.name)
    if wa and wb:
        if wa == wb or wa == tuple(reversed(wb)):
            return True
    for actor_email, actor_name in ((a.email, b.name), (b.email, a.name)):
        if actor_email and actor_name and _local_rule_applies(actor_name):
            if _local_part(actor_email) == _compressed_name(actor_name):
                return True
    return False


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def add(self, x: int):
        self.parent.setdefault(x, x)

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def match_identities(
    actors: list[RawActor], email_blacklist: list[str] | set[str] = ()
) -> tuple[list[IdentityRow], list[CanonicalIdentity]]:
    """Partition actors into identities; ids numbered 1..K by ascending
    lexicographically-smallest raw string per component. Unparseable
    actors are quarantined as flagged singleton identities."""
    blacklist = {e.casefold() for e in email_blacklist}
    parsed: list[ParsedActor | None] = []
    for actor in actors:
        try:
            parsed.append(normalize_actor(actor.raw))
        except UnparseableActorError:
            parsed.append(None)

    uf = _UnionFind()
    for i in range(len(actors)):
        uf.add(i)

    ok = [i for i, p in enumerate(parsed) if p is not None]

    # rule 1: shared email (unless blacklisted)
    email_buckets: dict[str, list[int]] = {}
    for i in ok:
        email = parsed[i].email.casefold()
        if email and email not in blacklist:
            email_buckets.setdefault(email, []).append(i)
    for bucket in email_buckets.values():
        for other in bucket[1:]:
            uf.union(bucket[0], other)

    # rules 2+3: name equality up to word-order reversal
    name_buckets: dict[tuple[str, ...], list[int]] = {}
    for i in ok:
        words = _name_words(parsed[i].name)
        if words:
            key = min(words, tuple(reversed(words)))
            name_buckets.setdefault(key, []).append(i)
    for bucket in name_buckets.values():
        for other in bucket[1:]:
            uf.union(bucket[0], other)

    # rule 4: email local part vs compressed name. Only ties an email-side
    # actor to a name-side actor; two actors merely sharing a local part
    # are not a match on their own.
    local_side: dict[str, list[int]] = {}
    name_side: dict[str, list[int]] = {}
    for i in ok:
        local = _local_part(parsed[i].email)
        if local:
            local_side.setdefault(local, []).append(i)
        if parsed[i].name and _local_rule_applies(parsed[i].name):
            name_side.setdefault(_compressed_name(parsed[i].name), []).append(i)
    for key, names in name_side.items():
        locals_ = local_side.get(key, [])
        if locals_:
            anchor = names[0]
            for other in names[1:]:
                uf.union(anchor, other)
            for other in locals_:
                uf.union(anchor, other)

    components: dict[int, list[int]] = {}
    for i in range(len(actors)):
        components.setdefault(uf.find(i), []).append(i)

    ordered = sorted(components.values(), key=lambda idxs: min(actors[i].raw for i in idxs))

    identities: list[CanonicalIdentity] = []
    assignment: dict[int, int] = {}
    for identity_id, idxs in enumerate(ordered, start=1):
        members_parsed = [parsed[i] for i in idxs if parsed[i] is not None]
        flagged = not members_parsed
        seen: set[tuple[str, str, str]] = set()
        members: list[ParsedActor] = []
        for p in sorted(members_parsed, key=lambda p: p.raw):
            key = (p.name, p.email, p.raw)
            if key not in seen:
                seen.add(key)
                members.append(p)
        names = [p.name for p in members if p.name]
        if names:
            display = sorted(names, key=lambda n: (-len(n), n))[0]
        else:
            emails = sorted(p.email for p in members if p.email)
            display = emails[0] if emails else min(actors[i].raw for i in idxs)
        all_emails = sorted({p.email for p in members if p.email})
        identities.append(
            CanonicalIdentity(
                identity_id=identity_id,
                members=members,
                display_name=display,
                all_emails=all_emails,
                flagged=flagged,
            )
        )
        for i in idxs:
            assignment[i] = identity_id

    by_id = {ident.identity_id: ident for ident in identities}
    rows = [
        IdentityRow(
            raw=actor.raw,
            source=actor.source,
            identity_id=assignment[i],
            display_name=by_id[assignment[i]].display_name,
        )
        for i, actor in enumerate(actors)
    ]
    return rows, identities


def apply_overrides(
    rows: list[IdentityRow],
    identities: list[CanonicalIdentity],
    overrides: dict[str, int],
) -> tuple[list[IdentityRow], list[CanonicalIdentity]]:
    """Reassign specific raw strings to auditor-chosen identity ids.
    Overrides win over matching; identity tables are rebuilt around the
    final assignment, keeping the auditor's ids verbatim."""
    if not overrides:
        return rows, identities
    new_rows = [
        IdentityRow(
            raw=r.raw,
            source=r.source,
            identity_id=overrides.get(r.raw, r.identity_id),
            display_name=r.display_name,
        )
        for r in rows
    ]
    parsed_by_raw: dict[str, ParsedActor | None] = {}
    flagged_raws = set()
    for ident in identities:
        for p in ident.members:
            parsed_by_raw[p.raw] = p
        if ident.flagged:
            flagged_raws.update(r.raw for r in rows if r.identity_id == ident.identity_id)

    grouped: dict[int, list[IdentityRow]] = {}
    for r in new_rows:
        grouped.setdefault(r.identity_id, []).append(r)
    rebuilt: list[CanonicalIdentity] = []
    for identity_id in sorted(grouped):
        group = grouped[identity_id]
        members = []
        seen = set()
        for r in sorted(group, key=lambda r: r.raw):
            p = parsed_by_raw.get(r.raw)
            if p is not None and (p.name, p.email, p.raw) not in seen:
                seen.add((p.name, p.email, p.raw))
                members.append(p)
        names = [p.name for p in members if p.name]
        if names:
            display = sorted(names, key=lambda n: (-len(n), n))[0]
        else:
            emails = sorted(p.email for p in members if p.email)
            display = emails[0] if emails else min(r.raw for r in group)
        rebuilt.append(
            CanonicalIdentity(
                identity_id=identity_id,
                members=members,
                display_name=display,
                all_emails=sorted({p.email for p in members if p.email}),
                flagged=not members,
            )
        )
    display_by_id = {ident.identity_id: ident.display_name for ident in rebuilt}
    final_rows = [
        IdentityRow(r.raw, r.source, r.identity_id, display_by_id[r.identity_id]) for r in new_rows
    ]
    return final_rows, rebuilt
