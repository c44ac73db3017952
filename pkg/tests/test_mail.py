import itertools
import random

import pytest

from sociotrace.comms.mail import (
    MailMessage,
    normalize_subject,
    parse_from_header,
    parse_mbox,
    thread_messages,
)
from sociotrace.errors import MalformedArchiveError


def mbox_text(*messages: str) -> str:
    return "".join(messages)


def message(
    msg_id: str,
    sender: str = "Alice Dev <alice@example.com>",
    date: str = "Mon, 04 Jan 2021 10:00:00 +0100",
    subject: str = "hello",
    in_reply_to: str | None = None,
    references: list[str] | None = None,
    body: str = "body text\n",
    with_id: bool = True,
) -> str:
    headers = [f"From dump@example.com Mon Jan  4 10:00:00 2021"]
    headers.append(f"From: {sender}")
    headers.append(f"Date: {date}")
    headers.append(f"Subject: {subject}")
    if with_id:
        headers.append(f"Message-ID: <{msg_id}>")
    if in_reply_to:
        headers.append(f"In-Reply-To: <{in_reply_to}>")
    if references:
        headers.append("References: " + " ".join(f"<{r}>" for r in references))
    return "\n".join(headers) + "\n\n" + body + "\n"


def write_mbox(tmp_path, text: str, name: str = "list.mbox") -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_empty_file_empty_table(tmp_path):
    path = write_mbox(tmp_path, "")
    assert parse_mbox(path) == []


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_mbox(str(tmp_path / "none.mbox"))


def test_not_an_mbox_raises(tmp_path):
    path = write_mbox(tmp_path, "this is just text\nwith no delimiters\n")
    with pytest.raises(MalformedArchiveError):
        parse_mbox(path)


def test_two_messages_with_linkage(tmp_path):
    text = mbox_text(
        message("m1", subject="question"),
        message(
            "m2",
            sender="Bob Hacker <bob@example.org>",
            date="Mon, 04 Jan 2021 11:00:00 +0000",
            subject="Re: question",
            in_reply_to="m1",
            references=["m1"],
        ),
    )
    rows = parse_mbox(write_mbox(tmp_path, text))
    assert [m.message_id for m in rows] == ["m1", "m2"]
    assert rows[1].in_reply_to == "m1"
    assert rows[1].references == ["m1"]
    assert rows[0].from_email == "alice@example.com"
    assert rows[0].from_name == "Alice Dev"
    assert rows[1].sent_timestamp > rows[0].sent_timestamp


def test_pipermail_obfuscated_address(tmp_path):
    text = message("m1", sender="jsmith at example.com (John Smith)")
    rows = parse_mbox(write_mbox(tmp_path, text))
    assert rows[0].from_email == "jsmith@example.com"
    assert rows[0].from_name == "John Smith"


def test_rfc2047_subject_and_name(tmp_path):
    text = message(
        "m1",
        sender="=?utf-8?q?Andr=C3=A9?= <andre@example.fr>",
        subject="=?utf-8?q?r=C3=A9ponse?=",
    )
    rows = parse_mbox(write_mbox(tmp_path, text))
    assert rows[0].from_name == "André"
    assert rows[0].subject == "réponse"


def test_raw_utf8_header_bytes(tmp_path):
    # archives often carry unencoded 8-bit names instead of RFC 2047
    text = message("m1", sender="Gil Gómez <gil@example.com>")
    rows = parse_mbox(write_mbox(tmp_path, text))
    assert rows[0].from_name == "Gil Gómez"
    assert rows[0].from_email == "gil@example.com"


def test_raw_latin1_header_bytes(tmp_path):
    text = message("m1", sender="José <jose@example.es>")
    path = tmp_path / "legacy.mbox"
    path.write_bytes(text.encode("latin-1"))
    rows = parse_mbox(str(path))
    assert rows[0].from_name == "José"
    assert rows[0].from_email == "jose@example.es"


def test_missing_message_id_synthesized(tmp_path):
    text = message("ignored", with_id=False)
    rows = parse_mbox(write_mbox(tmp_path, text))
    assert rows[0].message_id.startswith("synthetic-")
    # deterministic: same content, same id
    again = parse_mbox(write_mbox(tmp_path, text, name="again.mbox"))
    assert again[0].message_id == rows[0].message_id


def test_missing_date_sorts_to_epoch(tmp_path):
    broken = (
        "From dump@example.com Mon Jan  4 10:00:00 2021\n"
        "From: x@example.com\n"
        "Subject: undated\n"
        "Message-ID: <nodate>\n\nbody\n\n"
    )
    rows = parse_mbox(write_mbox(tmp_path, broken + message("m2")))
    assert rows[0].message_id == "nodate"
    assert rows[0].sent_timestamp.year == 1970


def test_sorted_by_timestamp(tmp_path):
    text = mbox_text(
        message("late", date="Tue, 05 Jan 2021 10:00:00 +0000"),
        message("early", date="Sun, 03 Jan 2021 10:00:00 +0000"),
    )
    rows = parse_mbox(write_mbox(tmp_path, text))
    assert [m.message_id for m in rows] == ["early", "late"]


def test_offset_preserved(tmp_path):
    rows = parse_mbox(write_mbox(tmp_path, message("m1", date="Mon, 04 Jan 2021 10:00:00 +0530")))
    assert rows[0].sent_timestamp.utcoffset().total_seconds() == 5.5 * 3600


def test_parse_from_header_plain():
    assert parse_from_header("Jane Roe <jane@example.com>") == ("Jane Roe", "jane@example.com")


def test_parse_from_header_comment_style():
    assert parse_from_header("jane@example.com (Jane Roe)") == ("Jane Roe", "jane@example.com")


# --- subject normalization ------------------------------------------------------

def test_normalize_subject_strips_reply_prefixes():
    assert normalize_subject("Re: Hello") == "hello"
    assert normalize_subject("RE: re: FWD: Hello  world") == "hello world"
    assert normalize_subject("Fwd: [2] Re: topic") == "topic"
    assert normalize_subject("regarding things") == "regarding things"


# --- threading -------------------------------------------------------------------

def make_messages(spec):
    """spec rows: (id, ts_minute, subject, in_reply_to, references)"""
    from datetime import datetime, timezone

    out = []
    for msg_id, minute, subject, irt, refs in spec:
        out.append(
            MailMessage(
                message_id=msg_id,
                from_name="n",
                from_email="e@x",
                sent_timestamp=datetime(2021, 1, 1, 10, minute, tzinfo=timezone.utc),
                subject=subject,
                in_reply_to=irt,
                references=refs or [],
            )
        )
    return out


def thread_partition(rows):
    groups = {}
    for m in rows:
        groups.setdefault(m.thread_id, set()).add(m.message_id)
    return set(frozenset(g) for g in groups.values())


def test_chain_shares_thread():
    rows = thread_messages(
        make_messages(
            [
                ("a", 0, "topic", None, None),
                ("b", 1, "Re: topic", "a", None),
                ("c", 2, "Re: topic", "b", None),
            ]
        )
    )
    assert len({m.thread_id for m in rows}) == 1
    assert all(m.thread_id == "a" for m in rows)  # earliest member ids the thread


def test_subject_fallback_without_references():
    rows = thread_messages(
        make_messages(
            [
                ("x", 0, "X", None, None),
                ("y", 5, "Re: X", None, None),
            ]
        )
    )
    assert rows[0].thread_id == rows[1].thread_id == "x"


def test_singleton_message_is_own_thread():
    rows = thread_messages(make_messages([("solo", 0, "alone", None, None)]))
    assert rows[0].thread_id == "solo"


def test_references_beat_subject():
    # same subject but explicitly linked elsewhere
    rows = thread_messages(
        make_messages(
            [
                ("r1", 0, "shared subject", None, None),
                ("r2", 1, "other topic", None, None),
                ("r3", 2, "shared subject", "r2", None),
            ]
        )
    )
    by_id = {m.message_id: m.thread_id for m in rows}
    assert by_id["r3"] == by_id["r2"]
    assert by_id["r3"] != by_id["r1"]


def test_unresolvable_reference_falls_back_to_subject():
    rows = thread_messages(
        make_messages(
            [
                ("a", 0, "topic", None, None),
                ("b", 1, "Re: topic", "not-in-archive", None),
            ]
        )
    )
    by_id = {m.message_id: m.thread_id for m in rows}
    assert by_id["a"] == by_id["b"]


def test_threading_partition_property():
    msgs = make_messages(
        [
            ("a", 0, "t1", None, None),
            ("b", 1, "Re: t1", "a", None),
            ("c", 2, "t2", None, None),
            ("d", 3, "Re: t2", None, None),
            ("e", 4, "t3", None, None),
        ]
    )
    rows = thread_messages(msgs)
    total = sum(len(g) for g in thread_partition(rows))
    assert total == len(msgs)


def test_threading_order_insensitive():
    msgs = make_messages(
        [
            ("a", 0, "t1", None, None),
            ("b", 1, "Re: t1", "a", None),
            ("c", 2, "t2", None, None),
            ("d", 3, "Re: t2", None, ["c"]),
            ("e", 4, "t1", None, None),
        ]
    )
    base = thread_partition(thread_messages(msgs))
    rng = random.Random(7)
    for _ in range(10):
        shuffled = msgs[:]
        rng.shuffle(shuffled)
        assert thread_partition(thread_messages(shuffled)) == base
    for perm in itertools.islice(itertools.permutations(msgs), 20):
        assert thread_partition(thread_messages(list(perm))) == base
