#!/usr/bin/env python3
"""Regenerate the explorer's test fixture from a scripted project.

Builds a small git repository plus a mailing-list archive, runs the
pipeline's `all` stage on it, and copies the output directory into
frontend/tests/fixtures/out/. Run from the repository root with the
Python package installed:

    python3 frontend/tools/generate_fixture.py

Window 0 holds the four-missing-links scenario: four files each
co-changed by exactly two of five developers, every developer posting
only in their own thread. Window 1 has a lone committer (no
collaboration edges, so congruence is null) while two developers share
a mail thread.
"""

import os
import shutil
import subprocess
import sys
import tempfile

import yaml

from sociotrace import pipeline
from sociotrace.config import load_config

AUTHORS = {
    "A": ("Ada Adams", "ada@example.com"),
    "B": ("Ben Brooks", "ben@example.com"),
    "D": ("Dan Diaz", "dan@example.com"),
    "E": ("Eve Eaton", "eve@example.com"),
    "G": ("Gil Gómez", "gil@example.com"),
}

# (file, author, day, line count) — pairs {A,B} {B,E} {B,G} {D,G}
WINDOW0_COMMITS = [
    ("f1.py", "A", 1, 3),
    ("f1.py", "B", 2, 5),
    ("f2.py", "B", 3, 2),
    ("f2.py", "E", 4, 4),
    ("f3.py", "B", 5, 3),
    ("f3.py", "G", 6, 6),
    ("f4.py", "D", 7, 2),
    ("f4.py", "G", 8, 3),
]

WINDOW1_COMMITS = [
    ("f1.py", "A", 95, 7),
]

MESSAGE = """From dump@example.com Mon Jan  1 00:00:00 2021
From: {name} <{email}>
Date: {date}
Subject: {subject}
Message-ID: <{msg_id}@list>
{extra}
{body}
"""


def git(repo, *args, env=None):
    full = dict(os.environ)
    if env:
        full.update(env)
    subprocess.run(["git", *args], cwd=repo, env=full, check=True, capture_output=True)


def day_to_date(day: int, hour: int = 10) -> str:
    from datetime import datetime, timedelta, timezone

    stamp = datetime(2021, 1, 1, hour, 0, tzinfo=timezone.utc) + timedelta(days=day)
    return stamp.strftime("%Y-%m-%dT%H:%M:%S +0000")


def mail_date(day: int, hour: int = 12) -> str:
    from datetime import datetime, timedelta, timezone

    stamp = datetime(2021, 1, 1, hour, 0, tzinfo=timezone.utc) + timedelta(days=day)
    return stamp.strftime("%a, %d %b %Y %H:%M:%S +0000")


def build_repo(repo: str):
    os.makedirs(repo)
    git(repo, "init", "-q", "-b", "main")
    git(repo, "config", "user.name", "Fixture")
    git(repo, "config", "user.email", "fixture@example.invalid")
    counters: dict[str, int] = {}
    for path, who, day, lines in WINDOW0_COMMITS + WINDOW1_COMMITS:
        counters[path] = counters.get(path, 0) + 1
        body = "".join(f"{path} revision {counters[path]} line {i}\n" for i in range(lines))
        with open(os.path.join(repo, path), "w", encoding="utf-8") as fh:
            fh.write(body)
        git(repo, "add", path)
        name, email = AUTHORS[who]
        stamp = day_to_date(day)
        git(
            repo, "commit", "-q", "-m", f"update {path}",
            env={
                "GIT_AUTHOR_NAME": name, "GIT_AUTHOR_EMAIL": email, "GIT_AUTHOR_DATE": stamp,
                "GIT_COMMITTER_NAME": name, "GIT_COMMITTER_EMAIL": email, "GIT_COMMITTER_DATE": stamp,
            },
        )


def build_mbox(path: str):
    blocks = []
    # window 0: each developer alone in their own thread
    for i, who in enumerate(["A", "B", "D", "E", "G"]):
        name, email = AUTHORS[who]
        blocks.append(MESSAGE.format(
            name=name, email=email, date=mail_date(10 + i),
            subject=f"status {who}", msg_id=f"solo-{who.lower()}", extra="", body=f"report {who}\n",
        ))
    # window 1: Ada and Ben share a thread
    blocks.append(MESSAGE.format(
        name=AUTHORS["A"][0], email=AUTHORS["A"][1], date=mail_date(96),
        subject="next release", msg_id="rel-1", extra="", body="planning\n",
    ))
    blocks.append(MESSAGE.format(
        name=AUTHORS["B"][0], email=AUTHORS["B"][1], date=mail_date(97),
        subject="Re: next release", msg_id="rel-2",
        extra="In-Reply-To: <rel-1@list>\n", body="agreed\n",
    ))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(blocks))


def main() -> int:
    here = os.path.dirname(os.path.abspath(__file__))
    target = os.path.normpath(os.path.join(here, "..", "tests", "fixtures", "out"))
    with tempfile.TemporaryDirectory(prefix="explorer-fixture-") as tmp:
        repo = os.path.join(tmp, "repo")
        build_repo(repo)
        mbox = os.path.join(tmp, "list.mbox")
        build_mbox(mbox)
        config_path = os.path.join(tmp, "project.yml")
        with open(config_path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(
                {
                    "project_name": "explorer-fixture",
                    "git_repo_path": repo,
                    "mbox_paths": [mbox],
                    "window_days": 90,
                },
                fh,
                sort_keys=False,
            )
        out = os.path.join(tmp, "out")
        pipeline.run_all(load_config(config_path), out, config_path=config_path)
        if os.path.isdir(target):
            shutil.rmtree(target)
        shutil.copytree(out, target)
    names = sorted(os.listdir(target))
    print(f"wrote {len(names)} files to {target}")
    for name in names:
        print(" ", name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
