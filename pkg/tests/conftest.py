"""Shared fixtures: scripted git repositories with pinned authors and dates."""

from __future__ import annotations

import os
import subprocess

import pytest


class RepoBuilder:
    """Drives a real git binary to build deterministic history."""

    def __init__(self, path: str):
        self.path = str(path)
        os.makedirs(self.path, exist_ok=True)
        self.git("init", "-q", "-b", "main")
        self.git("config", "user.name", "Fixture Bot")
        self.git("config", "user.email", "fixture@example.invalid")
        self.git("config", "commit.gpgsign", "false")

    def git(self, *args: str, env: dict | None = None) -> str:
        full_env = dict(os.environ)
        if env:
            full_env.update(env)
        proc = subprocess.run(
            ["git", *args],
            cwd=self.path,
            capture_output=True,
            text=True,
            env=full_env,
            check=True,
        )
        return proc.stdout

    def commit(
        self,
        files: dict[str, str | bytes | None],
        message: str = "change",
        author_name: str = "Alice Dev",
        author_email: str = "alice@example.com",
        date: str = "2021-01-01T10:00:00 +0100",
        committer_name: str | None = None,
        committer_email: str | None = None,
        renames: dict[str, str] | None = None,
    ) -> str:
        """files maps path -> text content, bytes (binary), or None to
        delete. renames maps old -> new path via `git mv`."""
        for old, new in (renames or {}).items():
            self.git("mv", old, new)
        for rel, content in files.items():
            target = os.path.join(self.path, rel)
            if content is None:
                os.unlink(target)
                self.git("add", "-A", rel)
                continue
            os.makedirs(os.path.dirname(target) or self.path, exist_ok=True)
            mode = "wb" if isinstance(content, bytes) else "w"
            with open(target, mode) as fh:
                fh.write(content)
            self.git("add", rel)
        if renames:
            self.git("add", "-A")
        env = {
            "GIT_AUTHOR_NAME": author_name,
            "GIT_AUTHOR_EMAIL": author_email,
            "GIT_AUTHOR_DATE": date,
            "GIT_COMMITTER_NAME": committer_name or author_name,
            "GIT_COMMITTER_EMAIL": committer_email or author_email,
            "GIT_COMMITTER_DATE": date,
        }
        self.git("commit", "-q", "--allow-empty", "-m", message, env=env)
        return self.git("rev-parse", "HEAD").strip()

    def merge(self, branch: str, message: str = "merge", date: str = "2021-06-01T10:00:00 +0000") -> str:
        env = {
            "GIT_AUTHOR_NAME": "Merge Bot",
            "GIT_AUTHOR_EMAIL": "merge@example.com",
            "GIT_AUTHOR_DATE": date,
            "GIT_COMMITTER_NAME": "Merge Bot",
            "GIT_COMMITTER_EMAIL": "merge@example.com",
            "GIT_COMMITTER_DATE": date,
        }
        self.git("merge", "--no-ff", "-q", "-m", message, branch, env=env)
        return self.git("rev-parse", "HEAD").strip()


@pytest.fixture
def repo(tmp_path):
    return RepoBuilder(tmp_path / "repo")


@pytest.fixture
def repo_factory(tmp_path):
    def make(name: str = "repo") -> RepoBuilder:
        return RepoBuilder(tmp_path / name)

    return make
