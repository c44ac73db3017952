"""Issue-tracker fetching with pagination, rate-limit retries, and resume.

Raw API pages are the archival artifact: each page is written verbatim
inside a small envelope, and parsing happens later from disk. One request
is in flight at a time per call. A cursor file written after every page
makes an interrupted fetch resumable; fetch_log.json records per-request
retry counts.
"""

from __future__ import annotations

import json
import os
import time
from datetime import datetime, timezone

import requests

from ..errors import AuthRequiredError, FetchError, RateLimitedError
from ..tables import atomic_write_text

MAX_RETRIES = 3
CURSOR_FILE = "cursor.json"
LOG_FILE = "fetch_log.json"


def _request_json(
    session: requests.Session,
    url: str,
    params: dict,
    headers: dict,
    log: list[dict],
    sleep=time.sleep,
):
    """GET with retry on 429 (honoring Retry-After) and on 5xx."""
    retries = 0
    while True:
        try:
            resp = session.get(url, params=params, headers=headers, timeout=30)
        except requests.RequestException as exc:
            raise FetchError(url, f"network failure: {exc}")
        if resp.status_code == 401:
            raise AuthRequiredError(url)
        if resp.status_code == 429 or resp.status_code >= 500:
            if retries >= MAX_RETRIES:
                if resp.status_code == 429:
                    raise RateLimitedError(url, retries)
                raise FetchError(url, f"HTTP {resp.status_code} after {retries} retries")
            delay = 0.0
            retry_after = resp.headers.get("Retry-After")
            if retry_after is not None:
                try:
                    delay = float(retry_after)
                except ValueError:
                    delay = 1.0
            sleep(delay)
            retries += 1
            continue
        if resp.status_code >= 400:
            raise FetchError(url, f"HTTP {resp.status_code}: {resp.text[:200]}")
        log.append({"url": resp.url, "status": resp.status_code, "retries": retries})
        try:
            return resp.json()
        except ValueError as exc:
            raise FetchError(url, f"response is not JSON: {exc}")


def _write_page(out_dir: str, page_no: int, url: str, kind: str, data) -> str:
    name = f"page_{page_no:05d}.json"
    envelope = {
        "fetched_at": datetime.now(timezone.utc).isoformat(),
        "url": url,
        "kind": kind,
        "data": data,
    }
    atomic_write_text(os.path.join(out_dir, name), json.dumps(envelope, indent=1))
    return name


def _load_cursor(out_dir: str) -> dict | None:
    path = os.path.join(out_dir, CURSOR_FILE)
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    return None


def _save_cursor(out_dir: str, cursor: dict) -> None:
    atomic_write_text(os.path.join(out_dir, CURSOR_FILE), json.dumps(cursor))


def _finish(out_dir: str, log: list[dict]) -> None:
    atomic_write_text(os.path.join(out_dir, LOG_FILE), json.dumps(log, indent=1))
    cursor_path = os.path.join(out_dir, CURSOR_FILE)
    if os.path.exists(cursor_path):
        os.unlink(cursor_path)


def fetch_issues(
    tracker: str,
    base_url: str,
    project_key: str,
    out_dir: str,
    page_size: int = 100,
    token: str = "",
    session: requests.Session | None = None,
    sleep=time.sleep,
) -> int:
    """Paginate the tracker's issue listing into out_dir page files.
    Returns the number of issue entries fetched. A cursor file persists
    progress after every page, so re-running resumes; a completed run
    removes the cursor and rewrites pages from scratch next time."""
    if tracker not in ("jira", "github"):
        raise ValueError(f"unknown tracker {tracker!r}")
    os.makedirs(out_dir, exist_ok=True)
    own_session = session is None
    session = session or requests.Session()
    log: list[dict] = []
    try:
        if tracker == "github":
            return _fetch_github(session, base_url, project_key, out_dir, page_size, token, log, sleep)
        return _fetch_jira(session, base_url, project_key, out_dir, page_size, token, log, sleep)
    except FetchError:
        atomic_write_text(os.path.join(out_dir, LOG_FILE), json.dumps(log, indent=1))
        raise
    finally:
        if own_session:
            session.close()


def _fetch_github(session, base_url, project_key, out_dir, page_size, token, log, sleep) -> int:
    headers = {"Accept": "application/vnd.github+json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    base = base_url.rstrip("/")
    cursor = _load_cursor(out_dir) or {"stage": "issues", "api_page": 1, "file_page": 1, "count": 0}
    count = cursor["count"]
    file_page = cursor["file_page"]

    if cursor["stage"] == "issues":
        api_page = cursor["api_page"]
        while True:
            url = f"{base}/repos/{project_key}/issues"
            params = {
                "state": "all",
                "per_page": page_size,
                "page": api_page,
                "sort": "created",
                "direction": "asc",
            }
            data = _request_json(session, url, params, headers, log, sleep)
            if not data:
                break
            _write_page(out_dir, file_page, url, "issues", data)
            count += len(data)
            file_page += 1
            api_page += 1
            _save_cursor(out_dir, {"stage": "issues", "api_page": api_page, "file_page": file_page, "count": count})
            if len(data) < page_size:
                break
        cursor = {"stage": "comments", "api_page": 1, "file_page": file_page, "count": count}
        _save_cursor(out_dir, cursor)

    api_page = cursor["api_page"]
    while True:
        url = f"{base}/repos/{project_key}/issues/comments"
        params = {"per_page": page_size, "page": api_page, "sort": "created", "direction": "asc"}
        data = _request_json(session, url, params, headers, log, sleep)
        if not data:
            break
        _write_page(out_dir, file_page, url, "comments", data)
        file_page += 1
        api_page += 1
        _save_cursor(out_dir, {"stage": "comments", "api_page": api_page, "file_page": file_page, "count": count})
        if len(data) < page_size:
            break
    _finish(out_dir, log)
    return count


def _fetch_jira(session, base_url, project_key, out_dir, page_size, token, log, sleep) -> int:
    headers = {"Accept": "application/json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    base = base_url.rstrip("/")
    url = f"{base}/rest/api/2/search"
    cursor = _load_cursor(out_dir) or {"start_at": 0, "file_page": 1, "count": 0}
    start_at = cursor["start_at"]
    file_page = cursor["file_page"]
    count = cursor["count"]
    while True:
        params = {
            "jql": f"project={project_key} ORDER BY created ASC",
            "startAt": start_at,
            "maxResults": page_size,
            "fields": "summary,labels,issuetype,created,reporter,status,comment",
        }
        data = _request_json(session, url, params, headers, log, sleep)
        issues = data.get("issues", [])
        total = int(data.get("total", len(issues)))
        if issues:
            _write_page(out_dir, file_page, url, "issues", data)
            count += len(issues)
            file_page += 1
        start_at += len(issues)
        _save_cursor(out_dir, {"start_at": start_at, "file_page": file_page, "count": count})
        if not issues or start_at >= total:
            break
    _finish(out_dir, log)
    return count
