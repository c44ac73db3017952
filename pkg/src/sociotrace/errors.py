"""Exception hierarchy shared by every module.

Split along the CLI's exit-code boundary: ``UserError`` subclasses map to
exit code 1 (bad input, bad config, bad data on disk), ``EnvironmentError-``
style subclasses map to exit code 2 (missing tools, network trouble).
"""

from __future__ import annotations


class SocioTraceError(Exception):
    """Base class for every error raised by this package."""


class UserInputError(SocioTraceError):
    """The user supplied something wrong: config, paths, flags, data files."""


class ToolEnvironmentError(SocioTraceError):
    """The runtime environment is missing or refusing something we need."""


# --- configuration ---------------------------------------------------------

class ConfigError(UserInputError):
    """Problem with the project configuration file."""


class MalformedDocumentError(ConfigError):
    """Config file is not parseable YAML."""

    def __init__(self, path: str, line: int | None, detail: str):
        self.path = path
        self.line = line
        self.detail = detail
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: malformed document: {detail}")


class MissingRequiredFieldError(ConfigError):
    def __init__(self, path: str, field: str):
        self.path = path
        self.field = field
        super().__init__(f"{path}: missing required field {field!r}")


class InvalidValueError(ConfigError):
    def __init__(self, path: str, field: str, detail: str):
        self.path = path
        self.field = field
        self.detail = detail
        super().__init__(f"{path}: invalid value for {field!r}: {detail}")


class InvalidRangeError(UserInputError):
    """A time range or window length is unusable."""


class InvalidPatternError(UserInputError):
    """A file-filter regex does not compile."""

    def __init__(self, pattern: str, detail: str):
        self.pattern = pattern
        self.detail = detail
        super().__init__(f"invalid pattern {pattern!r}: {detail}")


# --- version control -------------------------------------------------------

class NotARepositoryError(UserInputError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"not a git repository: {path}")


class BranchNotFoundError(UserInputError):
    def __init__(self, branch: str, repo: str):
        self.branch = branch
        self.repo = repo
        super().__init__(f"branch {branch!r} not found in {repo}")


class ToolInvocationError(ToolEnvironmentError):
    """An external binary is missing or exited uncleanly."""

    def __init__(self, tool: str, detail: str):
        self.tool = tool
        self.detail = detail
        super().__init__(f"{tool}: {detail}")


class UnsupportedTagOutputError(UserInputError):
    """The tags extractor produced output we cannot interpret."""

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"unsupported tags output: {detail}")


# --- communication archives -------------------------------------------------

class MalformedArchiveError(UserInputError):
    def __init__(self, path: str, detail: str):
        self.path = path
        self.detail = detail
        super().__init__(f"{path}: {detail}")


# --- remote fetching --------------------------------------------------------

class FetchError(ToolEnvironmentError):
    """Network-level failure talking to a remote API."""

    def __init__(self, url: str, detail: str):
        self.url = url
        self.detail = detail
        super().__init__(f"{url}: {detail}")


class AuthRequiredError(FetchError):
    def __init__(self, url: str):
        super().__init__(url, "authentication required (HTTP 401)")


class RateLimitedError(FetchError):
    def __init__(self, url: str, retries: int):
        self.retries = retries
        super().__init__(url, f"rate limited after {retries} retries")


# --- identities -------------------------------------------------------------

class UnparseableActorError(UserInputError):
    def __init__(self, raw: str):
        self.raw = raw
        super().__init__(f"cannot parse actor string: {raw!r}")
