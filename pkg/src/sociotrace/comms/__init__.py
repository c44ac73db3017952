"""Communication-source parsers and fetchers: mbox archives, issue trackers."""
