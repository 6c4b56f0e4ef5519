"""Shared exception base.

Every error raised on a bad input anywhere in the package derives from
WayfarerError so the CLI and HTTP layers can map them uniformly (exit
code 2 / 4xx) without enumerating module-specific types.
"""


class WayfarerError(Exception):
    pass
