"""Ask plain-English questions of onboarded SQLite/CSV databases.

The heavy lifting happens in the compiled ``_askdb`` extension; this package
only points it at the bundled data files when installed from a wheel.
"""

import os as _os

_bundled = _os.path.join(_os.path.dirname(__file__), "data")
if _os.path.isdir(_bundled):
    _os.environ.setdefault("ASKDB_DATA_DIR", _bundled)

from ._askdb import (  # noqa: E402
    AskdbError,
    Service,
    canonical_sql,
    clean_identifier,
    edit_distance,
    explain,
    explain_json,
    normalize_query,
    tokenize,
    words_to_numbers,
)

__all__ = [
    "AskdbError",
    "Service",
    "canonical_sql",
    "clean_identifier",
    "edit_distance",
    "explain",
    "explain_json",
    "normalize_query",
    "tokenize",
    "words_to_numbers",
]
