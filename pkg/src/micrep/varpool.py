"""Variable interning.

Variables are names interned to stable integer ids for the lifetime of the
process.  Affine forms and systems store ids only; names reappear at
formatting time.  Default orderings (elimination order, printing order) are
ascending id, i.e. interning order.
"""

from __future__ import annotations

import re
import threading

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")

_lock = threading.Lock()
_name_to_id: dict[str, int] = {}
_id_to_name: list[str] = []


def intern_var(name: str) -> int:
    """Return the stable id for `name`, creating one on first use."""
    if not _NAME_RE.match(name):
        raise ValueError(f"invalid variable name {name!r}")
    with _lock:
        vid = _name_to_id.get(name)
        if vid is None:
            vid = len(_id_to_name)
            _name_to_id[name] = vid
            _id_to_name.append(name)
        return vid


def var_name(vid: int) -> str:
    try:
        return _id_to_name[vid]
    except IndexError:
        raise KeyError(f"unknown variable id {vid}") from None


def fresh_var(prefix: str, taken: set[int] = frozenset()) -> int:
    """Intern the first `prefix<k>` whose id is new and not in `taken`."""
    with _lock:
        k = 1
        while True:
            name = f"{prefix}{k}"
            vid = _name_to_id.get(name)
            if vid is None:
                vid = len(_id_to_name)
                _name_to_id[name] = vid
                _id_to_name.append(name)
                return vid
            if vid not in taken:
                # Reusing an interned but unused name keeps runs within one
                # process deterministic.
                return vid
            k += 1
