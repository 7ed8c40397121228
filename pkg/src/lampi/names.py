"""Channel names and the global fresh-name supply.

Names are plain strings.  A fresh name is ``<base>_<n>`` where ``n`` comes from
a process-wide counter; the parsers bump the counter past any numeric suffix
they read, so generated names never collide with names already in scope.
"""

from __future__ import annotations

import itertools
import re
import threading

OMEGA = "omega"

_SUFFIX = re.compile(r"^(.*?)_(\d+)$")
_lock = threading.Lock()
_counter = itertools.count(1)
_floor = 0


def base_of(name: str) -> str:
    m = _SUFFIX.match(name)
    return m.group(1) if m and m.group(1) else name


def fresh(base: str = "x") -> str:
    base = base_of(base)
    with _lock:
        n = next(_counter)
        while n <= _floor:
            n = next(_counter)
    return f"{base}_{n}"


def fresh_many(bases) -> tuple[str, ...]:
    return tuple(fresh(b) for b in bases)


def reserve(name: str) -> None:
    """Make sure later fresh names cannot coincide with ``name``."""
    global _floor
    m = _SUFFIX.match(name)
    if m:
        with _lock:
            _floor = max(_floor, int(m.group(2)))


def fresh_avoiding(base: str, avoid) -> str:
    b = base_of(base)
    if b not in avoid:
        return b
    return fresh(b)
