"""On-disk cache of U^- weight spaces, enabled by the QPI_CACHE_DIR variable.

Entries are pickles keyed by a hash of the Cartan datum and the depth; writes
go through a temporary file and an atomic rename, so concurrent writers are safe.
"""

from __future__ import annotations

import hashlib
import json
import os
import pickle
import tempfile

ENV = "QPI_CACHE_DIR"
FORMAT = 1


def cache_dir() -> str | None:
    d = os.environ.get(ENV)
    return d or None


def _path(root: str, datum, depth) -> str:
    key = json.dumps({"datum": datum.to_json(), "format": FORMAT}, sort_keys=True)
    h = hashlib.sha256(key.encode()).hexdigest()[:16]
    name = "_".join(str(x) for x in depth) or "0"
    return os.path.join(root, h, f"{name}.pkl")


def load(datum, depth):
    root = cache_dir()
    if root is None:
        return None
    path = _path(root, datum, depth)
    try:
        with open(path, "rb") as fh:
            return pickle.load(fh)
    except (OSError, pickle.UnpicklingError, EOFError, AttributeError):
        return None


def save(datum, depth, obj) -> None:
    root = cache_dir()
    if root is None:
        return
    path = _path(root, datum, depth)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            pickle.dump(obj, fh, protocol=pickle.HIGHEST_PROTOCOL)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
