"""CSV matrix I/O and atomic artifact writes.

Matrices are dense, comma-separated, '.' decimal, no header; masks use
0/1 integers.  Every artifact is written to a temporary file in the target
directory and renamed into place, so files are either complete or absent.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np


def read_matrix(path: str) -> np.ndarray:
    """Load a dense CSV matrix; always returns a 2-D float array."""
    data = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    return data


def write_matrix(path: str, a, fmt: str = "%.17g") -> None:
    """Write a dense CSV matrix atomically."""
    a = np.atleast_2d(np.asarray(a))
    with atomic_write(path) as fh:
        np.savetxt(fh, a, delimiter=",", fmt=fmt)


class atomic_write:
    """Context manager writing to a temp file and renaming on success."""

    def __init__(self, path: str, mode: str = "w"):
        self.path = path
        self.mode = mode
        self._fh = None
        self._tmp = None

    def __enter__(self):
        directory = os.path.dirname(os.path.abspath(self.path))
        os.makedirs(directory, exist_ok=True)
        fd, self._tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        self._fh = os.fdopen(fd, self.mode)
        return self._fh

    def __exit__(self, exc_type, exc, tb):
        self._fh.close()
        if exc_type is None:
            os.replace(self._tmp, self.path)
        else:
            os.unlink(self._tmp)
        return False
