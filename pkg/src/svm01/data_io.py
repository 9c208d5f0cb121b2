"""Dataset parsing (LIBSVM-style sparse text), Gram/data matrices and bundled fixtures."""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np

from .core import Dataset

FIXTURE_PREFIX = "fixtures:"


class DatasetFormatError(ValueError):
    pass


class EmptyFileError(DatasetFormatError):
    def __init__(self, source="<text>"):
        super().__init__(f"{source}: no samples found")


class MalformedLineError(DatasetFormatError):
    def __init__(self, lineno: int, detail: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {detail}")


def parse_sparse_lines(text: str, source: str = "<text>") -> Dataset:
    """Parse ``LABEL idx:val ...`` lines (1-based indices, blank lines skipped)."""
    rows, labels = [], []
    n = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise MalformedLineError(lineno, f"non-numeric label {tokens[0]!r}") from None
        entries = {}
        for tok in tokens[1:]:
            idx, sep, val = tok.partition(":")
            if not sep:
                raise MalformedLineError(lineno, f"expected idx:val, got {tok!r}")
            try:
                j, v = int(idx), float(val)
            except ValueError:
                raise MalformedLineError(lineno, f"non-numeric token {tok!r}") from None
            if j < 1:
                raise MalformedLineError(lineno, f"feature index {j} must be >= 1")
            if not np.isfinite(v):
                raise MalformedLineError(lineno, f"non-finite value {tok!r}")
            entries[j] = v
            n = max(n, j)
        if not np.isfinite(label):
            raise MalformedLineError(lineno, "non-finite label")
        rows.append(entries)
        labels.append(label)
    if not rows:
        raise EmptyFileError(source)
    n = max(n, 1)
    X = np.zeros((len(rows), n))
    for i, entries in enumerate(rows):
        for j, v in entries.items():
            X[i, j - 1] = v
    raw = np.asarray(labels)
    y = np.where(raw > 0, 1.0, -1.0)
    if not np.all((raw == 1.0) | (raw == -1.0)):
        warnings.warn(f"{source}: labels other than +-1 normalized by sign (>0 -> +1)", stacklevel=2)
    return Dataset(X, y)


def parse_sparse_text(path) -> Dataset:
    path = Path(path)
    return parse_sparse_lines(path.read_text(), source=str(path))


def serialize(d: Dataset) -> str:
    lines = []
    for x, y in zip(d.samples, d.labels):
        feats = " ".join(f"{j + 1}:{float(v)!r}" for j, v in enumerate(x) if v != 0)
        lines.append(f"{int(y):+d} {feats}".rstrip())
    return "\n".join(lines) + "\n"


def gram(d: Dataset) -> np.ndarray:
    """``Q_ij = y_i y_j <x_i, x_j>``."""
    Z = d.labels[:, None] * d.samples
    Q = Z @ Z.T
    return 0.5 * (Q + Q.T)


def check_psd(Q: np.ndarray) -> bool:
    scale = np.linalg.norm(Q, "fro")
    return bool(np.linalg.eigvalsh(Q).min() >= -1e-8 * max(scale, 1.0))


def data_matrix(d: Dataset) -> np.ndarray:
    """Rows ``-(y_i x_i, y_i)`` so that ``u = A z + 1``."""
    return -np.hstack([d.labels[:, None] * d.samples, d.labels[:, None]])


def fixtures() -> dict:
    return {
        "xor": Dataset([[0, 0], [1, 0], [1, 1], [0, 1]], [1, -1, 1, -1]),
        "remark35": Dataset([[0.0], [1.0], [2.0]], [1, -1, -1]),
        "remark53": Dataset([[0, 0], [0.5, 0.5], [0, 1], [1, 0]], [1, 1, -1, -1]),
    }


def load_dataset(source: str) -> Dataset:
    """Load a file path or a ``fixtures:NAME`` pseudo-path."""
    if source.startswith(FIXTURE_PREFIX):
        name = source[len(FIXTURE_PREFIX):]
        fx = fixtures()
        if name not in fx:
            raise KeyError(f"unknown fixture {name!r}; choose from {sorted(fx)}")
        return fx[name]
    return parse_sparse_text(source)
