"""Time series of amplitudes from either solver, plus their file formats.

CSV layout: ``#`` comment header, then columns
``t, re_c1, im_c1, re_c2, im_c2, re_c3, im_c3, norm2``.

The optional mode sidecar is raw little-endian float64: ``M``, ``count``,
then for each sample time the 2M+1 complex b_m as (re, im) pairs.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_COLUMNS = ["t", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3", "norm2"]


@dataclass
class AmplitudeTrace:
    times: np.ndarray
    c: np.ndarray  # shape (3, n)
    b: np.ndarray | None = None  # shape (n, 2M+1)
    provenance: str = "analytic"
    norm_drift: float = float("nan")
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.c = np.asarray(self.c, dtype=complex)
        if self.c.shape != (3, self.times.size):
            raise ValueError("amplitude arrays must have shape (3, len(times))")
        if self.b is not None and self.b.shape[0] != self.times.size:
            raise ValueError("mode array length does not match times")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.c) ** 2

    @property
    def norm2(self) -> np.ndarray:
        total = np.sum(np.abs(self.c) ** 2, axis=0)
        if self.b is not None:
            total = total + np.sum(np.abs(self.b) ** 2, axis=1)
        return total

    def to_csv(self, path=None, header: str = "") -> str:
        cols = [self.times]
        for row in self.c:
            cols += [row.real, row.imag]
        cols.append(self.norm2)
        buf = io.StringIO()
        for line in header.splitlines():
            buf.write(f"# {line}\n")
        buf.write(",".join(CSV_COLUMNS) + "\n")
        np.savetxt(buf, np.column_stack(cols), delimiter=",", fmt="%.17g")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def write_modes(self, path) -> None:
        if self.b is None:
            raise ValueError("trace carries no mode amplitudes")
        n, width = self.b.shape
        header = np.array([(width - 1) // 2, n], dtype="<f8")
        body = np.ascontiguousarray(self.b, dtype="<c16").view("<f8")
        with open(path, "wb") as fh:
            fh.write(header.tobytes())
            fh.write(body.tobytes())


def read_csv(path) -> AmplitudeTrace:
    lines = [line for line in Path(path).read_text().splitlines() if line and not line.startswith("#")]
    if not lines or lines[0].split(",") != CSV_COLUMNS:
        raise ValueError("unexpected CSV columns")
    values = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    c = np.array([values[:, 1 + 2 * j] + 1j * values[:, 2 + 2 * j] for j in range(3)])
    return AmplitudeTrace(values[:, 0], c, provenance="file")


def read_modes(path) -> np.ndarray:
    raw = np.fromfile(path, dtype="<f8")
    M, n = int(raw[0]), int(raw[1])
    return raw[2:].view("<c16").reshape(n, 2 * M + 1)
