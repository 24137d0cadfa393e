"""Shared numerical and I/O helpers."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from qbsde.errors import ConfigurationError

BINARY_MAGIC = b"QBSDEDMP"


def jackknife_mean(samples: np.ndarray) -> tuple[float, float]:
    """Mean of 1-d samples with its leave-one-out jackknife standard error."""
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n == 0:
        raise ConfigurationError("jackknife_mean needs at least one sample")
    mean = float(np.mean(x))
    if n == 1:
        return mean, 0.0
    # leave-one-out means: theta_i = (S - x_i) / (n - 1)
    loo = (np.sum(x) - x) / (n - 1)
    se = float(np.sqrt((n - 1) / n * np.sum((loo - np.mean(loo)) ** 2)))
    return mean, se


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    a = np.vstack([np.ones_like(lx), lx]).T
    coef, *_ = np.linalg.lstsq(a, ly, rcond=None)
    return float(coef[1])


def fmt_float(v: float) -> str:
    """Shortest round-trip decimal form, reproducible across runs."""
    return repr(float(v))


def write_csv(path: str | Path, header: list[str], rows) -> Path:
    """Write rows of numbers/strings with deterministic float formatting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for c in row:
                if isinstance(c, (float, np.floating)):
                    cells.append(fmt_float(c))
                else:
                    cells.append(str(c))
            f.write(",".join(cells) + "\n")
    return path


def write_binary_dump(path: str | Path, values: np.ndarray, seed: int) -> Path:
    """Little-endian float64 dump. Header: magic, M, N, k, seed (int64)."""
    arr = np.ascontiguousarray(values, dtype="<f8")
    if arr.ndim != 3:
        raise ConfigurationError(f"binary dump expects a 3-d array, got shape {arr.shape}")
    m, n, k = arr.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        f.write(BINARY_MAGIC)
        f.write(struct.pack("<qqqq", m, n, k, int(seed)))
        f.write(arr.tobytes(order="C"))
    return path


def read_binary_dump(path: str | Path) -> tuple[np.ndarray, int]:
    path = Path(path)
    with path.open("rb") as f:
        magic = f.read(len(BINARY_MAGIC))
        if magic != BINARY_MAGIC:
            raise ConfigurationError(f"{path}: not a qbsde binary dump")
        m, n, k, seed = struct.unpack("<qqqq", f.read(32))
        data = np.frombuffer(f.read(), dtype="<f8")
    if data.size != m * n * k:
        raise ConfigurationError(f"{path}: truncated dump")
    return data.reshape(m, n, k).copy(), int(seed)
