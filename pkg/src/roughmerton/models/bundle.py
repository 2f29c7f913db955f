"""Simulated path container with CSV and binary export.

Binary layout (little endian)::

    magic   4 bytes  b"VMPB"
    version u32      1
    n_paths u64
    n_steps u64
    dt      f64
    seed    u64
    V       f64[n_paths][n_steps+1]
    S       f64[n_paths][n_steps+1]
    wealth  f64[n_paths][n_steps+1]   (NaN when no wealth was simulated)
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import BinaryIO, TextIO

import numpy as np

from ..errors import DomainError
from ..kernels import TimeGrid

MAGIC = b"VMPB"
VERSION = 1
_HEADER = struct.Struct("<4sIQQdQ")


@dataclass(frozen=True)
class PathBundle:
    """Paths on a shared grid; arrays are ``(n_paths, ...)``.

    ``iv[:, j]`` is the variance integrated over cell j and ``sdw1[:, j]`` the
    matching stochastic integral of ``sqrt(V)`` against W1. Wealth and stock
    updates only need these two per-cell quantities.
    """

    grid: TimeGrid
    n_paths: int
    seed: int
    v: np.ndarray
    s: np.ndarray
    iv: np.ndarray
    sdw1: np.ndarray
    w1: np.ndarray | None = None
    w2: np.ndarray | None = None
    wealth: np.ndarray | None = None
    z: np.ndarray | None = None
    y_factors: np.ndarray | None = None
    scheme: str = "euler"
    antithetic: bool = False
    rho: float = 0.0

    def with_wealth(self, wealth: np.ndarray) -> "PathBundle":
        return replace(self, wealth=wealth)

    def b_increments(self) -> np.ndarray:
        if self.w1 is None or self.w2 is None:
            raise DomainError(f"scheme {self.scheme!r} does not record Brownian increments")
        return self.rho * self.w1 + np.sqrt(1.0 - self.rho ** 2) * self.w2

    # export ------------------------------------------------------------
    def to_csv(self, stream: TextIO | None = None) -> str:
        buf = io.StringIO()
        buf.write("path_id,t,V,S,wealth\n")
        t = self.grid.nodes
        for p in range(self.n_paths):
            for j in range(t.shape[0]):
                w = "" if self.wealth is None else repr(float(self.wealth[p, j]))
                buf.write(f"{p},{float(t[j])!r},{float(self.v[p, j])!r},{float(self.s[p, j])!r},{w}\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(MAGIC, VERSION, self.n_paths, self.grid.n_steps, self.grid.dt,
                              self.seed)
        wealth = self.wealth if self.wealth is not None else np.full_like(self.v, np.nan)
        body = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes()
                        for a in (self.v, self.s, wealth))
        return header + body

    def write_binary(self, target: str | Path | BinaryIO) -> None:
        data = self.to_bytes()
        if isinstance(target, (str, Path)):
            Path(target).write_bytes(data)
        else:
            target.write(data)


def read_binary(source: str | Path | bytes) -> dict:
    """Parse a binary dump into ``{grid, n_paths, seed, v, s, wealth}``."""
    data = Path(source).read_bytes() if isinstance(source, (str, Path)) else bytes(source)
    if len(data) < _HEADER.size:
        raise DomainError("truncated path bundle header")
    magic, version, n_paths, n_steps, dt, seed = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DomainError(f"bad magic {magic!r}")
    if version != VERSION:
        raise DomainError(f"unsupported bundle version {version}")
    count = n_paths * (n_steps + 1)
    expected = _HEADER.size + 3 * 8 * count
    if len(data) != expected:
        raise DomainError(f"bundle size {len(data)} does not match header ({expected})")
    arrays = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(3, n_paths, n_steps + 1)
    wealth = arrays[2].copy()
    return {
        "grid": TimeGrid(dt, n_steps),
        "n_paths": n_paths,
        "seed": seed,
        "v": arrays[0].copy(),
        "s": arrays[1].copy(),
        "wealth": None if np.all(np.isnan(wealth)) else wealth,
    }
