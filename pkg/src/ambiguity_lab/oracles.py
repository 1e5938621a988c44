"""Exhaustive reference computations for tiny instances.

These exist to be obviously correct: each one enumerates every candidate
(guessing tables, strategy pairs, encoders, side-information maps) in
lexicographic order and keeps the smallest objective.  The heavy loops run in
``kernels`` (compiled when available); this module only lays out the data and
enforces the budget.

Only cells and points carrying positive probability are enumerated; choices
elsewhere cannot change any objective.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ParameterError, SizeError
from .guessing import _check_rho
from .pmf import DEFAULT_MAX_CONFIGS, JointPMF
from .storage import HintEncoder, eve_cells

BUDGET_ENV = "AMBIGUITY_LAB_BUDGET"
_CHUNK = 1 << 16


def _default_max_configs() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_MAX_CONFIGS


@dataclass(frozen=True)
class Budget:
    max_configs: int = field(default_factory=_default_max_configs)
    max_seconds: float = 120.0

    def __post_init__(self) -> None:
        if self.max_configs <= 0 or self.max_seconds <= 0:
            raise ParameterError("budget limits must be positive")

    def admit(self, configs: int, what: str) -> None:
        if configs > self.max_configs:
            raise SizeError(
                f"{what} needs {configs} configurations, over max_configs={self.max_configs}"
            )


def permutation_ranks(x_size: int) -> np.ndarray:
    """Rank vectors of all guessing orders, in lexicographic order of the orders."""
    orders = np.array(list(itertools.permutations(range(x_size))), dtype=np.int64)
    ranks = np.empty_like(orders)
    np.put_along_axis(ranks, orders, np.arange(1, x_size + 1)[None, :], axis=1)
    return np.ascontiguousarray(ranks, dtype=np.int32)


def _powtab(top: int, rho: float) -> np.ndarray:
    tab = np.arange(top + 1, dtype=float) ** rho
    tab[0] = 0.0
    return tab


def _run(kernel, args, configs: int, b: Budget) -> float:
    t0 = time.monotonic()
    best = math.inf
    for lo in range(0, configs, _CHUNK):
        value, _ = kernel(*args, lo, min(lo + _CHUNK, configs))
        best = min(best, value)
        if time.monotonic() - t0 > b.max_seconds:
            raise SizeError(f"enumeration exceeded max_seconds={b.max_seconds}")
    return best


def _compact(cells: np.ndarray) -> tuple[np.ndarray, int]:
    uniq, inv = np.unique(cells, return_inverse=True)
    return inv.astype(np.int32), uniq.size


def brute_min_guess(j: JointPMF, rho: float, b: Budget | None = None) -> float:
    """Exact ``min_G E[G(X|Y)**rho]`` by enumerating every guessing table."""
    _check_rho(rho)
    b = b or Budget()
    xs, ys = np.nonzero(j.mass)
    cells, n_cells = _compact(ys)
    configs = math.factorial(j.x_size) ** n_cells
    b.admit(configs, "brute_min_guess")
    args = (permutation_ranks(j.x_size), n_cells, xs.astype(np.int32), cells, cells,
            j.mass[xs, ys].astype(float), _powtab(j.x_size, rho))
    return _run(kernels.enum_rank_tables, args, configs, b)


def brute_eve(enc: HintEncoder, j: JointPMF, rho: float, b: Budget | None = None) -> float:
    """Exact genie-aided ambiguity ``min_{G1,G2} E[min(G1, G2)**rho]``."""
    _check_rho(rho)
    b = b or Budget()
    w = j.mass[enc.xs, enc.ys] * enc.probs
    c1, c2 = eve_cells(enc)
    keep = w > 0
    xs, w, c1, c2 = enc.xs[keep], w[keep], c1[keep], c2[keep]
    a, n1 = _compact(c1)
    bb, n2 = _compact(c2)
    configs = math.factorial(enc.x_size) ** (n1 + n2)
    b.admit(configs, "brute_eve")
    args = (permutation_ranks(enc.x_size), n1 + n2, xs.astype(np.int32), a,
            (bb + n1).astype(np.int32), w.astype(float), _powtab(enc.x_size, rho))
    return _run(kernels.enum_rank_tables, args, configs, b)


def brute_task_encoder(j: JointPMF, m_size: int, rho: float, b: Budget | None = None) -> float:
    """Exact minimum list moment over deterministic encoders with ``m_size`` descriptions."""
    _check_rho(rho)
    if m_size < 1:
        raise ParameterError("m_size must be positive")
    b = b or Budget()
    xs, ys = np.nonzero(j.mass)
    configs = m_size ** xs.size
    b.admit(configs, "brute_task_encoder")
    args = (ys.astype(np.int32), j.mass[xs, ys].astype(float), m_size, j.y_size,
            _powtab(j.x_size, rho))
    return _run(kernels.enum_list_functions, args, configs, b)


def brute_side_info(j: JointPMF, z_size: int, rho: float, b: Budget | None = None) -> float:
    """Exact ``min_f min_G E[G(X | Y, f(X, Y))**rho]`` over all maps ``f``."""
    _check_rho(rho)
    if z_size < 1:
        raise ParameterError("z_size must be positive")
    b = b or Budget()
    xs, ys = np.nonzero(j.mass)
    w = j.mass[xs, ys]
    order = np.lexsort((xs, -w, ys))
    configs = z_size ** xs.size
    b.admit(configs, "brute_side_info")
    args = (ys[order].astype(np.int32), w[order].astype(float), z_size, j.y_size,
            _powtab(j.x_size, rho))
    return _run(kernels.enum_sideinfo_functions, args, configs, b)
