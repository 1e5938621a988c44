"""Guessing functions, optimal guessing moments and side-information refinement.

A guessing function assigns each conditioning cell a bijection from the secret
alphabet onto ranks ``1..|X|``.  Conditioning on several variables is handled
by flattening them into one cell index, rightmost variable least significant,
so Bob's ``(y, m1, m2)`` and Eve's ``(y, m1)`` use the same type.

Ties in posterior probability are always broken by ascending symbol index.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .pmf import CondPMF, JointPMF, arimoto_conditional_entropy, guessing_order, posterior_family


def _check_rho(rho: float) -> None:
    if not rho > 0:
        raise ParameterError(f"rho must be positive, got {rho!r}")


@dataclass(frozen=True, eq=False)
class GuessingFunction:
    """``ranks[cell, x]`` is the 1-based position at which ``x`` is guessed."""

    ranks: np.ndarray

    def __post_init__(self) -> None:
        ranks = np.asarray(self.ranks)
        if ranks.ndim != 2 or ranks.shape[1] < 1:
            raise ParameterError(f"rank table must be a matrix, got shape {ranks.shape}")
        ranks = ranks.astype(np.int64)
        expected = np.arange(1, ranks.shape[1] + 1)
        if not np.all(np.sort(ranks, axis=1) == expected):
            raise ParameterError("every rank row must be a bijection onto 1..|X|")
        ranks.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)

    @property
    def n_cells(self) -> int:
        return self.ranks.shape[0]

    @property
    def x_size(self) -> int:
        return self.ranks.shape[1]

    def to_json(self) -> str:
        return json.dumps({"cells": self.ranks.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "GuessingFunction":
        return cls(np.asarray(json.loads(text)["cells"]))


@dataclass(frozen=True, eq=False)
class SideInfoFunction:
    """Deterministic side information ``z = table[x, y]`` with ``z < z_size``."""

    table: np.ndarray
    z_size: int

    def __post_init__(self) -> None:
        table = np.asarray(self.table, dtype=np.int64)
        if table.ndim != 2:
            raise ParameterError("side-information table must be indexed (x, y)")
        if self.z_size < 1 or np.any(table < 0) or np.any(table >= self.z_size):
            raise ParameterError(f"side-information values must lie in 0..{self.z_size - 1}")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)


# -- sparse helpers ---------------------------------------------------------
#
# Large extended joints (one cell per (y, m1, m2)) never fit a dense table, so
# the storage scheme works on lists of (x, cell, weight) with positive weight.


def aggregate(xs, cells, w, x_size: int):
    """Merge duplicate ``(x, cell)`` entries and drop zero weights."""
    xs = np.asarray(xs, dtype=np.int64)
    cells = np.asarray(cells, dtype=np.int64)
    w = np.asarray(w, dtype=float)
    keep = w > 0
    key = cells[keep] * x_size + xs[keep]
    uniq, inv = np.unique(key, return_inverse=True)
    merged = np.bincount(inv, weights=w[keep], minlength=uniq.size)
    return uniq % x_size, uniq // x_size, merged


def optimal_ranks(xs, cells, w) -> np.ndarray:
    """Rank of each entry under the optimal guesser of its cell.

    Entries must be unique per ``(x, cell)`` with positive weight; symbols
    absent from a cell are implicitly ranked after all present ones.
    """
    xs = np.asarray(xs)
    cells = np.asarray(cells)
    w = np.asarray(w, dtype=float)
    order = np.lexsort((xs, -w, cells))
    sorted_cells = cells[order]
    starts = np.ones(order.size, dtype=bool)
    starts[1:] = sorted_cells[1:] != sorted_cells[:-1]
    first = np.maximum.accumulate(np.where(starts, np.arange(order.size), 0))
    ranks = np.empty(order.size, dtype=np.int64)
    ranks[order] = np.arange(order.size) - first + 1
    return ranks


def optimal_guesser_for(mass_by_cell: np.ndarray) -> GuessingFunction:
    """Optimal guesser from unnormalized masses ``mass_by_cell[cell, x]``.

    Normalizing a row does not change its order, so posteriors are not formed.
    """
    return GuessingFunction(_ranks_by_mass(np.asarray(mass_by_cell, dtype=float)))


def sparse_min_moment(xs, cells, w, rho: float) -> float:
    _check_rho(rho)
    xs, cells, w = aggregate(xs, cells, w, int(np.max(xs, initial=0)) + 1)
    return float(np.sum(w * optimal_ranks(xs, cells, w).astype(float) ** rho))


def _support(j: JointPMF):
    xs, ys = np.nonzero(j.mass)
    return xs, ys, j.mass[xs, ys]


# -- operations -------------------------------------------------------------


def optimal_guesser(post: CondPMF) -> GuessingFunction:
    """Guess in decreasing posterior order, ties by ascending index."""
    return GuessingFunction(_ranks_by_mass(post.rows))


def _ranks_by_mass(rows: np.ndarray) -> np.ndarray:
    # a stable sort keeps equal masses in index order
    order = np.argsort(-rows, axis=1, kind="stable")
    ranks = np.empty(rows.shape, dtype=np.int64)
    np.put_along_axis(ranks, order, np.arange(1, rows.shape[1] + 1)[None, :], axis=1)
    return ranks


def guess_moment(g: GuessingFunction, j: JointPMF, rho: float) -> float:
    """``E[G(X|Y)**rho]`` for a fixed guessing function."""
    _check_rho(rho)
    if g.ranks.shape != (j.y_size, j.x_size):
        raise ParameterError(
            f"guesser has {g.n_cells} cells over {g.x_size} symbols, "
            f"joint needs {j.y_size} cells over {j.x_size}"
        )
    return float(np.sum(j.mass * g.ranks.T.astype(float) ** rho))


def min_guess_moment(j: JointPMF, rho: float) -> float:
    """Minimum of ``E[G(X|Y)**rho]`` over all guessing functions."""
    return guess_moment(optimal_guesser(posterior_family(j)), j, rho)


def arikan_bounds(j: JointPMF, rho: float) -> tuple[float, float]:
    """Lower and upper bounds on the optimal moment in terms of ``H_{1/(1+rho)}(X|Y)``."""
    h = arimoto_conditional_entropy(j, guessing_order(rho))
    upper = 2.0 ** (rho * h)
    lower = (1.0 + math.log(j.x_size)) ** (-rho) * upper
    return lower, upper


def ceil_rank_moment(j: JointPMF, rho: float, z_size: int) -> float:
    """``E[ceil(G*(X|Y) / z_size)**rho]`` for the optimal guesser ``G*``."""
    _check_rho(rho)
    xs, ys, w = _support(j)
    ranks = optimal_ranks(xs, ys, w)
    return float(np.sum(w * np.ceil(ranks / z_size) ** rho))


def block_side_info(g_star: GuessingFunction, z_size: int) -> SideInfoFunction:
    """``f(x, y) = (rank(x|y) - 1) mod z_size``.

    Within a ceiling block of ``z_size`` consecutive ranks the residues are
    distinct, which is what makes the refined guesser hit ``ceil(rank/z_size)``.
    """
    if z_size < 1:
        raise ParameterError(f"z_size must be positive, got {z_size}")
    return SideInfoFunction(((g_star.ranks - 1) % z_size).T, z_size)


def refine_with_side_info(j: JointPMF, f: SideInfoFunction) -> JointPMF:
    """Joint of ``X`` and ``(Y, Z)`` with ``Z = f(X, Y)``; cell index ``y * |Z| + z``."""
    if f.table.shape != j.mass.shape:
        raise ParameterError("side-information table must match the joint's (x, y) shape")
    z = f.z_size
    mass = np.zeros((j.x_size, j.y_size * z))
    xs, ys = np.indices(j.mass.shape)
    np.add.at(mass, (xs, ys * z + f.table), j.mass)
    return JointPMF(mass)
