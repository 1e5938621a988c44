"""Task encoders, the lists they induce, and conversions between lists and guesses.

A task encoder describes the secret ``X`` (knowing ``Y``) by ``M``; the
receiver must then try every ``x`` whose posterior given ``(y, m)`` is
positive.  Good encoders and good guessers are interchangeable up to factors
of ``|M|``: ``guesser_from_lists`` goes one way, ``encoder_from_guesser``
(a residue step followed by a dyadic-block step) goes the other.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .guessing import GuessingFunction, _check_rho, aggregate
from .pmf import NORM_TOL, JointPMF


@dataclass(frozen=True, eq=False)
class TaskEncoder:
    """``kernel[x, y, m] = P(M = m | X = x, Y = y)``."""

    kernel: np.ndarray

    def __post_init__(self) -> None:
        kernel = np.ascontiguousarray(self.kernel, dtype=float)
        if kernel.ndim != 3:
            raise ParameterError("task-encoder kernel must be indexed (x, y, m)")
        if np.any(kernel < 0) or np.max(np.abs(kernel.sum(axis=2) - 1.0)) > NORM_TOL:
            raise ParameterError("every kernel row must be a probability vector over M")
        kernel.setflags(write=False)
        object.__setattr__(self, "kernel", kernel)

    @property
    def m_size(self) -> int:
        return self.kernel.shape[2]

    def is_deterministic(self) -> bool:
        return bool(np.all((self.kernel == 0.0) | (self.kernel == 1.0)))

    def to_json(self) -> str:
        return json.dumps({"m_size": self.m_size, "kernel": self.kernel.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "TaskEncoder":
        d = json.loads(text)
        enc = cls(np.asarray(d["kernel"], dtype=float))
        if enc.m_size != d["m_size"]:
            raise ParameterError("m_size does not match the kernel's last axis")
        return enc


@dataclass(frozen=True, eq=False)
class ListFamily:
    """``members[y, m, x]`` is True iff ``x`` belongs to the list for ``(y, m)``."""

    members: np.ndarray

    def sizes(self) -> np.ndarray:
        return self.members.sum(axis=2)


def _check_shapes(enc: TaskEncoder, j: JointPMF) -> None:
    if enc.kernel.shape[:2] != j.mass.shape:
        raise ParameterError(
            f"encoder is over (x, y) = {enc.kernel.shape[:2]}, joint is {j.mass.shape}"
        )


def lists_of(enc: TaskEncoder, j: JointPMF) -> ListFamily:
    _check_shapes(enc, j)
    joint = j.mass[:, :, None] * enc.kernel
    return ListFamily(np.transpose(joint > 0, (1, 2, 0)))


def list_moment(enc: TaskEncoder, j: JointPMF, rho: float) -> float:
    """``E[|L^Y_M|**rho]`` under the joint law of ``(X, Y, M)``."""
    _check_rho(rho)
    sizes = lists_of(enc, j).sizes().astype(float)
    joint = j.mass[:, :, None] * enc.kernel
    return float(np.sum(joint * (sizes**rho)[None, :, :]))


def sparse_list_moment(xs, cells, w, rho: float) -> float:
    """List moment when ``(x, cell, weight)`` entries list the joint's support."""
    _check_rho(rho)
    xs, cells, w = aggregate(xs, cells, w, int(np.max(xs, initial=0)) + 1)
    _, inv, counts = np.unique(cells, return_inverse=True, return_counts=True)
    return float(np.sum(w * counts[inv].astype(float) ** rho))


def guesser_from_lists(enc: TaskEncoder, j: JointPMF) -> GuessingFunction:
    """Guess list by list, smallest list first.

    List-size ties go to the smaller ``m``; inside a list, and for symbols in
    no list, ascending index.
    """
    family = lists_of(enc, j)
    sizes = family.sizes()
    ranks = np.zeros((j.y_size, j.x_size), dtype=np.int64)
    for y in range(j.y_size):
        guessed = np.zeros(j.x_size, dtype=bool)
        nxt = 1
        for m in np.lexsort((np.arange(enc.m_size), sizes[y])):
            if sizes[y, m] == 0:
                continue
            for x in np.flatnonzero(family.members[y, m] & ~guessed):
                ranks[y, x] = nxt
                nxt += 1
                guessed[x] = True
        for x in np.flatnonzero(~guessed):
            ranks[y, x] = nxt
            nxt += 1
    return GuessingFunction(ranks)


def fact1_block(k: int) -> int:
    """``floor(log2 k)``; each such dyadic block holds at most ``k`` integers up to ``k``."""
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    return int(k).bit_length() - 1


def _floor_log2(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    s = np.floor(np.log2(a)).astype(np.int64)
    s -= (np.left_shift(1, s) > a).astype(np.int64)
    s += (np.left_shift(1, s + 1) <= a).astype(np.int64)
    return s


def s_alphabet_size(x_size: int, v: int) -> int:
    return fact1_block(-(-x_size // v)) + 1


def step_codes(ranks, v: int, x_size: int) -> np.ndarray:
    """Description index ``z * |S| + s`` for guessing ranks.

    ``z = (rank - 1) mod v`` is the residue step; the refined rank given ``z``
    is ``ceil(rank / v)`` and ``s`` is its dyadic block ``floor(log2 .)``.
    """
    ranks = np.asarray(ranks, dtype=np.int64)
    z = (ranks - 1) % v
    refined = (ranks - 1) // v + 1
    return z * s_alphabet_size(x_size, v) + _floor_log2(refined)


def required_m_size(x_size: int, v: int) -> int:
    return v * s_alphabet_size(x_size, v)


def encoder_from_guesser(
    g: GuessingFunction, j: JointPMF, v: int, m_size: int
) -> TaskEncoder:
    """Deterministic encoder whose lists obey ``|L| <= ceil(G/v)`` pointwise.

    Codewords beyond ``v * |S|`` are never used.
    """
    x_size = j.x_size
    if g.ranks.shape != (j.y_size, x_size):
        raise ParameterError("guesser cells must match the joint's y alphabet")
    if not 1 <= v <= x_size:
        raise ParameterError(f"v must lie in 1..{x_size}, got {v}")
    need = required_m_size(x_size, v)
    if m_size < need:
        raise ParameterError(
            f"|M| = {m_size} is below v * (floor(log2 ceil(|X|/v)) + 1) = {need}"
        )
    codes = step_codes(g.ranks.T, v, x_size)  # (x, y)
    kernel = np.zeros((x_size, j.y_size, m_size))
    xs, ys = np.indices(codes.shape)
    kernel[xs, ys, codes] = 1.0
    return TaskEncoder(kernel)


def best_v(m_size: int, x_size: int) -> int:
    """``floor(|M| / (floor(log2 |X|) + 1))`` clamped to ``[1, |X|]``."""
    base = fact1_block(x_size) + 1
    if m_size < base:
        raise ParameterError(
            f"|M| = {m_size} is below floor(log2 |X|) + 1 = {base}; no valid v exists"
        )
    return min(max(1, m_size // base), x_size)


def list_to_guess_bound(list_moment_value: float, m_size: int, rho: float) -> float:
    """``|M|**rho * E[|L|**rho]``, an upper bound on the induced guesser's moment."""
    return m_size**rho * list_moment_value


def guess_to_best_list_bound(guess_moment_value: float, m_size: int, x_size: int, rho: float) -> float:
    """``1 + 2**rho * E[G**rho] * (|M| / (log2|X| + 1) - 1)**(-rho)``.

    Infinite when ``|M| <= log2|X| + 1`` and the bound says nothing.
    """
    base = m_size / (math.log2(x_size) + 1.0) - 1.0
    if base <= 0:
        return math.inf
    return 1.0 + 2.0**rho * guess_moment_value * base ** (-rho)
