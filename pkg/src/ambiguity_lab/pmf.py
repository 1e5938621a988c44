"""Finite joint distributions and Renyi / Arimoto entropies.

All logarithms are base 2 and entropies are reported in bits.  A joint
distribution of a secret ``X`` and side information ``Y`` is stored as a dense
``(x_size, y_size)`` matrix; products of alphabets are flattened with the
first (leftmost) coordinate most significant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError, SizeError

NORM_TOL = 1e-12
DEFAULT_MAX_CONFIGS = 10**6


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"Renyi order must lie in (0, 1), got {alpha!r}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class JointPMF:
    """Joint PMF of ``(X, Y)`` indexed ``mass[x, y]``."""

    mass: np.ndarray

    def __post_init__(self) -> None:
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != 2 or mass.shape[0] < 1 or mass.shape[1] < 1:
            raise ParameterError(f"mass must be a non-empty matrix, got shape {mass.shape}")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise ParameterError("mass entries must be finite and nonnegative")
        total = float(mass.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise ParameterError(f"mass sums to {total!r}, not 1 within {NORM_TOL}")
        object.__setattr__(self, "mass", _frozen(mass))

    @property
    def x_size(self) -> int:
        return self.mass.shape[0]

    @property
    def y_size(self) -> int:
        return self.mass.shape[1]

    def y_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    @classmethod
    def from_dict(cls, d: dict) -> "JointPMF":
        try:
            x_size, y_size = int(d["x_size"]), int(d["y_size"])
            mass = np.asarray(d["mass"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed joint PMF object: {exc}") from exc
        if mass.shape != (x_size, y_size):
            raise ParameterError(
                f"mass has shape {mass.shape}, declared ({x_size}, {y_size})"
            )
        return cls(mass)

    def to_dict(self) -> dict:
        return {"x_size": self.x_size, "y_size": self.y_size, "mass": self.mass.tolist()}

    @classmethod
    def load(cls, path: str | Path) -> "JointPMF":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def dump(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)


@dataclass(frozen=True, eq=False)
class CondPMF:
    """Conditional PMF ``rows[g, t] = P(T = t | G = g)``.

    Rows whose conditioning value has zero probability are flagged in
    ``defined`` and hold zeros.
    """

    rows: np.ndarray
    defined: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        defined = np.asarray(self.defined, dtype=bool)
        if rows.ndim != 2 or defined.shape != (rows.shape[0],):
            raise ParameterError("rows must be a matrix with one defined flag per row")
        if np.any(rows < 0):
            raise ParameterError("conditional probabilities must be nonnegative")
        sums = rows[defined].sum(axis=1)
        if sums.size and np.max(np.abs(sums - 1.0)) > NORM_TOL:
            raise ParameterError("defined rows must sum to 1")
        object.__setattr__(self, "rows", _frozen(rows))
        defined = defined.copy()
        defined.setflags(write=False)
        object.__setattr__(self, "defined", defined)

    @property
    def given_size(self) -> int:
        return self.rows.shape[0]

    @property
    def target_size(self) -> int:
        return self.rows.shape[1]


def renyi_entropy(p, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` in bits, for ``alpha`` in (0, 1)."""
    _check_alpha(alpha)
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > NORM_TOL:
        raise ParameterError("p must be a probability vector")
    s = np.sum(p[p > 0] ** alpha)
    return max(0.0, math.log2(s) / (1.0 - alpha))


def arimoto_conditional_entropy(j: JointPMF, alpha: float) -> float:
    """Arimoto's conditional Renyi entropy ``H_alpha(X|Y)`` in bits.

    ``(alpha / (1 - alpha)) * log2 sum_y (sum_x P(x, y)**alpha)**(1/alpha)``
    """
    _check_alpha(alpha)
    inner = np.sum(j.mass**alpha, axis=0)
    s = float(np.sum(inner ** (1.0 / alpha)))
    h = alpha / (1.0 - alpha) * math.log2(s)
    # rounding can push the value a hair outside [0, log2|X|]
    return min(max(h, 0.0), math.log2(j.x_size))


def guessing_order(rho: float) -> float:
    """Renyi order ``1 / (1 + rho)`` that governs rho-th guessing moments."""
    if rho <= 0:
        raise ParameterError(f"rho must be positive, got {rho!r}")
    return 1.0 / (1.0 + rho)


def posterior_family(j: JointPMF) -> CondPMF:
    """Posterior rows ``P(x | y)``; rows for zero-probability ``y`` are undefined."""
    py = j.y_marginal()
    defined = py > 0
    rows = np.zeros((j.y_size, j.x_size))
    rows[defined] = (j.mass[:, defined] / py[defined]).T
    return CondPMF(rows, defined)


def iid_extension(j: JointPMF, n: int, max_configs: int = DEFAULT_MAX_CONFIGS) -> JointPMF:
    """Joint PMF of ``n`` IID copies; tuples are indexed big-endian."""
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    cells = (j.x_size * j.y_size) ** n
    if cells > max_configs:
        raise SizeError(
            f"iid extension has {cells} cells, exceeding the limit max_configs={max_configs}"
        )
    mass = j.mass
    for _ in range(n - 1):
        mass = np.kron(mass, j.mass)
    # repeated products drift off 1 by a few ulps
    return JointPMF(mass / mass.sum())


def adjoin_uniform(j: JointPMF, c: int) -> JointPMF:
    """Append an independent uniform ``U`` on ``c`` values to the secret.

    The new secret index is ``x * c + u``.
    """
    if c < 1:
        raise ParameterError(f"c must be positive, got {c}")
    return JointPMF(np.repeat(j.mass, c, axis=0) / c)


def ceil_power_bound(xi: float, rho: float) -> float:
    """Right-hand side of ``ceil(xi)**rho < 1 + 2**rho * xi**rho`` (``xi >= 0``)."""
    return 1.0 + 2.0**rho * xi**rho


def random_joint(
    rng: np.random.Generator,
    x_size: int,
    y_size: int,
    zero_prob: float = 0.2,
    ties: bool = False,
) -> JointPMF:
    """Random joint PMF for property tests and benchmarks.

    With ``ties`` the masses are small integers, so equal posteriors are
    common.  ``zero_prob`` zeroes entries at random (at least one survives).
    """
    if ties:
        w = rng.integers(0, 4, size=(x_size, y_size)).astype(float)
    else:
        w = rng.dirichlet(np.ones(x_size * y_size)).reshape(x_size, y_size)
    w[rng.random((x_size, y_size)) < zero_prob] = 0.0
    if w.sum() == 0:
        w[rng.integers(x_size), rng.integers(y_size)] = 1.0
    return JointPMF(w / w.sum())
