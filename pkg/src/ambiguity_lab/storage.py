"""Two-hint storage encoder, exact ambiguities and the finite-blocklength bounds.

Alice first maps ``(x, y)`` to a label ``z`` with ``c_s * c_1 * c_2`` values,
split mixed-radix as ``z = v_s + c_s * (v_1 + c_1 * v_2)``.  The part ``v_s``
is masked by an independent uniform ``u`` (addition mod ``c_s``), and the
hints are::

    m1 = ((v_s + u) mod c_s) * c_1 + v_1
    m2 = u * c_2 + v_2

so either hint alone says nothing about ``v_s`` while both together reveal
``z``.  Bob conditions on ``(y, m1, m2)``; Eve gets whichever single hint a
genie picks after seeing ``x``.

Hint encoders are stored sparsely because ``|M1| * |M2| * |X|`` outgrows
memory long before the support does (each ``(x, y)`` emits ``c_s`` pairs).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ParameterError
from .guessing import (
    GuessingFunction,
    SideInfoFunction,
    _check_rho,
    aggregate,
    block_side_info,
    optimal_guesser_for,
    optimal_ranks,
    sparse_min_moment,
)
from .pmf import NORM_TOL, JointPMF, arimoto_conditional_entropy, guessing_order
from .task_encoding import best_v, fact1_block, sparse_list_moment, step_codes

GUESSING = "guessing"
LIST = "list"
VERSIONS = (GUESSING, LIST)
CHECK_TOL = 1e-9


@dataclass(frozen=True)
class SplitParams:
    c_s: int
    c_1: int
    c_2: int
    m1_size: int
    m2_size: int
    version: str = GUESSING
    relabeled: bool = False  # True when choose_split swapped the hints internally

    @property
    def product(self) -> int:
        return self.c_s * self.c_1 * self.c_2


@dataclass(frozen=True)
class EncoderStructure:
    """How a built encoder was assembled; enough to locate the pad component."""

    params: SplitParams
    labels: tuple[tuple[int, ...], ...]  # z per (x, y) before splitting
    layout: str = "z = v_s + c_s*(v_1 + c_1*v_2); m1 = pad*c_1 + v_1; m2 = u*c_2 + v_2"
    list_hint_size: int = 1  # > 1 after augment_with_list_hint: m1' = m1 * size + m


@dataclass(frozen=True, eq=False)
class HintEncoder:
    """Sparse kernel ``P(M1 = m1, M2 = m2 | X = x, Y = y)``.

    Entries are unique, positive and sorted by ``(x, y, m1, m2)``.
    """

    x_size: int
    y_size: int
    m1_size: int
    m2_size: int
    xs: np.ndarray
    ys: np.ndarray
    m1s: np.ndarray
    m2s: np.ndarray
    probs: np.ndarray
    structure: EncoderStructure | None = field(default=None)

    def __post_init__(self) -> None:
        arrays = [np.asarray(a, dtype=np.int64) for a in (self.xs, self.ys, self.m1s, self.m2s)]
        probs = np.asarray(self.probs, dtype=float)
        xs, ys, m1s, m2s = arrays
        for name, a, hi in (("x", xs, self.x_size), ("y", ys, self.y_size),
                            ("m1", m1s, self.m1_size), ("m2", m2s, self.m2_size)):
            if a.shape != probs.shape or np.any(a < 0) or np.any(a >= hi):
                raise ParameterError(f"{name} indices out of range 0..{hi - 1}")
        if np.any(probs < 0):
            raise ParameterError("kernel probabilities must be nonnegative")
        key = ((xs * self.y_size + ys) * self.m1_size + m1s) * self.m2_size + m2s
        uniq, inv = np.unique(key[probs > 0], return_inverse=True)
        merged = np.bincount(inv, weights=probs[probs > 0], minlength=uniq.size)
        row_sums = np.bincount(uniq // (self.m1_size * self.m2_size), weights=merged,
                               minlength=self.x_size * self.y_size)
        if np.max(np.abs(row_sums - 1.0)) > NORM_TOL:
            raise ParameterError("every (x, y) row of the hint kernel must sum to 1")
        m2s = uniq % self.m2_size
        rest = uniq // self.m2_size
        m1s = rest % self.m1_size
        rest //= self.m1_size
        for name, a in (("xs", rest // self.y_size), ("ys", rest % self.y_size),
                        ("m1s", m1s), ("m2s", m2s), ("probs", merged)):
            a = np.ascontiguousarray(a)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def from_dense(cls, kernel, structure: EncoderStructure | None = None) -> "HintEncoder":
        kernel = np.asarray(kernel, dtype=float)
        if kernel.ndim != 4:
            raise ParameterError("dense hint kernel must be indexed (x, y, m1, m2)")
        idx = np.nonzero(kernel)
        return cls(*kernel.shape, *idx, kernel[idx], structure=structure)

    def dense(self) -> np.ndarray:
        k = np.zeros((self.x_size, self.y_size, self.m1_size, self.m2_size))
        k[self.xs, self.ys, self.m1s, self.m2s] = self.probs
        return k

    def to_json(self) -> str:
        d = {
            "x_size": self.x_size, "y_size": self.y_size,
            "m1_size": self.m1_size, "m2_size": self.m2_size,
            "kernel": self.dense().tolist(),
            "structure": None if self.structure is None else asdict(self.structure),
        }
        return json.dumps(d)

    @classmethod
    def from_json(cls, text: str) -> "HintEncoder":
        d = json.loads(text)
        s = d.get("structure")
        structure = None
        if s is not None:
            structure = EncoderStructure(
                params=SplitParams(**s["params"]),
                labels=tuple(tuple(r) for r in s["labels"]),
                layout=s["layout"],
                list_hint_size=s["list_hint_size"],
            )
        enc = cls.from_dense(d["kernel"], structure)
        if (enc.m1_size, enc.m2_size) != (d["m1_size"], d["m2_size"]):
            raise ParameterError("declared hint alphabet sizes do not match the kernel")
        return enc


@dataclass
class AmbiguityReport:
    bob_guess: float
    bob_list: float
    eve_exact: float | None
    eve_upper_feasible: float
    eve_lower_formula: float
    bound_values: dict[str, float]
    checks: dict[str, bool] = field(default_factory=dict)
    monitors: dict[str, bool] = field(default_factory=dict)


# -- parameters -------------------------------------------------------------


def validate_params(p: SplitParams, x_size: int) -> list[str]:
    """Names of the violated admissibility conditions; empty when admissible."""
    out = []
    for name in ("c_s", "c_1", "c_2", "m1_size", "m2_size"):
        if getattr(p, name) < 1:
            out.append(f"{name} >= 1")
    if out:
        return out
    if p.version not in VERSIONS:
        return [f"version in {VERSIONS}"]
    if p.c_s > min(p.m1_size, p.m2_size):
        out.append(f"c_s <= min(|M1|, |M2|): {p.c_s} > {min(p.m1_size, p.m2_size)}")
    if p.c_1 > p.m1_size // p.c_s:
        out.append(f"c_1 <= floor(|M1| / c_s): {p.c_1} > {p.m1_size // p.c_s}")
    if p.c_2 > p.m2_size // p.c_s:
        out.append(f"c_2 <= floor(|M2| / c_s): {p.c_2} > {p.m2_size // p.c_s}")
    if p.version == LIST:
        limit = math.log2(x_size) + 2
        if not p.product > limit:
            out.append(f"c_s*c_1*c_2 > log2|X| + 2: {p.product} <= {limit:g}")
        if not p.m1_size * p.m2_size > limit:
            out.append(f"|M1|*|M2| > log2|X| + 2: {p.m1_size * p.m2_size} <= {limit:g}")
    return out


def _require_valid(p: SplitParams, x_size: int, version: str) -> None:
    if p.version != version:
        raise ParameterError(f"split parameters are for the {p.version} version, not {version}")
    bad = validate_params(p, x_size)
    if bad:
        raise ParameterError("invalid split parameters: " + "; ".join(bad))


def choose_split(m1_size: int, m2_size: int, j: JointPMF, rho: float,
                 version: str = GUESSING) -> SplitParams:
    """Pick ``(c_s, c_1, c_2)`` so Bob is near 1 and Eve is as large as allowed.

    Hints are relabeled so ``|M2| <= |M1|``.  If ``|M2| > 2**H`` the whole
    small hint is pad.  Otherwise the product ``c_s*c_1*c_2`` is pushed to the
    target ``min(|M1||M2|, ceil(2**H))`` while ``c_1 + c_2`` (what leaks to a
    single hint) is kept smallest; ties favour a larger pad.
    """
    h = arimoto_conditional_entropy(j, guessing_order(rho))
    relabeled = m2_size > m1_size
    big, small = (m2_size, m1_size) if relabeled else (m1_size, m2_size)
    two_h = 2.0**h
    if small > two_h * (1 + 1e-12):
        c_s, c_big, c_small = small, 1, 1
    else:
        target = min(big * small, math.ceil(two_h - 1e-9))
        best = None
        for cs in range(1, small + 1):
            cb_max, csm = big // cs, small // cs
            cb = min(cb_max, -(-target // (cs * csm)))
            if cs * cb * csm < target:
                continue
            key = (cb + csm, -cs)
            if best is None or key < best[0]:
                best = (key, cs, cb, csm)
        _, c_s, c_big, c_small = best
    c_1, c_2 = (c_small, c_big) if relabeled else (c_big, c_small)
    return SplitParams(c_s, c_1, c_2, m1_size, m2_size, version, relabeled)


# -- construction -----------------------------------------------------------


def _encoder_from_labels(labels: np.ndarray, j: JointPMF, p: SplitParams) -> HintEncoder:
    c_s, c_1, c_2 = p.c_s, p.c_1, p.c_2
    v_s = labels % c_s
    v_1 = (labels // c_s) % c_1
    v_2 = labels // (c_s * c_1)
    xs, ys = np.indices(labels.shape)
    u = np.arange(c_s)
    shape = labels.shape + (c_s,)
    m1 = ((v_s[..., None] + u) % c_s) * c_1 + v_1[..., None]
    m2 = u * c_2 + v_2[..., None]
    structure = EncoderStructure(p, tuple(tuple(int(v) for v in row) for row in labels))
    return HintEncoder(
        j.x_size, j.y_size, p.m1_size, p.m2_size,
        np.broadcast_to(xs[..., None], shape).ravel(),
        np.broadcast_to(ys[..., None], shape).ravel(),
        m1.ravel(), np.broadcast_to(m2, shape).ravel(),
        np.full(labels.size * c_s, 1.0 / c_s),
        structure=structure,
    )


def _optimal_source_guesser(j: JointPMF) -> GuessingFunction:
    return optimal_guesser_for(j.mass.T)


def build_guess_encoder(j: JointPMF, p: SplitParams, seed: int = 0) -> HintEncoder:
    """Guessing-version encoder: ``z`` is the residue of Bob's rank mod ``c_s*c_1*c_2``.

    Construction is deterministic; ``seed`` is accepted for interface symmetry.
    """
    _require_valid(p, j.x_size, GUESSING)
    f = block_side_info(_optimal_source_guesser(j), p.product)
    return _encoder_from_labels(f.table, j, p)


def build_list_encoder(j: JointPMF, p: SplitParams, seed: int = 0) -> HintEncoder:
    """List-version encoder: ``z`` is the residue/dyadic-block task description."""
    _require_valid(p, j.x_size, LIST)
    v = best_v(p.product, j.x_size)
    g = _optimal_source_guesser(j)
    labels = step_codes(g.ranks.T, v, j.x_size)
    return _encoder_from_labels(labels, j, p)


def build_encoder(j: JointPMF, p: SplitParams, seed: int = 0) -> HintEncoder:
    return (build_guess_encoder if p.version == GUESSING else build_list_encoder)(j, p, seed)


# -- ambiguities ------------------------------------------------------------


def _weights(enc: HintEncoder, j: JointPMF) -> np.ndarray:
    if (enc.x_size, enc.y_size) != j.mass.shape:
        raise ParameterError(
            f"encoder is over (x, y) = {(enc.x_size, enc.y_size)}, joint is {j.mass.shape}"
        )
    return j.mass[enc.xs, enc.ys] * enc.probs


def bob_cells(enc: HintEncoder) -> np.ndarray:
    return (enc.ys * enc.m1_size + enc.m1s) * enc.m2_size + enc.m2s


def eve_cells(enc: HintEncoder) -> tuple[np.ndarray, np.ndarray]:
    return enc.ys * enc.m1_size + enc.m1s, enc.ys * enc.m2_size + enc.m2s


def bob_guess_ambiguity(enc: HintEncoder, j: JointPMF, rho: float) -> float:
    """``min_G E[G(X | Y, M1, M2)**rho]``."""
    return sparse_min_moment(enc.xs, bob_cells(enc), _weights(enc, j), rho)


def bob_list_ambiguity(enc: HintEncoder, j: JointPMF, rho: float) -> float:
    """``E[|L^Y_{M1,M2}|**rho]`` with positive-posterior lists."""
    return sparse_list_moment(enc.xs, bob_cells(enc), _weights(enc, j), rho)


def single_hint_masses(enc: HintEncoder, j: JointPMF) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``mass[cell, x]`` for Eve's two views ``(y, m1)`` and ``(y, m2)``."""
    w = _weights(enc, j)
    c1, c2 = eve_cells(enc)
    mass1 = np.zeros((enc.y_size * enc.m1_size, enc.x_size))
    mass2 = np.zeros((enc.y_size * enc.m2_size, enc.x_size))
    np.add.at(mass1, (c1, enc.xs), w)
    np.add.at(mass2, (c2, enc.xs), w)
    return mass1, mass2


def per_hint_optimal_guessers(enc: HintEncoder, j: JointPMF) -> tuple[GuessingFunction, GuessingFunction]:
    mass1, mass2 = single_hint_masses(enc, j)
    return optimal_guesser_for(mass1), optimal_guesser_for(mass2)


def single_hint_min_moments(enc: HintEncoder, j: JointPMF, rho: float) -> tuple[float, float]:
    """Eve's optimal moment when she is always shown ``M1`` (resp. ``M2``)."""
    w = _weights(enc, j)
    c1, c2 = eve_cells(enc)
    return (sparse_min_moment(enc.xs, c1, w, rho), sparse_min_moment(enc.xs, c2, w, rho))


def eve_pair_ambiguity(enc: HintEncoder, j: JointPMF, rho: float,
                       g1: GuessingFunction, g2: GuessingFunction) -> float:
    """``E[min(G1(X|Y,M1), G2(X|Y,M2))**rho]`` for a fixed strategy pair."""
    _check_rho(rho)
    if g1.ranks.shape != (enc.y_size * enc.m1_size, enc.x_size):
        raise ParameterError("g1 must have one cell per (y, m1)")
    if g2.ranks.shape != (enc.y_size * enc.m2_size, enc.x_size):
        raise ParameterError("g2 must have one cell per (y, m2)")
    c1, c2 = eve_cells(enc)
    r = np.minimum(g1.ranks[c1, enc.xs], g2.ranks[c2, enc.xs])
    return float(np.sum(_weights(enc, j) * r.astype(float) ** rho))


def _best_response(xs, own, other_ranks, w, n_cells: int, x_size: int, rho: float,
                   base: np.ndarray) -> np.ndarray:
    # cost[c, x, k-1] = sum of w * min(k, other rank)**rho over entries in cell c
    k = np.arange(1, x_size + 1)
    contrib = w[:, None] * np.minimum(k[None, :], other_ranks[:, None]).astype(float) ** rho
    cost = np.zeros((n_cells, x_size, x_size))
    np.add.at(cost, (own, xs), contrib)
    ranks = base.copy()
    for c in np.unique(own):
        rows, cols = linear_sum_assignment(cost[c])
        ranks[c, rows] = cols + 1
    return ranks


def eve_alternating_search(enc: HintEncoder, j: JointPMF, rho: float, restarts: int = 4,
                           seed: int = 0, max_rounds: int = 100):
    """Alternating best responses for Eve's two guessers.

    Restart 0 starts from the per-hint optimal ``g2``; later restarts from
    random permutations seeded by ``(seed, restart)``.  Returns
    ``(value, g1, g2)`` for the best pair found; the value is an upper bound
    on Eve's genie-aided ambiguity.
    """
    _check_rho(rho)
    if restarts < 1:
        raise ParameterError("restarts must be at least 1")
    w_raw = _weights(enc, j)
    c1_raw, c2_raw = eve_cells(enc)
    n1, n2, X = enc.y_size * enc.m1_size, enc.y_size * enc.m2_size, enc.x_size
    # merge entries sharing (x, c1, c2)
    key = (c1_raw * n2 + c2_raw) * X + enc.xs
    keep = w_raw > 0
    uniq, inv = np.unique(key[keep], return_inverse=True)
    w = np.bincount(inv, weights=w_raw[keep], minlength=uniq.size)
    xs, c1, c2 = uniq % X, (uniq // X) // n2, (uniq // X) % n2

    def value(r1, r2):
        return float(np.sum(w * np.minimum(r1[c1, xs], r2[c2, xs]).astype(float) ** rho))

    g1_opt, g2_opt = per_hint_optimal_guessers(enc, j)
    best = (value(g1_opt.ranks, g2_opt.ranks), g1_opt.ranks, g2_opt.ranks)
    ident1 = np.tile(np.arange(1, X + 1), (n1, 1))
    for r in range(restarts):
        if r == 0:
            r2 = np.array(g2_opt.ranks)
        else:
            rng = np.random.default_rng([seed, r])
            r2 = np.argsort(rng.random((n2, X)), axis=1) + 1
        r1 = ident1
        current = math.inf
        for _ in range(max_rounds):
            r1 = _best_response(xs, c1, r2[c2, xs], w, n1, X, rho, ident1)
            r2 = _best_response(xs, c2, r1[c1, xs], w, n2, X, rho, r2)
            v = value(r1, r2)
            if not v < current - 1e-15:
                break
            current = v
        v = value(r1, r2)
        if v < best[0]:
            best = (v, r1, r2)
    return best[0], GuessingFunction(best[1]), GuessingFunction(best[2])


def eve_ambiguity_alternating(enc: HintEncoder, j: JointPMF, rho: float,
                              restarts: int = 4, seed: int = 0) -> float:
    return eve_alternating_search(enc, j, rho, restarts, seed)[0]


# -- bound formulas ---------------------------------------------------------


def _entropy(j: JointPMF, rho: float) -> float:
    _check_rho(rho)
    return arimoto_conditional_entropy(j, guessing_order(rho))


def eve_bounds(p: SplitParams, j: JointPMF, rho: float, bob_value: float,
               version: str = GUESSING) -> tuple[float, float]:
    """Eve's lower bound for the built encoder and the universal upper bound.

    ``bob_value`` must be Bob's ambiguity in the same ``version``.
    """
    h = _entropy(j, rho)
    lower = (1.0 + math.log(j.x_size)) ** (-rho) * 2.0 ** (rho * (h - math.log2(p.c_1 + p.c_2)))
    upper = min(min(p.m1_size, p.m2_size) ** rho * bob_value, 2.0 ** (rho * h))
    return lower, upper


def bob_bounds(p: SplitParams, j: JointPMF, rho: float,
               version: str | None = None) -> tuple[float, float]:
    """``(achievability_rhs, converse_rhs)`` for Bob in the given version."""
    version = version or p.version
    _require_valid(replace(p, version=version), j.x_size, version)
    h = _entropy(j, rho)
    log_m = math.log2(p.m1_size * p.m2_size)
    if version == GUESSING:
        ach = 1.0 + 2.0 ** (rho * (h - math.log2(p.product) + 1.0))
        conv = max((1.0 + math.log(j.x_size)) ** (-rho) * 2.0 ** (rho * (h - log_m)), 1.0)
    else:
        slack = p.product - math.log2(j.x_size) - 2.0
        ach = 1.0 + 2.0 ** (rho * (h - math.log2(slack) + 2.0))
        conv = max(2.0 ** (rho * (h - log_m)), 1.0)
    return ach, conv


def converse_bounds(j: JointPMF, m1_size: int, m2_size: int, rho: float) -> dict[str, float]:
    """Converse right-hand sides that hold for every hint encoder of these sizes."""
    h = _entropy(j, rho)
    log_m = math.log2(m1_size * m2_size)
    return {
        "bob_guess": max((1.0 + math.log(j.x_size)) ** (-rho) * 2.0 ** (rho * (h - log_m)), 1.0),
        "bob_list": max(2.0 ** (rho * (h - log_m)), 1.0),
        "eve_cap": 2.0 ** (rho * h),
    }


# -- structure checks and augmentation --------------------------------------


def pad_total_variation(enc: HintEncoder) -> float:
    """Max over ``(x, y)`` of the TV distance between the padded part of ``m1`` and uniform."""
    if enc.structure is None:
        raise ParameterError("encoder carries no construction record")
    s = enc.structure
    c_s, c_1 = s.params.c_s, s.params.c_1
    padded = (enc.m1s // s.list_hint_size) // c_1
    row = enc.xs * enc.y_size + enc.ys
    dist = np.bincount(row * c_s + padded, weights=enc.probs,
                       minlength=enc.x_size * enc.y_size * c_s).reshape(-1, c_s)
    return float(np.max(0.5 * np.abs(dist - 1.0 / c_s).sum(axis=1)))


def augment_with_list_hint(enc: HintEncoder, j: JointPMF) -> HintEncoder:
    """Append to ``M1`` the dyadic block of Bob's optimal rank given ``(Y, M1, M2)``.

    The extra hint takes ``floor(log2|X|) + 1`` values, and Bob's list moment
    with the augmented hints is at most his original guessing moment.
    """
    k = fact1_block(enc.x_size) + 1
    w = _weights(enc, j)
    cells = bob_cells(enc)
    codes = np.zeros(enc.probs.size, dtype=np.int64)
    pos = w > 0
    # entries are unique per (x, y, m1, m2), hence per (x, Bob cell)
    ranks = optimal_ranks(enc.xs[pos], cells[pos], w[pos])
    codes[pos] = step_codes(ranks, 1, enc.x_size)
    structure = None
    if enc.structure is not None:
        structure = replace(enc.structure, list_hint_size=enc.structure.list_hint_size * k)
    return HintEncoder(enc.x_size, enc.y_size, enc.m1_size * k, enc.m2_size,
                       enc.xs, enc.ys, enc.m1s * k + codes, enc.m2s, enc.probs,
                       structure=structure)


# -- end-to-end evaluation --------------------------------------------------

EVE_MODES = ("formula", "heuristic", "exact")


def evaluate(j: JointPMF, p: SplitParams, rho: float, eve_mode: str = "heuristic",
             restarts: int = 4, seed: int = 0, budget=None) -> AmbiguityReport:
    """Build the encoder for ``p.version`` and check every bound on it.

    ``eve_mode`` selects Eve's value: the universal upper formula only
    (``formula``), alternating minimization (``heuristic``), or exhaustive
    search (``exact``, may raise ``SizeError``).
    """
    if eve_mode not in EVE_MODES:
        raise ParameterError(f"eve_mode must be one of {EVE_MODES}")
    enc = build_encoder(j, p, seed)
    bob_g = bob_guess_ambiguity(enc, j, rho)
    bob_l = bob_list_ambiguity(enc, j, rho)
    bob = bob_g if p.version == GUESSING else bob_l
    ach, conv = bob_bounds(p, j, rho)
    eve_lo, eve_up = eve_bounds(p, j, rho, bob, p.version)
    eve_exact = None
    if eve_mode == "formula":
        eve_hi = eve_up
    else:
        eve_hi = eve_ambiguity_alternating(enc, j, rho, restarts, seed)
        if eve_mode == "exact":
            from .oracles import Budget, brute_eve

            eve_exact = brute_eve(enc, j, rho, budget or Budget())
    report = AmbiguityReport(
        bob_guess=bob_g, bob_list=bob_l, eve_exact=eve_exact,
        eve_upper_feasible=eve_hi, eve_lower_formula=eve_lo,
        bound_values={"bob_achievability": ach, "bob_converse": conv,
                      "eve_lower": eve_lo, "eve_upper": eve_up},
    )
    eve_val = eve_exact if eve_exact is not None else eve_hi
    report.checks["bob_converse"] = bob >= conv - CHECK_TOL
    report.checks["eve_lower"] = eve_val >= eve_lo - CHECK_TOL
    report.checks["eve_upper"] = eve_val <= eve_up + CHECK_TOL
    if p.version == GUESSING:
        report.checks["bob_achievability"] = bob < ach
    else:
        # only shown to hold for a different list encoder; recorded, not required
        report.monitors["bob_achievability"] = bob < ach
    return report
