"""Privacy exponent and finite-n sweeps for IID sources.

Only memoryless sources are handled: the n-letter source is the IID extension
of a per-letter joint PMF, whose conditional Renyi entropy is exactly ``n``
times the per-letter value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import ParameterError, SizeError
from .guessing import _check_rho
from .pmf import DEFAULT_MAX_CONFIGS, JointPMF, arimoto_conditional_entropy, guessing_order, iid_extension
from .storage import (
    bob_guess_ambiguity,
    bob_list_ambiguity,
    build_guess_encoder,
    choose_split,
    eve_ambiguity_alternating,
    eve_bounds,
    eve_pair_ambiguity,
    per_hint_optimal_guessers,
)

NEG_INF = -math.inf
BOUNDARY = math.nan  # sum rate exactly at the entropy rate: no exponent is claimed


@dataclass(frozen=True)
class RatePair:
    r1: float
    r2: float

    def __post_init__(self) -> None:
        if self.r1 < 0 or self.r2 < 0:
            raise ParameterError("rates must be nonnegative")


@dataclass(frozen=True)
class SweepRow:
    n: int
    m1_size: int
    m2_size: int
    c_s: int
    c_1: int
    c_2: int
    entropy: float  # H_{1/(1+rho)}(X^n | Y^n) in bits
    bob_guess: float
    bob_list: float
    eve_lower_formula: float
    eve_upper_feasible: float
    exp_lo: float
    exp_hi: float
    exponent_target: float


def privacy_exponent(h_rate: float, rates: RatePair, rho: float) -> float:
    """``rho * min(R1, R2, H)`` above the sum-rate threshold, ``-inf`` below.

    Returns ``BOUNDARY`` (NaN) when ``R1 + R2`` equals the entropy rate.
    """
    _check_rho(rho)
    if h_rate < 0:
        raise ParameterError("entropy rate must be nonnegative")
    total = rates.r1 + rates.r2
    if math.isclose(total, h_rate, rel_tol=1e-12, abs_tol=1e-12):
        return BOUNDARY
    if total > h_rate:
        return rho * min(rates.r1, rates.r2, h_rate)
    return NEG_INF


def message_size(n: int, rate: float, max_size: int = DEFAULT_MAX_CONFIGS) -> int:
    # n * rate is rounded first so integral exponents are not pushed up by one ulp
    exponent = round(n * rate, 9)
    size = max(1, math.ceil(2.0**exponent - 1e-9))
    if size > max_size:
        raise SizeError(f"message alphabet 2^{exponent:g} exceeds the limit {max_size}")
    return size


def message_sizes(n: int, rates: RatePair, max_size: int = DEFAULT_MAX_CONFIGS) -> tuple[int, int]:
    """``(ceil(2**(n R1)), ceil(2**(n R2)))``, each at least 1."""
    if n < 1:
        raise ParameterError("n must be positive")
    return message_size(n, rates.r1, max_size), message_size(n, rates.r2, max_size)


def lower_formula_exponent(h_n: float, c_1: int, c_2: int, x_size: int, rho: float, n: int) -> float:
    """``log2`` of Eve's lower-bound formula divided by ``n``, in closed form."""
    return rho * (h_n - math.log2(c_1 + c_2) - math.log2(1.0 + math.log(x_size))) / n


def sweep(per_letter: JointPMF, rates: RatePair, rho: float, n_max: int, seed: int = 0,
          refine: bool = False, restarts: int = 2,
          max_configs: int = DEFAULT_MAX_CONFIGS) -> list[SweepRow]:
    """One row per blocklength ``n = 1..n_max``.

    Each row extends the source, picks a split, builds the guessing-version
    encoder and evaluates Bob exactly.  Eve gets the sandwich: the lower-bound
    formula and the value of the per-hint optimal strategy pair (improved by
    alternating minimization when ``refine``).  Rows stop early, with a
    warning, once the extension or the hint alphabets exceed ``max_configs``.
    """
    _check_rho(rho)
    if n_max < 1:
        raise ParameterError("n_max must be positive")
    h_rate = arimoto_conditional_entropy(per_letter, guessing_order(rho))
    target = privacy_exponent(h_rate, rates, rho)
    rows = []
    for n in range(1, n_max + 1):
        try:
            jn = iid_extension(per_letter, n, max_configs)
            m1, m2 = message_sizes(n, rates, max_configs)
        except SizeError as exc:
            warnings.warn(f"sweep truncated after {len(rows)} of {n_max} rows: {exc}")
            break
        h_n = arimoto_conditional_entropy(jn, guessing_order(rho))
        p = choose_split(m1, m2, jn, rho)
        enc = build_guess_encoder(jn, p, seed)
        bob_g = bob_guess_ambiguity(enc, jn, rho)
        bob_l = bob_list_ambiguity(enc, jn, rho)
        eve_lo, _ = eve_bounds(p, jn, rho, bob_g)
        g1, g2 = per_hint_optimal_guessers(enc, jn)
        eve_hi = eve_pair_ambiguity(enc, jn, rho, g1, g2)
        if refine:
            eve_hi = min(eve_hi, eve_ambiguity_alternating(enc, jn, rho, restarts, seed))
        rows.append(SweepRow(
            n=n, m1_size=m1, m2_size=m2, c_s=p.c_s, c_1=p.c_1, c_2=p.c_2, entropy=h_n,
            bob_guess=bob_g, bob_list=bob_l,
            eve_lower_formula=eve_lo, eve_upper_feasible=eve_hi,
            exp_lo=math.log2(eve_lo) / n, exp_hi=math.log2(eve_hi) / n,
            exponent_target=target,
        ))
    return rows
