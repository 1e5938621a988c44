import math
import warnings

import pytest

from ambiguity_lab import ParameterError, SizeError, iid_extension
from ambiguity_lab.asymptotics import (
    NEG_INF,
    RatePair,
    lower_formula_exponent,
    message_sizes,
    privacy_exponent,
    sweep,
)
from ambiguity_lab.storage import SplitParams, bob_bounds

from conftest import point_mass, uniform


class TestPrivacyExponent:
    def test_first_branch(self):
        assert privacy_exponent(1.0, RatePair(0.6, 0.6), 1.0) == pytest.approx(0.6)

    def test_second_branch(self):
        assert privacy_exponent(1.0, RatePair(0.4, 0.5), 1.0) == NEG_INF

    def test_deterministic_source(self):
        assert privacy_exponent(0.0, RatePair(0.3, 0.0), 2.0) == 0.0

    def test_boundary_marker(self):
        assert math.isnan(privacy_exponent(1.0, RatePair(0.5, 0.5), 1.0))

    def test_errors(self):
        with pytest.raises(ParameterError):
            privacy_exponent(1.0, RatePair(0.6, 0.6), 0.0)
        with pytest.raises(ParameterError):
            RatePair(-0.1, 0.5)


class TestMessageSizes:
    def test_examples(self):
        assert message_sizes(4, RatePair(0.5, 0.5)) == (4, 4)
        assert message_sizes(3, RatePair(0.0, 0.0)) == (1, 1)
        assert message_sizes(5, RatePair(0.7, 0.5))[0] == 12

    def test_overflow(self):
        with pytest.raises(SizeError):
            message_sizes(40, RatePair(1.0, 1.0), max_size=10**6)


class TestSweep:
    def test_deterministic_source(self):
        for row in sweep(point_mass(2), RatePair(0.5, 0.5), 1.0, 4):
            assert row.bob_guess == pytest.approx(1.0)
            assert row.eve_upper_feasible == pytest.approx(1.0)

    def test_rows_and_invariants(self):
        rows = sweep(uniform(2), RatePair(0.6, 0.6), 1.0, 10)
        assert [r.n for r in rows] == list(range(1, 11))
        for r in rows:
            assert r.eve_lower_formula <= r.eve_upper_feasible + 1e-9
            assert math.isfinite(r.exp_lo) and math.isfinite(r.exp_hi)
            assert (r.m1_size, r.m2_size) == message_sizes(r.n, RatePair(0.6, 0.6))
            ach, _ = bob_bounds(SplitParams(r.c_s, r.c_1, r.c_2, r.m1_size, r.m2_size), iid_extension(uniform(2), r.n), 1.0)
            assert r.bob_guess < ach
            expected = lower_formula_exponent(r.entropy, r.c_1, r.c_2, 2**r.n, 1.0, r.n)
            assert r.exp_lo == pytest.approx(expected, abs=1e-9)

    def test_bob_nonincreasing_after_threshold(self):
        rows = sweep(uniform(2), RatePair(0.6, 0.6), 1.0, 10)
        bobs = [r.bob_guess for r in rows]
        assert all(b <= a + 1e-12 for a, b in zip(bobs, bobs[1:]))

    def test_refine_never_worse(self):
        plain = sweep(uniform(2), RatePair(0.6, 0.6), 1.0, 5)
        refined = sweep(uniform(2), RatePair(0.6, 0.6), 1.0, 5, refine=True)
        for a, b in zip(plain, refined):
            assert b.eve_upper_feasible <= a.eve_upper_feasible + 1e-12
            assert b.eve_upper_feasible >= b.eve_lower_formula - 1e-9

    def test_truncation_warns(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rows = sweep(uniform(2), RatePair(0.6, 0.6), 1.0, 8, max_configs=64)
        assert len(rows) == 6
        assert any("truncated after 6" in str(w.message) for w in caught)

    def test_single_row(self):
        assert len(sweep(uniform(2), RatePair(0.6, 0.6), 1.0, 1)) == 1

