import json
import math

import numpy as np
import pytest

from ambiguity_lab import (
    JointPMF,
    ParameterError,
    SizeError,
    adjoin_uniform,
    arimoto_conditional_entropy,
    iid_extension,
    posterior_family,
    renyi_entropy,
)
from ambiguity_lab.pmf import ceil_power_bound, random_joint

from conftest import column, point_mass, uniform


def hand_renyi(p, alpha):
    return math.log2(sum(q**alpha for q in p if q > 0)) / (1 - alpha)


class TestRenyi:
    def test_uniform4(self):
        assert renyi_entropy([0.25] * 4, 0.5) == pytest.approx(2.0, abs=1e-12)

    def test_point_mass(self):
        assert renyi_entropy([1.0, 0.0, 0.0], 0.5) == 0.0

    def test_skewed_matches_hand_sum(self):
        # 2*log2(sqrt(.5) + .5 + .5) evaluates to 1.543107, see decisions ledger
        p = [0.5, 0.25, 0.25]
        assert renyi_entropy(p, 0.5) == pytest.approx(hand_renyi(p, 0.5), abs=1e-12)
        assert renyi_entropy(p, 0.5) == pytest.approx(1.543107, abs=1e-6)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0, -0.5])
    def test_rejects_orders_outside_open_interval(self, alpha):
        with pytest.raises(ParameterError):
            renyi_entropy([0.5, 0.5], alpha)


class TestArimoto:
    def test_uniform_constant_side_info(self):
        assert arimoto_conditional_entropy(uniform(4), 0.5) == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
    def test_revealing_side_info(self, alpha):
        assert arimoto_conditional_entropy(JointPMF(np.eye(3) / 3), alpha) == 0.0

    def test_hand_example(self):
        j = JointPMF([[0.5, 0.25], [0.0, 0.25]])
        assert arimoto_conditional_entropy(j, 0.5) == pytest.approx(math.log2(1.5), abs=1e-12)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ParameterError):
            arimoto_conditional_entropy(uniform(2), 1.0)

    def test_range(self, rng):
        for _ in range(300):
            j = random_joint(rng, int(rng.integers(1, 7)), int(rng.integers(1, 4)))
            for alpha in (1 / 3, 1 / 2, 2 / 3):
                h = arimoto_conditional_entropy(j, alpha)
                assert 0.0 <= h <= math.log2(j.x_size)

    def test_additivity_under_uniform_adjoin(self, rng):
        for _ in range(200):
            j = random_joint(rng, int(rng.integers(1, 6)), int(rng.integers(1, 4)))
            for alpha in (1 / 3, 1 / 2, 2 / 3):
                h = arimoto_conditional_entropy(j, alpha)
                for c in (2, 3, 4):
                    hc = arimoto_conditional_entropy(adjoin_uniform(j, c), alpha)
                    assert hc - h == pytest.approx(math.log2(c), abs=1e-9)


class TestPosterior:
    def test_independent(self):
        rows = posterior_family(JointPMF(np.full((2, 2), 0.25))).rows
        assert np.allclose(rows, 0.5)

    def test_revealing(self):
        rows = posterior_family(JointPMF(np.eye(2) / 2)).rows
        assert np.array_equal(rows, np.eye(2))

    def test_hand_example(self):
        post = posterior_family(JointPMF([[0.5, 0.25], [0.0, 0.25]]))
        assert np.allclose(post.rows[1], [0.5, 0.5])

    def test_zero_marginal_is_skipped(self):
        post = posterior_family(JointPMF([[0.5, 0.0], [0.5, 0.0]]))
        assert list(post.defined) == [True, False]
        assert np.all(post.rows[1] == 0)


class TestExtensions:
    def test_n1_identity(self, rng):
        j = random_joint(rng, 3, 2)
        assert np.allclose(iid_extension(j, 1).mass, j.mass)

    def test_binary_cube(self):
        assert np.allclose(iid_extension(uniform(2), 3).mass, 1 / 8)

    def test_big_endian_indexing(self):
        j = column([0.75, 0.25])
        m = iid_extension(j, 2).mass[:, 0]
        # index x1*2 + x2
        assert m[1] == pytest.approx(0.75 * 0.25)
        assert m[3] == pytest.approx(0.25 * 0.25)

    def test_entropy_scales_with_n(self, rng):
        for _ in range(30):
            j = random_joint(rng, int(rng.integers(1, 4)), int(rng.integers(1, 3)))
            for alpha in (1 / 3, 1 / 2, 2 / 3):
                h = arimoto_conditional_entropy(j, alpha)
                h3 = arimoto_conditional_entropy(iid_extension(j, 3), alpha)
                assert h3 == pytest.approx(3 * h, abs=1e-9)

    def test_budget(self):
        with pytest.raises(SizeError, match="max_configs=100"):
            iid_extension(uniform(4), 4, max_configs=100)

    def test_adjoin_identity_and_uniform(self, rng):
        j = random_joint(rng, 3, 2)
        assert np.allclose(adjoin_uniform(j, 1).mass, j.mass)
        assert np.allclose(adjoin_uniform(uniform(2), 2).mass, 0.25)

    def test_adjoin_index_order(self):
        m = adjoin_uniform(column([0.75, 0.25]), 2).mass[:, 0]
        assert np.allclose(m, [0.375, 0.375, 0.125, 0.125])

    def test_adjoin_adds_two_bits(self, rng):
        j = random_joint(rng, 4, 3)
        h = arimoto_conditional_entropy(j, 0.5)
        assert arimoto_conditional_entropy(adjoin_uniform(j, 4), 0.5) == pytest.approx(h + 2, abs=1e-9)


class TestValidation:
    @pytest.mark.parametrize("mass", [
        [[0.5], [0.6]],
        [[-0.1], [1.1]],
        [[np.nan], [1.0]],
        [],
    ])
    def test_rejects(self, mass):
        with pytest.raises(ParameterError):
            JointPMF(np.array(mass, dtype=float))

    def test_within_tolerance_accepted(self):
        JointPMF([[0.5], [0.5 + 5e-13]])

    def test_immutable(self):
        j = uniform(2)
        with pytest.raises(ValueError):
            j.mass[0, 0] = 1.0

    def test_json_round_trip(self, rng, tmp_path):
        j = random_joint(rng, 3, 2)
        path = tmp_path / "j.json"
        j.dump(path)
        d = json.loads(path.read_text())
        assert (d["x_size"], d["y_size"]) == (3, 2)
        assert np.array_equal(JointPMF.load(path).mass, j.mass)

    @pytest.mark.parametrize("d", [
        {"x_size": 2, "y_size": 1, "mass": [[0.5], [0.4]]},
        {"x_size": 3, "y_size": 1, "mass": [[0.5], [0.5]]},
        {"x_size": 2, "mass": [[0.5], [0.5]]},
    ])
    def test_json_rejects(self, d):
        with pytest.raises(ParameterError):
            JointPMF.from_dict(d)


def test_ceil_power_inequality():
    rng = np.random.default_rng(7)
    xi = np.concatenate([rng.exponential(5.0, 9_000), rng.integers(0, 50, 1_000).astype(float)])
    rho = rng.uniform(0, 4, xi.size)
    rho[rho == 0] = 1e-3
    for a, r in zip(xi, rho):
        assert math.ceil(a) ** r < ceil_power_bound(a, r)
