import math

import numpy as np
import pytest

from ambiguity_lab import ParameterError, SizeError, posterior_family
from ambiguity_lab import _kernels_py, kernels
from ambiguity_lab.guessing import ceil_rank_moment, min_guess_moment
from ambiguity_lab.oracles import (
    Budget,
    brute_eve,
    brute_min_guess,
    brute_side_info,
    brute_task_encoder,
    permutation_ranks,
)
from ambiguity_lab.pmf import random_joint
from ambiguity_lab.storage import HintEncoder, SplitParams, build_guess_encoder

import reference
from conftest import column, point_mass, uniform

try:
    from ambiguity_lab import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

needs_ext = pytest.mark.skipif(_kernels_c is None, reason="compiled kernels not built")


class TestMinGuess:
    @pytest.mark.parametrize("j,value", [
        (uniform(4), 2.5),
        (column([0.7, 0.2, 0.1]), 1.4),
        (point_mass(4, 3), 1.0),
    ])
    def test_examples(self, j, value):
        assert brute_min_guess(j, 1.0) == pytest.approx(value, rel=1e-12)

    def test_agrees_with_fast_path(self, rng):
        for _ in range(100):
            j = random_joint(rng, int(rng.integers(1, 6)), int(rng.integers(1, 3)), ties=bool(rng.integers(2)))
            rho = float(rng.choice([0.5, 1.0, 2.0]))
            assert brute_min_guess(j, rho) == pytest.approx(min_guess_moment(j, rho), rel=1e-9)

    def test_budget(self):
        with pytest.raises(SizeError, match="720"):
            brute_min_guess(uniform(6), 1.0, Budget(max_configs=100))


class TestEve:
    def test_binary_pad(self):
        enc = build_guess_encoder(uniform(2), SplitParams(2, 1, 1, 2, 2))
        assert brute_eve(enc, uniform(2), 1.0) == pytest.approx(1.0)

    def test_revealing(self, rng):
        j = random_joint(rng, 3, 1)
        enc = build_guess_encoder(j, SplitParams(1, 3, 1, 3, 1))
        assert brute_eve(enc, j, 1.0) == pytest.approx(1.0)

    def test_constant_hints_uniform3(self):
        # two fixed orders with complementary first guesses: (1 + 1 + 2) / 3
        enc = HintEncoder.from_dense(np.ones((3, 1, 1, 1)))
        value = brute_eve(enc, uniform(3), 1.0)
        assert value == pytest.approx(4 / 3)
        assert value == pytest.approx(reference.min_eve(enc.dense(), uniform(3).mass, 1.0))

    def test_monotone_in_alphabet(self, rng):
        for _ in range(20):
            j = random_joint(rng, 3, 1)
            k = rng.dirichlet(np.ones(4), size=3).reshape(3, 1, 2, 2)
            small = HintEncoder.from_dense(k)
            big = HintEncoder.from_dense(np.concatenate([k, np.zeros((3, 1, 1, 2))], axis=2))
            assert brute_eve(big, j, 1.0) <= brute_eve(small, j, 1.0) + 1e-12

    def test_budget(self):
        enc = build_guess_encoder(uniform(4), SplitParams(4, 1, 1, 4, 4))
        with pytest.raises(SizeError):
            brute_eve(enc, uniform(4), 1.0, Budget(max_configs=1000))


class TestTaskEncoder:
    def test_examples(self):
        assert brute_task_encoder(uniform(4), 4, 1.0) == pytest.approx(1.0)
        assert brute_task_encoder(uniform(4), 2, 1.0) == pytest.approx(2.0)
        assert brute_task_encoder(uniform(3), 2, 1.0) == pytest.approx(5 / 3)

    def test_bad_m(self):
        with pytest.raises(ParameterError):
            brute_task_encoder(uniform(3), 0, 1.0)


class TestSideInfo:
    def test_examples(self, rng):
        j = random_joint(rng, 4, 2)
        assert brute_side_info(j, 1, 1.0) == pytest.approx(min_guess_moment(j, 1.0))
        assert brute_side_info(uniform(4), 2, 1.0) == pytest.approx(1.5)
        assert brute_side_info(uniform(4), 4, 1.0) == pytest.approx(1.0)

    def test_ceiling_moment_is_global_optimum(self, rng):
        for _ in range(60):
            j = random_joint(rng, int(rng.integers(1, 6)), int(rng.integers(1, 3)), ties=bool(rng.integers(2)))
            z = int(rng.integers(1, 4))
            for rho in (0.5, 2.0):
                assert brute_side_info(j, z, rho) == pytest.approx(ceil_rank_moment(j, rho, z), abs=1e-9)


def test_budget_env(monkeypatch):
    monkeypatch.setenv("AMBIGUITY_LAB_BUDGET", "5")
    assert Budget().max_configs == 5
    with pytest.raises(SizeError):
        brute_min_guess(uniform(3), 1.0)


def test_budget_rejects_nonpositive():
    with pytest.raises(ParameterError):
        Budget(max_configs=0)


class TestBackends:
    def test_selected_backend_is_known(self):
        assert kernels.BACKEND in ("cython", "python")

    def _rank_args(self, rng):
        j = random_joint(rng, 4, 2)
        xs, ys = np.nonzero(j.mass)
        cells = np.unique(ys, return_inverse=True)[1].astype(np.int32)
        n = int(cells.max()) + 1
        return (permutation_ranks(4), n, xs.astype(np.int32), cells, cells,
                j.mass[xs, ys].astype(float), np.arange(5, dtype=float) ** 1.3), 24**n

    @needs_ext
    def test_rank_tables_agree(self, rng):
        for _ in range(10):
            args, total = self._rank_args(rng)
            a = _kernels_c.enum_rank_tables(*args, 0, total)
            b = _kernels_py.enum_rank_tables(*args, 0, total)
            assert a[1] == b[1] and a[0] == pytest.approx(b[0], rel=1e-12)

    @needs_ext
    def test_list_and_sideinfo_agree(self, rng):
        for _ in range(10):
            j = random_joint(rng, 4, 2)
            xs, ys = np.nonzero(j.mass)
            w = j.mass[xs, ys]
            order = np.lexsort((xs, -w, ys))
            powtab = np.arange(5, dtype=float) ** 0.7
            powtab[0] = 0.0
            total = 3**xs.size
            for name in ("enum_list_functions", "enum_sideinfo_functions"):
                args = (ys[order].astype(np.int32), w[order].astype(float), 3, 2, powtab, 0, total)
                a = getattr(_kernels_c, name)(*args)
                b = getattr(_kernels_py, name)(*args)
                assert a[1] == b[1] and a[0] == pytest.approx(b[0], rel=1e-12)

    @needs_ext
    def test_partial_ranges_agree(self, rng):
        args, total = self._rank_args(rng)
        for lo, hi in [(0, 1), (5, 17), (total - 3, total)]:
            a = _kernels_c.enum_rank_tables(*args, lo, hi)
            b = _kernels_py.enum_rank_tables(*args, lo, hi)
            assert a[1] == b[1] and a[0] == pytest.approx(b[0], rel=1e-12)

    def test_python_backend_matches_reference(self, rng):
        j = random_joint(rng, 3, 2)
        xs, ys = np.nonzero(j.mass)
        cells = np.unique(ys, return_inverse=True)[1].astype(np.int32)
        n = int(cells.max()) + 1
        args = (permutation_ranks(3), n, xs.astype(np.int32), cells, cells,
                j.mass[xs, ys].astype(float), np.arange(4, dtype=float))
        best, _ = _kernels_py.enum_rank_tables(*args, 0, 6**n)
        assert best == pytest.approx(reference.min_guess(j.mass, 1.0), rel=1e-12)
