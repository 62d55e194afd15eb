"""Tests for the concordance (Kendall tau) estimate and its two kernels."""

import numpy as np
import pytest

from taubounds import TieError, kendall_tau
from taubounds import _concordance_py
from taubounds.concordance import HAVE_COMPILED_KERNEL, QUADRATIC_LIMIT

try:
    from taubounds import _concordance as _ext
except ImportError:  # pragma: no cover - environment without a compiler
    _ext = None

BACKENDS = [_concordance_py] + ([_ext] if _ext is not None else [])


class TestExamples:
    def test_all_concordant(self):
        assert kendall_tau([(1, 1), (2, 2), (3, 3)]) == 1.0

    def test_all_discordant(self):
        assert kendall_tau([(1, 3), (2, 2), (3, 1)]) == -1.0

    def test_hand_count(self):
        # pairs: (1,2)-(2,1) discordant, (1,2)-(3,3) and (2,1)-(3,3) concordant
        assert kendall_tau([(1, 2), (2, 1), (3, 3)]) == pytest.approx(1 / 3)

    def test_two_argument_form(self):
        x = np.array([0.3, 0.9, 0.1, 0.5])
        y = np.array([1.0, 2.0, 0.5, 3.0])
        assert kendall_tau(x, y) == kendall_tau(np.column_stack((x, y)))


class TestValidation:
    def test_too_small(self):
        with pytest.raises(ValueError):
            kendall_tau([(1.0, 2.0)])

    def test_x_ties_reported(self):
        with pytest.raises(TieError) as err:
            kendall_tau([(1, 5), (1, 2), (3, 4)])
        assert err.value.coordinate == "x"
        assert err.value.value == 1.0

    def test_y_ties_reported(self):
        with pytest.raises(TieError) as err:
            kendall_tau([(1, 4), (2, 4), (3, 5)])
        assert err.value.coordinate == "y"

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            kendall_tau([(1, 2), (np.nan, 3), (4, 5)])

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            kendall_tau([(1, 2), (2, 3)], method="bubble")


class TestKernelEquivalence:
    @pytest.mark.parametrize("n", [2, 3, 17, 257, 3000])
    def test_methods_agree_exactly(self, n):
        rng = np.random.default_rng(n)
        x = rng.standard_normal(n)
        y = 0.4 * x + rng.standard_normal(n)
        quad = kendall_tau(x, y, method="quadratic")
        fast = kendall_tau(x, y, method="mergesort")
        assert quad == fast  # integer pair counts make this exact

    @pytest.mark.parametrize("backend", BACKENDS)
    @pytest.mark.parametrize("n", [5, 300, 2049])
    def test_backends_agree_exactly(self, backend, n):
        rng = np.random.default_rng(7 * n)
        x = np.ascontiguousarray(rng.standard_normal(n))
        y = np.ascontiguousarray(rng.standard_normal(n))
        ref_net = _concordance_py.net_concordance_quadratic(x, y)
        assert int(backend.net_concordance_quadratic(x, y)) == ref_net
        order = np.argsort(x)
        ref_inv = _concordance_py.discordant_by_merge(y[order])
        assert int(backend.discordant_by_merge(y[order])) == ref_inv

    def test_auto_switches_to_mergesort(self):
        rng = np.random.default_rng(0)
        n = QUADRATIC_LIMIT + 1
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        assert kendall_tau(x, y) == kendall_tau(x, y, method="mergesort")


class TestInvariances:
    def test_permutation_invariant(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(400)
        y = rng.standard_normal(400)
        tau = kendall_tau(x, y)
        perm = rng.permutation(400)
        assert kendall_tau(x[perm], y[perm]) == tau

    def test_monotone_transform_invariant(self):
        rng = np.random.default_rng(9)
        x = rng.random(300)
        y = rng.random(300)
        assert kendall_tau(np.exp(x), y**3) == kendall_tau(x, y)

    def test_sign_flip(self):
        rng = np.random.default_rng(13)
        x = rng.random(300)
        y = rng.random(300)
        assert kendall_tau(x, -y) == -kendall_tau(x, y)


def test_backend_flag_is_boolean():
    assert isinstance(HAVE_COMPILED_KERNEL, bool)
