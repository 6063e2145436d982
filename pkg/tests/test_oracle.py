"""Exact hypergeometric tails and the Monte Carlo bound-checking harness."""

import numpy as np
import pytest
import scipy.stats

from passivekey import check_lemma3, check_lemma4, hypergeom_tail, serfling_xi


class TestHypergeomTail:
    def test_against_scipy(self):
        for pop, marked, draw in ((100, 30, 20), (1000, 50, 100), (50, 25, 25)):
            for threshold in (0, 1, 5, min(marked, draw)):
                got = hypergeom_tail(pop, marked, draw, threshold)
                want = float(scipy.stats.hypergeom.sf(threshold - 1, pop,
                                                      marked, draw))
                assert got == pytest.approx(want, rel=1e-10)

    def test_forward_backward_consistent(self):
        # ascending and descending accumulation orders must agree
        pop, marked, draw = 200, 40, 60
        for t in (1, 10, 20):
            fwd = hypergeom_tail(pop, marked, draw, t, direction="forward")
            bwd = hypergeom_tail(pop, marked, draw, t, direction="backward")
            assert fwd == pytest.approx(bwd, rel=1e-12)

    def test_edge_cases(self):
        assert hypergeom_tail(100, 30, 20, 0) == pytest.approx(1.0, abs=1e-14)
        assert hypergeom_tail(100, 30, 20, 21) == 0.0
        # support floor: can't draw fewer marked than draw - unmarked
        assert hypergeom_tail(10, 8, 9, 7) == pytest.approx(1.0, abs=1e-12)

    def test_deep_tail_log_space(self):
        # far tail where naive summation underflows
        got = hypergeom_tail(10**6, 1000, 1000, 50)
        want = float(scipy.stats.hypergeom.sf(49, 10**6, 1000, 1000))
        assert got == pytest.approx(want, rel=1e-8)
        assert 0.0 < got < 1e-50


class TestCheckLemma4:
    def test_reproducible(self):
        a = check_lemma4(1000, 1000, 0.1, 0.01, trials=5000, seed=42)
        b = check_lemma4(1000, 1000, 0.1, 0.01, trials=5000, seed=42)
        assert a == b

    def test_seed_changes_draws(self):
        a = check_lemma4(100, 100, 0.1, 0.1, trials=5000, seed=1)
        b = check_lemma4(100, 100, 0.1, 0.1, trials=5000, seed=2)
        assert (a.violations, a.seed) != (b.violations, b.seed)

    def test_holds_at_small_sizes(self):
        r = check_lemma4(100, 100, 0.1, 0.1, trials=20000, seed=7)
        assert r.rate <= 0.1
        assert r.ci_upper_95 > r.rate

    def test_bound_not_hopelessly_loose_check(self):
        # xi stays meaningful: the empirical width is a nonzero fraction of it
        xi = serfling_xi(0.1, 100, 100)
        assert 0.0 < xi < 0.5

    def test_report_fields(self):
        r = check_lemma4(200, 300, 0.1, 0.05, trials=1000, seed=3)
        assert r.trials == 1000
        assert r.bound == 0.05
        assert r.rng == "numpy-PCG64"
        assert 0.0 <= r.rate <= 1.0


class TestCheckLemma3:
    def test_reproducible(self):
        a = check_lemma3(500, 500, 0.03, 1e-3, trials=5000, seed=42)
        b = check_lemma3(500, 500, 0.03, 1e-3, trials=5000, seed=42)
        assert a == b

    def test_no_violations_typical(self):
        r = check_lemma3(500, 500, 0.03, 1e-3, trials=20000, seed=11)
        assert r.violations == 0

    def test_matches_exact_tail(self):
        # analytic failure probability equals the Monte Carlo estimate in law;
        # with P_fail <= eps and 2e4 trials, observing > 10 hits is absurd
        r = check_lemma3(500, 500, 0.03, 1e-3, trials=20000, seed=5)
        assert r.violations <= 10

    def test_ci_upper_positive(self):
        r = check_lemma3(500, 500, 0.03, 1e-3, trials=2000, seed=9)
        assert r.ci_upper_95 > 0.0
        assert r.ci_upper_95 == pytest.approx(
            float(scipy.stats.beta.ppf(0.95, r.violations + 1,
                                       r.trials - r.violations)),
            rel=1e-12,
        )


class TestRandomizedHypergeomAgreement:
    def test_empirical_matches_exact(self):
        # the exact tail should sit inside the Monte Carlo confidence band
        pop, marked, draw, t = 400, 60, 100, 20
        rng = np.random.default_rng(123)
        draws = rng.hypergeometric(marked, pop - marked, draw, size=200000)
        emp = float(np.mean(draws >= t))
        exact = hypergeom_tail(pop, marked, draw, t)
        assert emp == pytest.approx(exact, abs=4 * np.sqrt(exact / 200000) + 1e-4)
