"""Random-sampling phase-error bound and its Gaussian-tail solver."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from passivekey import (
    NoSolution,
    PhaseErrorInputs,
    e_hat,
    gaussian_tail,
    phase_error_bound,
    solve_omega,
)
from passivekey.phase_error import _tail_condition_lhs


class TestGaussianTail:
    def test_frozen_reference(self):
        assert gaussian_tail(1.0) == pytest.approx(0.15865525393145705, rel=1e-12)

    def test_half_at_zero(self):
        assert gaussian_tail(0.0) == pytest.approx(0.5, rel=1e-15)

    @given(w=st.floats(0.0, 10.0))
    @settings(max_examples=50)
    def test_decreasing(self, w):
        assert gaussian_tail(w + 0.1) < gaussian_tail(w)


class TestSolveOmega:
    def test_back_substitution(self):
        # acceptance identity: the solved omega sits on the tail condition
        for n, l in ((1e4, 1e4), (1e6, 1e5), (500, 500)):
            inputs = PhaseErrorInputs(n=n, l=l, e_ob=0.01, eps_sec=1e-10)
            w = solve_omega(inputs)
            target = 1e-10**2 / 16.0
            lhs = float(_tail_condition_lhs(w, n, l))
            assert lhs <= target
            assert abs(lhs - target) / target < 1e-6

    def test_matches_extended_precision(self):
        from reference_impl import ref_omega

        for n, l, eps in ((500.0, 500.0, 1e-3), (1e6, 1e6, 1e-10)):
            w = solve_omega(PhaseErrorInputs(n=n, l=l, e_ob=0.0, eps_sec=eps))
            assert w == pytest.approx(float(ref_omega(n, l, eps)), abs=1e-9)

    def test_increasing_in_security(self):
        w1 = solve_omega(PhaseErrorInputs(n=1e5, l=1e5, e_ob=0.0, eps_sec=1e-6))
        w2 = solve_omega(PhaseErrorInputs(n=1e5, l=1e5, e_ob=0.0, eps_sec=1e-12))
        assert w2 > w1

    def test_no_solution(self, monkeypatch):
        # unreachable on the real bracket (the Gaussian tail underflows to 0
        # before omega = 40), so shrink the bracket to exercise the guard
        import passivekey.phase_error as pe

        monkeypatch.setattr(pe, "OMEGA_MAX", 1.0)
        with pytest.raises(NoSolution):
            solve_omega(PhaseErrorInputs(n=10, l=10, e_ob=0.0, eps_sec=1e-10))


class TestEHat:
    def test_identity_at_zero_tau(self):
        for e in (0.0, 0.01, 0.3, 0.5):
            assert e_hat(e, 0.0) == pytest.approx(e, abs=1e-12)

    @given(e=st.floats(0.0, 0.5), tau=st.floats(0.0, 1.0))
    @settings(max_examples=100)
    def test_inflates(self, e, tau):
        assert e_hat(e, tau) >= e - 1e-12

    @given(e=st.floats(0.0, 0.5))
    @settings(max_examples=50)
    def test_monotone_in_tau(self, e):
        assert e_hat(e, 0.2) >= e_hat(e, 0.1) - 1e-12


class TestPhaseErrorBound:
    def test_matches_extended_precision(self):
        from reference_impl import ref_phase_error

        for n, l, e_ob, eps in (
            (500.0, 500.0, 0.03, 1e-3),
            (1e6, 1e6, 0.01, 1e-10),
            (2e6, 5e5, 0.005, 1e-10),
        ):
            got = phase_error_bound(
                PhaseErrorInputs(n=n, l=l, e_ob=e_ob, eps_sec=eps)
            )
            assert got == pytest.approx(float(ref_phase_error(n, l, e_ob, eps)),
                                        rel=1e-8)

    def test_range(self):
        for e_ob in (0.0, 0.1, 0.4, 0.5):
            ep = phase_error_bound(
                PhaseErrorInputs(n=1e4, l=1e4, e_ob=e_ob, eps_sec=1e-10)
            )
            assert 0.0 <= ep <= 0.5

    def test_exceeds_observed(self):
        # the bound always sits above the observed fraction
        for e_ob in (0.0, 0.01, 0.1):
            ep = phase_error_bound(
                PhaseErrorInputs(n=1e5, l=1e5, e_ob=e_ob, eps_sec=1e-10)
            )
            assert ep > e_ob

    def test_tightens_with_samples(self):
        eps = [
            phase_error_bound(PhaseErrorInputs(n=n, l=n, e_ob=0.01, eps_sec=1e-10))
            for n in (1e3, 1e5, 1e7, 1e9)
        ]
        assert all(b < a for a, b in zip(eps, eps[1:]))
        assert eps[-1] == pytest.approx(0.01, abs=2e-4)

    def test_vacuous_tiny_counts(self):
        assert phase_error_bound(
            PhaseErrorInputs(n=0.4, l=0.4, e_ob=0.0, eps_sec=1e-10)
        ) == 0.5

    def test_exact_hypergeometric_soundness(self):
        # exact failure probability of the claim at n = l = 500:
        # P[ hidden errors/n > e_p(c) ] summed over observed counts c
        from passivekey import hypergeom_tail

        n, l, eps_sec = 500, 500, 1e-3
        frac = 0.03
        marked = int((n + l) * frac)
        fail = 0.0
        for c in range(0, min(marked, l) + 1):
            e_p = phase_error_bound(
                PhaseErrorInputs(n=float(n), l=float(l), e_ob=c / l,
                                 eps_sec=eps_sec)
            )
            if (marked - c) / n > e_p:
                p_lo = hypergeom_tail(n + l, marked, l, c, direction="forward")
                p_hi = hypergeom_tail(n + l, marked, l, c + 1, direction="forward")
                fail += p_lo - p_hi
        assert fail <= eps_sec

    def test_validation(self):
        with pytest.raises(ValueError):
            PhaseErrorInputs(n=-1.0, l=10.0, e_ob=0.0, eps_sec=1e-10)
        with pytest.raises(ValueError):
            PhaseErrorInputs(n=10.0, l=10.0, e_ob=0.7, eps_sec=1e-10)
        with pytest.raises(ValueError):
            PhaseErrorInputs(n=10.0, l=10.0, e_ob=0.0, eps_sec=2.0)
