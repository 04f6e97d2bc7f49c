import dataclasses
import math

import numpy as np
import pytest

from secthresh import (DEFAULT_OPTIONS, CertificateError, DomainError,
                       ProblemShape, SolveOptions, TauOutcome, UsageError,
                       Verdict, bit_flip_search, dual_distance,
                       estimate_failure, extract_certificate,
                       null_projector, null_projector_from_matrix,
                       primal_tau_reference, sample_gaussian_matrix,
                       verify_theorem2_construction)

from oracles import oracle_box_distance


def _hand_projector():
    return null_projector_from_matrix(np.array([[2.0, 1.0]]), k=1)


def _balanced_projector():
    return null_projector_from_matrix(np.array([[1.0, 1.0]]), k=1)


class TestDualDistance:
    def test_k_zero_is_origin(self):
        shape = ProblemShape(n=12, m=5, k=0)
        P = null_projector(sample_gaussian_matrix(shape, 3))
        solve = dual_distance(P, 0, np.zeros(0))
        assert solve.distance <= 1e-12

    def test_hand_instance(self):
        solve = dual_distance(_hand_projector(), 1, [1.0])
        assert abs(solve.distance - 1.0 / math.sqrt(5.0)) <= 1e-9
        assert solve.converged

    def test_balanced_instance(self):
        solve = dual_distance(_balanced_projector(), 1, [1.0])
        assert solve.distance <= 1e-8

    def test_matches_exact_solver(self):
        sp = pytest.importorskip("scipy.optimize")
        del sp
        rng = np.random.default_rng(31)
        for _ in range(30):
            n = int(rng.integers(8, 26))
            m = int(rng.integers(2, n))
            k = int(rng.integers(1, min(9, m + 1)))
            P = null_projector(
                sample_gaussian_matrix(ProblemShape(n=n, m=m, k=k),
                                       int(rng.integers(0, 2**32))))
            b = rng.choice([-1.0, 1.0], size=k)
            solve = dual_distance(P, k, b)
            exact = oracle_box_distance(P.Dperp, k, b)
            assert abs(solve.distance - exact) <= 1e-7

    def test_basis_choice_irrelevant(self):
        # Any orthonormal basis of the same null space gives the same
        # distance: rotate the rows and re-solve.
        shape = ProblemShape(n=18, m=7, k=4)
        P = null_projector(sample_gaussian_matrix(shape, 9))
        rng = np.random.default_rng(1)
        rot, _ = np.linalg.qr(rng.standard_normal((11, 11)))
        P2 = dataclasses.replace(P, Dperp=rot @ P.Dperp)
        b = np.array([1.0, -1.0, 1.0, 1.0])
        d1 = dual_distance(P, 4, b).distance
        d2 = dual_distance(P2, 4, b).distance
        assert abs(d1 - d2) <= 1e-9

    def test_bad_sign_pattern(self):
        with pytest.raises(DomainError):
            dual_distance(_hand_projector(), 1, [2.0])


class TestPrimalReference:
    def test_k_zero(self):
        shape = ProblemShape(n=10, m=4, k=0)
        P = null_projector(sample_gaussian_matrix(shape, 8))
        assert primal_tau_reference(P, 0, np.zeros(0)) == 0.0

    def test_hand_instance(self):
        value = primal_tau_reference(_hand_projector(), 1, [1.0])
        assert abs(value + 1.0 / math.sqrt(5.0)) <= 5e-3

    def test_never_positive(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            n = int(rng.integers(8, 20))
            m = int(rng.integers(2, n))
            k = int(rng.integers(1, m + 1))
            P = null_projector(
                sample_gaussian_matrix(ProblemShape(n=n, m=m, k=k),
                                       int(rng.integers(0, 2**32))))
            b = rng.choice([-1.0, 1.0], size=k)
            assert primal_tau_reference(P, k, b) <= 0.0

    def test_size_cap(self):
        shape = ProblemShape(n=61, m=10, k=2)
        P = null_projector(sample_gaussian_matrix(shape, 0))
        with pytest.raises(UsageError):
            primal_tau_reference(P, 2, [1.0, 1.0])


class TestCertificates:
    def test_hand_certificate(self):
        P = _hand_projector()
        solve = dual_distance(P, 1, [1.0])
        cert = extract_certificate(P, 1, solve)
        assert abs(cert.head_l1 - 0.2) <= 1e-9
        assert abs(cert.tail_l1 - 0.4) <= 1e-9
        assert abs(cert.gap - 0.2) <= 1e-6
        assert cert.nullspace_residual <= 1e-8

    def test_gap_dominates_distance_squared(self):
        rng = np.random.default_rng(23)
        found = 0
        for _ in range(20):
            n = int(rng.integers(8, 22))
            m = int(rng.integers(2, max(3, n // 2)))
            k = int(rng.integers(1, m + 1))
            P = null_projector(
                sample_gaussian_matrix(ProblemShape(n=n, m=m, k=k),
                                       int(rng.integers(0, 2**32))))
            b = rng.choice([-1.0, 1.0], size=k)
            solve = dual_distance(P, k, b)
            if not solve.converged:
                continue
            if solve.distance <= DEFAULT_OPTIONS.positivity_threshold(n):
                continue
            cert = extract_certificate(P, k, solve)
            assert cert.gap >= solve.distance**2 - 1e-6
            assert cert.nullspace_residual <= 1e-8
            found += 1
        assert found >= 5  # the sweep must actually exercise the check

    def test_below_threshold_rejected(self):
        P = _balanced_projector()
        solve = dual_distance(P, 1, [1.0])
        with pytest.raises(UsageError):
            extract_certificate(P, 1, solve)

    def test_construction_recheck(self):
        P = _hand_projector()
        cert = extract_certificate(P, 1, dual_distance(P, 1, [1.0]))
        report = verify_theorem2_construction(np.array([[2.0, 1.0]]), 1, cert)
        assert report.passed
        assert report.l1_competitor < report.l1_original
        assert report.measurement_residual <= 1e-8
        # Hand values: x = (0, 2/sqrt(5)) scaled by the certificate's norm.
        assert abs(report.l1_original - cert.tail_l1) <= 1e-12
        assert abs(report.l1_competitor - cert.head_l1) <= 1e-12


class TestBitFlipSearch:
    def test_hand_instance_immediate(self):
        out = bit_flip_search(_hand_projector(), 1)
        assert out.verdict is Verdict.CertifiedFailure
        assert out.certificate is not None
        assert abs(out.best_distance - 1.0 / math.sqrt(5.0)) <= 1e-9

    def test_balanced_instance_not_certified(self):
        out = bit_flip_search(_balanced_projector(), 1)
        assert out.verdict is Verdict.NotCertified
        assert out.certificate is None

    def test_flip_budget(self):
        shape = ProblemShape(n=40, m=8, k=5)
        P = null_projector(sample_gaussian_matrix(shape, 13))
        out = bit_flip_search(P, 5)
        assert out.flips_evaluated <= DEFAULT_OPTIONS.max_passes * 5

    def test_k_zero_rejected(self):
        with pytest.raises(UsageError):
            bit_flip_search(_hand_projector(), 0)

    def test_improves_on_start(self):
        # Whatever the verdict, the reported distance can not be worse than
        # the all-ones starting pattern.
        shape = ProblemShape(n=30, m=18, k=9)
        P = null_projector(sample_gaussian_matrix(shape, 4))
        start = dual_distance(P, 9, np.ones(9)).distance
        out = bit_flip_search(P, 9)
        assert out.best_distance >= start - 1e-9


class TestEstimateFailure:
    def test_k_zero_short_circuit(self):
        inst = sample_gaussian_matrix(ProblemShape(n=12, m=5, k=0), 1)
        out = estimate_failure(inst, 0)
        assert out.verdict is Verdict.NotCertified
        assert out.flips_evaluated == 0

    def test_deep_failure_cell(self):
        inst = sample_gaussian_matrix(ProblemShape(n=200, m=180, k=74), 1)
        out = estimate_failure(inst, 74)
        assert out.verdict is Verdict.CertifiedFailure
        report = verify_theorem2_construction(inst.A, 74, out.certificate)
        assert report.passed

    def test_deep_success_cell(self):
        inst = sample_gaussian_matrix(ProblemShape(n=400, m=80, k=4), 1)
        out = estimate_failure(inst, 4)
        assert out.verdict is Verdict.NotCertified

    def test_wall_clock_recorded(self):
        inst = sample_gaussian_matrix(ProblemShape(n=30, m=20, k=8), 2)
        out = estimate_failure(inst, 8)
        assert out.seconds > 0.0


class TestOptionsAndOutcome:
    def test_positivity_threshold_scales(self):
        assert DEFAULT_OPTIONS.positivity_threshold(100) == pytest.approx(1e-5)

    def test_options_frozen(self):
        with pytest.raises(dataclasses.FrozenInstanceError):
            DEFAULT_OPTIONS.accept_tol = 0.5

    def test_verdict_certificate_coupling(self):
        with pytest.raises(DomainError):
            TauOutcome(verdict=Verdict.CertifiedFailure, best_b=np.ones(1),
                       best_distance=1.0, certificate=None, flips_evaluated=0)

    def test_custom_options_accepted(self):
        opts = SolveOptions(max_passes=2)
        out = bit_flip_search(_balanced_projector(), 1, opts)
        assert out.verdict is Verdict.NotCertified
