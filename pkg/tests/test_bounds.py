import math

import numpy as np
import pytest

from ruinbounds import (
    INF,
    BoundResult,
    Certificate,
    CompoundIncrement,
    ExplicitPrefix,
    IndexedNormal,
    IndexedTwoPoint,
    Normal,
    Periodic,
    PeriodHypothesisError,
    PrefixThenTail,
    QuasiPeriodicScaled,
    RiskModel,
    ShiftedExponential,
    TruncationPolicy,
    Uniform,
    bound_at_h,
    bound_kappa,
    bound_optimize,
    bound_per_increment,
    bound_periodic,
    bound_union,
    cumulative_log_mgf,
)


def alternating_normals():
    return RiskModel(Periodic((Normal(-0.25, 1.0), Normal(-0.75, 1.0))))


def uniform_exponential_cycle():
    return RiskModel(Periodic((Uniform(0.0, 2.0), Uniform(-2.0, 0.0), ShiftedExponential(1.0, -2.0))))


def linear_drift():
    return RiskModel(IndexedNormal(-0.5, 0.25))


def two_point_decay():
    return RiskModel(IndexedTwoPoint())


def classical():
    return RiskModel(Periodic((CompoundIncrement(ShiftedExponential(1.0), 1.0, ShiftedExponential(0.5)),)))


class TestCertificate:
    def test_log_bound_clamps_at_one(self):
        c = Certificate(2.0, 0.5)
        assert c.log_bound_at(1.0) == 0.0
        assert c.log_bound_at(10.0) == pytest.approx(-3.0)
        assert c.c == pytest.approx(math.exp(2.0))

    def test_infinite_exponent(self):
        c = Certificate(0.0, INF)
        assert c.log_bound_at(5.0) == -INF
        assert c.log_bound_at(0.0) == 0.0


class TestFixedExponent:
    def test_linear_drift_closed_form(self):
        # sup at h=2 is 2 (peak of the quadratic), so the bound is e^{-6+2}
        r = bound_at_h(linear_drift(), 3.0, 2.0)
        assert r.log_bound == pytest.approx(-4.0, abs=1e-12)
        assert r.certified
        assert r.certificate == Certificate(2.0, 2.0)

    def test_divergent_sup_is_trivial(self):
        r = bound_at_h(uniform_exponential_cycle(), 5.0, 0.75)
        assert r.log_bound == 0.0 and r.certified and r.certificate is None
        assert "trivial" in r.note

    def test_clamped_at_one(self):
        # sup(1.0) = 0.25 dwarfs h*u for tiny u, so the raw product exceeds 1
        r = bound_at_h(alternating_normals(), 0.01, 1.0)
        assert r.log_bound == 0.0

    def test_undetermined_sup_not_certified(self):
        m = RiskModel(IndexedNormal(0.5, 0.0), rates=0.2)
        r = bound_at_h(m, 5.0, 0.5, TruncationPolicy(k_max=60))
        assert not r.certified and r.certificate is None
        assert "may understate" in r.note

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            bound_at_h(alternating_normals(), 0.0, 1.0)
        with pytest.raises(ValueError):
            bound_at_h(alternating_normals(), -1.0, 1.0)
        with pytest.raises(ValueError):
            bound_at_h(alternating_normals(), 1.0, -0.5)
        with pytest.raises(ValueError):
            bound_at_h(alternating_normals(), 1.0, INF)


class TestOptimize:
    def test_cycle_frozen_values(self):
        m = uniform_exponential_cycle()
        r = bound_optimize(m, 5.0)
        assert r.log_bound == pytest.approx(-2.789700245821518, abs=1e-6)
        assert r.certified
        big = bound_optimize(m, 576.0)
        assert big.log10_bound == pytest.approx(-179.40691, abs=1e-3)
        # the optimal exponent parks just below the period root where the
        # supremum stays finite
        assert 0.71 < big.h_star < 0.7185814124

    def test_linear_drift_beats_fixed_exponent_scaling(self):
        # for this family min_h(-hu + sup) = -4 (u/3)^{3/2} at u on the lattice
        m = linear_drift()
        for u, expect in ((1.0, -0.78125), (3.0, -4.0), (4.5, -7.4999999), (12.0, -32.0)):
            r = bound_optimize(m, u)
            assert r.log_bound <= -4.0 * (u / 3.0) ** 1.5 + 1e-6
            assert r.log_bound == pytest.approx(expect, abs=1e-6)
            assert r.certified

    def test_two_point_decay_frozen(self):
        m = two_point_decay()
        r = bound_optimize(m, 6.0)
        assert r.log_bound == pytest.approx(-8.114770935802294, abs=1e-6)
        r103 = bound_optimize(m, 103.0)
        assert r103.log10_bound == pytest.approx(-165.79842017313237, abs=0.01)

    def test_never_exceeds_any_fixed_h(self):
        m = uniform_exponential_cycle()
        u = 9.0
        opt = bound_optimize(m, u).log_bound
        for h in np.linspace(0.05, 0.715, 12):
            assert opt <= bound_at_h(m, u, float(h)).log_bound + 1e-9

    def test_monotone_in_u(self):
        m = alternating_normals()
        vals = [bound_optimize(m, u).log_bound for u in (1.0, 2.0, 5.0, 11.0, 30.0)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_certificate_reevaluated_at_argmin(self):
        m = linear_drift()
        r = bound_optimize(m, 3.0)
        # the certificate must reproduce the reported bound at this u
        assert r.certificate.log_bound_at(3.0) == pytest.approx(r.log_bound, abs=1e-9)

    def test_nonpositive_paths_short_circuit(self):
        m = RiskModel(Periodic((Uniform(-2.0, -1.0),)))
        r = bound_optimize(m, 5.0)
        assert r.log_bound == -INF and r.h_star == INF
        assert r.certificate == Certificate(0.0, INF) and r.certified

    def test_drifting_up_settles_on_trivial(self):
        m = RiskModel(Periodic((Normal(0.5, 1.0),)))
        r = bound_optimize(m, 0.5)
        assert r.log_bound == 0.0 and r.h_star == 0.0 and r.certified

    def test_undetermined_scan_reported(self):
        m = RiskModel(IndexedNormal(0.5, 0.0), rates=0.2)
        r = bound_optimize(m, 4.0, policy=TruncationPolicy(k_max=60))
        assert isinstance(r, BoundResult)
        assert r.log_bound <= 0.0


class TestPerIncrement:
    def test_iid_normal(self):
        m = RiskModel(Periodic((Normal(-0.5, 1.0),)))
        r = bound_per_increment(m, 4.0)
        # root L = 1, MGF factor at L is exactly 1, so psi(u) <= e^{-u}
        assert r.log_bound == pytest.approx(-4.0, abs=1e-9)
        assert r.certificate.exponent == pytest.approx(1.0, abs=1e-9)
        assert r.certificate.log_c == pytest.approx(0.0, abs=1e-9)

    def test_zero_root_gives_trivial(self):
        r = bound_per_increment(uniform_exponential_cycle(), 7.0)
        assert r.log_bound == 0.0
        assert "trivial" in r.note

    def test_infinite_root(self):
        m = RiskModel(Periodic((Uniform(-3.0, -1.0),)))
        r = bound_per_increment(m, 2.0)
        assert r.log_bound == -INF and r.certificate.exponent == INF

    def test_interior_minimum_when_u_small(self):
        # small u pulls the optimal h inside (0, L): min of -3h + h^2/2 on [0, 4]
        m = RiskModel(Periodic((Normal(-2.0, 1.0),)))
        r = bound_per_increment(m, 1.0)
        assert r.h_star == pytest.approx(3.0, abs=1e-4)
        assert r.log_bound == pytest.approx(-4.5, abs=1e-6)


class TestPeriodicVariants:
    def test_shift_window_certificate(self):
        r = bound_periodic(alternating_normals(), 2, "shift_window", exponent=1.0, start_index=1)
        assert r.certificate.c == pytest.approx(math.e**0.25, rel=1e-9)
        assert r.certificate.exponent == 1.0
        assert r.certified and "verified" in r.note
        assert r.u is None and "certificate-only" in r.note

    def test_shift_window_rejects_bad_exponent(self):
        with pytest.raises(PeriodHypothesisError):
            bound_periodic(alternating_normals(), 2, "shift_window", exponent=1.0 + 1e-4)

    def test_shift_window_needs_exponent(self):
        with pytest.raises(ValueError):
            bound_periodic(alternating_normals(), 2, "shift_window")

    def test_shift_window_rejects_at_h(self):
        with pytest.raises(ValueError):
            bound_periodic(alternating_normals(), 2, "shift_window", exponent=1.0, at_h=0.5)

    def test_periodic_sub_root_constant(self):
        m = uniform_exponential_cycle()
        r = bound_periodic(m, 3, "periodic", at_h=2.0 / 3.0)
        assert r.certificate.c == pytest.approx(2.0952509210123833, rel=1e-9)
        assert r.certificate.log_c == pytest.approx(0.7396733175683764, abs=1e-12)

    def test_periodic_root_constant(self):
        m = uniform_exponential_cycle()
        r = bound_periodic(m, 3, "periodic")
        assert r.certificate.c == pytest.approx(2.2326892119090638, rel=1e-8)
        assert r.h_star == pytest.approx(0.7185814123725071, abs=1e-8)

    def test_periodic_with_u_minimizes(self):
        m = uniform_exponential_cycle()
        r = bound_periodic(m, 3, "periodic", u=576.0, at_h=2.0 / 3.0)
        assert r.log10_bound == pytest.approx(-166.44784501061767, abs=1e-6)
        rr = bound_periodic(m, 3, "periodic", u=576.0)
        assert rr.log10_bound == pytest.approx(-179.40691442679753, abs=1e-3)

    def test_periodic_variant_requires_plain_cycle(self):
        with pytest.raises(PeriodHypothesisError):
            bound_periodic(RiskModel(Periodic((Normal(-1.0, 1.0),)), rates=0.1), 1, "periodic")
        with pytest.raises(PeriodHypothesisError):
            bound_periodic(RiskModel(QuasiPeriodicScaled((Normal(-1.0, 1.0),), 0.5)), 1, "periodic")

    def test_at_h_beyond_root_rejected(self):
        with pytest.raises(ValueError):
            bound_periodic(uniform_exponential_cycle(), 3, "periodic", at_h=0.75)

    def test_scaled_periodic_includes_unit_constant(self):
        m = RiskModel(QuasiPeriodicScaled((Normal(-1.0, 1.0),), 0.5))
        r = bound_periodic(m, 1, "scaled_periodic")
        # window is k in [0, l): only the empty sum, so C = 1
        assert r.certificate.log_c == 0.0
        assert r.certificate.exponent == pytest.approx(2.0, abs=1e-8)
        u3 = bound_periodic(m, 1, "scaled_periodic", u=3.0)
        assert u3.log_bound == pytest.approx(-6.0, abs=1e-6)

    def test_scaled_periodic_two_slot(self):
        m = RiskModel(QuasiPeriodicScaled((Normal(-1.0, 1.0), Normal(-2.0, 1.0)), 0.5))
        r = bound_periodic(m, 2, "scaled_periodic", u=3.0)
        assert r.certificate.exponent == pytest.approx(3.0, abs=1e-8)
        assert r.certificate.log_c == pytest.approx(1.5, abs=1e-8)
        assert r.log_bound == pytest.approx(-7.5, abs=1e-6)

    def test_scaled_periodic_handles_interest(self):
        m = RiskModel(Periodic((Normal(-1.0, 1.0),)), rates=0.1)
        r = bound_periodic(m, 1, "scaled_periodic", u=3.0)
        assert r.certified and r.log_bound < -5.9

    def test_infinite_period_root(self):
        m = RiskModel(Periodic((Uniform(-2.0, -1.0),)))
        r = bound_periodic(m, 1, "periodic", u=4.0)
        assert r.log_bound == -INF
        assert r.certificate == Certificate(0.0, INF)

    def test_variant_validation(self):
        with pytest.raises(ValueError):
            bound_periodic(alternating_normals(), 2, "windowed")


class TestKappa:
    def test_classical(self):
        r = bound_kappa(classical(), 4.0)
        assert r.log_bound == pytest.approx(-2.0, abs=1e-8)
        assert r.certificate.log_c == 0.0
        assert r.h_star == pytest.approx(0.5, abs=1e-8)

    def test_needs_iid_base(self):
        with pytest.raises(ValueError):
            bound_kappa(alternating_normals(), 4.0)

    def test_valid_with_interest(self):
        m = RiskModel(Periodic((CompoundIncrement(ShiftedExponential(1.0), 1.0, ShiftedExponential(0.5)),)), rates=0.05)
        r = bound_kappa(m, 4.0)
        assert r.log_bound == pytest.approx(-2.0, abs=1e-8)


class TestUnion:
    def test_cycle_geometric_sum(self):
        m = uniform_exponential_cycle()
        r = bound_union(m, 30.0, 0.6)
        assert r.log_bound == pytest.approx(-14.75467294931498, abs=1e-9)
        assert r.certificate.log_c == pytest.approx(3.2453270506850194, abs=1e-9)
        assert r.certified

    def test_diverges_at_the_root_and_beyond(self):
        m = uniform_exponential_cycle()
        at_root = bound_union(m, 30.0, 0.7185814123725071)
        past = bound_union(m, 30.0, 0.9)
        for r in (at_root, past):
            assert r.log_bound == 0.0 and r.certificate is None

    def test_trivial_at_zero(self):
        r = bound_union(uniform_exponential_cycle(), 5.0, 0.0)
        assert r.log_bound == 0.0 and "diverges" in r.note

    def test_finite_horizon_exact(self):
        m = RiskModel(ExplicitPrefix((Normal(-1.0, 1.0), Normal(-0.5, 1.0))))
        r = bound_union(m, 2.0, 1.0)
        g = cumulative_log_mgf(m, 1.0, 2)
        manual = -2.0 + float(np.logaddexp(g[0], g[1]))
        assert r.log_bound == pytest.approx(manual, rel=1e-13)

    def test_prefix_then_cycle(self):
        m = RiskModel(PrefixThenTail((Normal(0.5, 1.0),), Periodic((Normal(-1.0, 1.0),))))
        r = bound_union(m, 8.0, 1.0)
        # prefix term e^{G_1} plus the geometric tail from the cycle
        tail = 1.0 - 0.5 - math.log1p(-math.exp(-0.5))
        assert r.log_bound == pytest.approx(-8.0 + float(np.logaddexp(1.0, tail)), rel=1e-12)

    def test_indexed_normal_tail_envelope(self):
        r = bound_union(linear_drift(), 3.0, 2.0)
        assert r.log_bound == pytest.approx(-3.1414041442544636, abs=1e-9)
        assert r.certified

    def test_indexed_two_point_tail_envelope(self):
        r = bound_union(two_point_decay(), 6.0, math.log(3.0))
        assert r.log_bound == pytest.approx(-4.150969803046124, abs=1e-9)

    def test_dominates_the_sup_bound(self):
        # the series includes the largest term, so union >= fixed-h everywhere
        cases = [
            (uniform_exponential_cycle(), 9.0, 0.6),
            (linear_drift(), 3.0, 2.0),
            (two_point_decay(), 6.0, 1.0),
        ]
        for m, u, h in cases:
            assert bound_union(m, u, h).log_bound >= bound_at_h(m, u, h).log_bound - 1e-12

    def test_no_structure_falls_back_to_trivial(self):
        m = RiskModel(IndexedNormal(-0.5, 0.25), rates=0.1)
        r = bound_union(m, 3.0, 1.0)
        assert r.log_bound == 0.0 and r.certified


class TestCertificateChain:
    def test_certificates_bound_their_own_methods(self):
        m = uniform_exponential_cycle()
        r = bound_periodic(m, 3, "periodic", u=40.0, at_h=2.0 / 3.0)
        # pointwise bound never exceeds the uniform certificate at the same u
        assert r.log_bound <= r.certificate.log_bound_at(40.0) + 1e-12

    def test_certificate_transfers_across_u(self):
        m = linear_drift()
        r = bound_optimize(m, 5.0)
        cert = r.certificate
        for u in (5.0, 6.0, 9.0):
            fresh = bound_optimize(m, u).log_bound
            assert fresh <= cert.log_bound_at(u) + 1e-9
