"""Tests for the section map, cycle detection, and pulse signatures."""

import math

import pytest

from isochron import (
    ModelParams,
    NotPeriodic,
    PeriodicityResult,
    SectionError,
    detect_periodicity,
    jump,
    network_state,
    phase_projection,
    poincare_map,
    pulse_equivalent,
    pulse_signature,
    require_section_state,
    states_match,
)
from isochron.poincare import _minimal_cycle

P = ModelParams(b=3.0, eps=0.58, n=3, tau=0.58)

#: jump(P, 0.29, 0.29) — first oscillator's phase in the canonical
#: period-4 state at the region center (tau/2, tau/4, 3*tau/4).
JUMP_029 = 0.7648723076637269

#: Return times of the minimal period-3 cycle reached from the period-3
#: family's center (tau/3, 2*tau/3) at the reference parameters, starting
#: from the first revisited state.  They sum to 2*tau.
IR3_CENTER_RETURNS = (
    0.39105964316225983,
    0.3822736901710735,
    0.3866666666666665,
)


def rotating_wave_state(tau: float):
    """Canonical section state at the period-4 family's center."""
    return network_state(
        phases=(jump(P, tau / 2, P.eps_hat), tau / 4, 0.0),
        ftds=((tau / 2,), (tau / 4,), (0.0, 3 * tau / 4)),
    )


def sync_state():
    """All three oscillators at phase 0 having just fired together."""
    return network_state(phases=(0.0, 0.0, 0.0), ftds=((0.0,), (0.0,), (0.0,)))


def ir4_line_state(tau: float, s2: float):
    """Canonical state of the period-4 family point (tau/2, s2, tau/2+s2)."""
    return network_state(
        phases=(jump(P, tau / 2, P.eps_hat), s2, 0.0),
        ftds=((tau / 2,), (s2,), (0.0, tau / 2 + s2)),
    )


def ir3_state(tau: float, s1: float, s3: float):
    """Canonical state of the period-3 family point (s1, s3): the first
    two oscillators share phase and firing memory."""
    return network_state(
        phases=(s1, s1, 0.0),
        ftds=((s1,), (s1,), (0.0, s3)),
    )


class TestSectionMap:
    def test_rotating_wave_is_fixed_point(self):
        state = rotating_wave_state(P.tau)
        new, elapsed = poincare_map(P, state)
        assert elapsed == pytest.approx(3 * P.tau / 4, abs=1e-12)
        assert states_match(state, new, tol=1e-12)

    def test_sync_state_is_fixed_point(self):
        state = sync_state()
        new, elapsed = poincare_map(P, state)
        assert elapsed == pytest.approx(P.tau, abs=1e-12)
        assert states_match(state, new, tol=1e-12)

    def test_section_state_required(self):
        off_section = network_state(
            phases=(0.5, 0.2, 0.1), ftds=((0.1,), (0.2,), (0.3,))
        )
        with pytest.raises(SectionError):
            poincare_map(P, off_section)

    def test_section_oscillator_selectable(self):
        state = network_state(
            phases=(0.0, 0.2, 0.1), ftds=((0.0, 0.1), (0.2,), (0.3,))
        )
        require_section_state(P, state, k=0)
        with pytest.raises(SectionError):
            require_section_state(P, state)  # default: last oscillator

    def test_zero_ftd_alone_is_not_enough(self):
        # Phase 0 without a zero firing-time distance: not a section state.
        state = network_state(
            phases=(0.5, 0.2, 0.0), ftds=((0.1,), (0.2,), (0.3,))
        )
        with pytest.raises(SectionError):
            require_section_state(P, state)


class TestPhaseProjection:
    def test_drops_reference_phase_and_ftds(self):
        state = rotating_wave_state(P.tau)
        assert phase_projection(state) == pytest.approx(
            (JUMP_029, 0.145), abs=1e-15
        )
        assert len(phase_projection(state)) == state.n - 1

    def test_sync_projects_to_origin(self):
        assert phase_projection(sync_state()) == (0.0, 0.0)


class TestStatesMatch:
    def test_matches_within_tolerance(self):
        a = rotating_wave_state(P.tau)
        b = network_state(
            phases=(a.phases[0] + 1e-12, a.phases[1], 0.0),
            ftds=a.ftds,
        )
        assert states_match(a, b, tol=1e-9)
        assert not states_match(a, b, tol=1e-13)

    def test_ftd_cardinality_gates_matching(self):
        a = network_state(phases=(0.5, 0.2, 0.0), ftds=((0.1,), (0.2,), (0.0,)))
        b = network_state(
            phases=(0.5, 0.2, 0.0), ftds=((0.1,), (0.2,), (0.0, 0.3))
        )
        assert not states_match(a, b, tol=1.0)


class TestDetectPeriodicity:
    def test_rotating_wave_period_one(self):
        res = detect_periodicity(P, rotating_wave_state(P.tau), max_iter=16)
        assert isinstance(res, PeriodicityResult)
        assert res.transient_iters == 0
        assert res.poincare_period == 1
        assert res.detected_period == 1
        assert res.orbit_period == pytest.approx(3 * P.tau / 4, abs=1e-12)
        assert len(res.return_times) == 1

    @pytest.mark.parametrize("s2", [0.10, 0.20])
    def test_line_states_have_period_two(self, s2):
        res = detect_periodicity(P, ir4_line_state(P.tau, s2), max_iter=16)
        assert isinstance(res, PeriodicityResult)
        assert res.transient_iters == 0
        assert res.poincare_period == 2
        assert res.orbit_period == pytest.approx(3 * P.tau / 2, abs=1e-12)

    def test_generic_period_four(self):
        state = network_state(
            phases=(jump(P, 0.30, P.eps_hat), 0.10, 0.0),
            ftds=((0.30,), (0.10,), (0.0, 0.40)),
        )
        res = detect_periodicity(P, state, max_iter=16)
        assert isinstance(res, PeriodicityResult)
        assert res.transient_iters == 0
        assert res.poincare_period == 4
        assert res.orbit_period == pytest.approx(3 * P.tau, abs=1e-12)
        assert math.fsum(res.return_times) == pytest.approx(
            res.orbit_period, abs=1e-12
        )

    def test_locked_pair_center_cycles_after_one_return(self):
        s1, s3 = P.tau / 3, 2 * P.tau / 3
        res = detect_periodicity(P, ir3_state(P.tau, s1, s3), max_iter=16)
        assert isinstance(res, PeriodicityResult)
        assert res.transient_iters == 1
        assert res.poincare_period == 3
        assert res.orbit_period == pytest.approx(2 * P.tau, abs=1e-12)
        assert res.return_times == pytest.approx(IR3_CENTER_RETURNS, abs=1e-12)

    def test_locked_pair_center_collapses_at_longer_delay(self):
        # At tau = 0.60 two thirds of the delay clears the single-pulse
        # trigger threshold, so the locked-pair center orbit closes after
        # every section return instead of every third.
        p6 = ModelParams(b=3.0, eps=0.58, n=3, tau=0.60)
        s1, s3 = p6.tau / 3, 2 * p6.tau / 3
        res = detect_periodicity(p6, ir3_state(p6.tau, s1, s3), max_iter=16)
        assert isinstance(res, PeriodicityResult)
        assert res.poincare_period == 1
        assert res.orbit_period == pytest.approx(2 * p6.tau / 3, abs=1e-12)

    def test_sync_fixed_point(self):
        res = detect_periodicity(P, sync_state(), max_iter=8)
        assert res.poincare_period == 1
        assert res.orbit_period == pytest.approx(P.tau, abs=1e-12)

    def test_budget_exhaustion_reports_not_periodic(self):
        state = network_state(
            phases=(jump(P, 0.30, P.eps_hat), 0.10, 0.0),
            ftds=((0.30,), (0.10,), (0.0, 0.40)),
        )
        res = detect_periodicity(P, state, max_iter=3)
        assert isinstance(res, NotPeriodic)
        assert res.iterations == 3
        assert res.last_state.n == 3

    def test_rejects_bad_budget_and_tolerance(self):
        with pytest.raises(ValueError):
            detect_periodicity(P, sync_state(), max_iter=0)
        with pytest.raises(ValueError):
            detect_periodicity(P, sync_state(), tol=0.0)

    def test_json_round_trip_keys(self):
        res = detect_periodicity(P, rotating_wave_state(P.tau), max_iter=8)
        d = res.to_json_dict()
        assert d["periodic"] is True
        assert d["poincare_period"] == 1
        assert d["return_times"] == list(res.return_times)
        assert d["periodic_state"]["phases"] == list(res.periodic_state.phases)

        miss = detect_periodicity(
            P,
            network_state(
                phases=(jump(P, 0.30, P.eps_hat), 0.10, 0.0),
                ftds=((0.30,), (0.10,), (0.0, 0.40)),
            ),
            max_iter=2,
        )
        d = miss.to_json_dict()
        assert d["periodic"] is False
        assert d["iterations"] == 2


class TestMinimalCycle:
    def test_reduces_detected_length_over_divisors(self):
        a = network_state(phases=(0.1, 0.2, 0.0), ftds=((0.1,), (0.2,), (0.0,)))
        b = network_state(phases=(0.3, 0.4, 0.0), ftds=((0.3,), (0.4,), (0.0,)))
        states = [a, b, a, b]
        assert _minimal_cycle(states, 0, 4, tol=1e-9) == 2
        assert _minimal_cycle([a, a, a], 0, 3, tol=1e-9) == 1
        assert _minimal_cycle([a, b, a, b], 0, 2, tol=1e-9) == 2


class TestPulseSignature:
    def test_rotating_wave_signature(self):
        res = detect_periodicity(P, rotating_wave_state(P.tau), max_iter=8)
        sig = pulse_signature(P, res)
        assert sig.period == pytest.approx(3 * P.tau / 4, abs=1e-12)
        assert len(sig.receptions) == 6
        # Every oscillator receives two single pulses per period.
        assert sig.per_recipient() == {0: (1, 1), 1: (1, 1), 2: (1, 1)}
        # A reception landing on the period boundary is wrapped to offset 0.
        offsets = sorted({round(t, 12) for _, _, t in sig.receptions})
        assert offsets == pytest.approx([0.0, P.tau / 4, P.tau / 2], abs=1e-12)

    def test_sync_signature_is_all_double_pulses(self):
        res = detect_periodicity(P, sync_state(), max_iter=8)
        sig = pulse_signature(P, res)
        assert sig.period == pytest.approx(P.tau, abs=1e-12)
        assert sig.per_recipient() == {0: (2,), 1: (2,), 2: (2,)}

    def test_zero_coupling_still_lists_receptions(self):
        p0 = ModelParams(b=3.0, eps=0.0, n=3, tau=0.58)
        res = detect_periodicity(p0, sync_state(), max_iter=8)
        sig = pulse_signature(p0, res)
        assert len(sig.receptions) == 3
        assert all(m == 2 for _, m, _ in sig.receptions)

    def test_receptions_sorted_by_offset_then_recipient(self):
        res = detect_periodicity(P, rotating_wave_state(P.tau), max_iter=8)
        sig = pulse_signature(P, res)
        keys = [(t, r) for r, _, t in sig.receptions]
        assert keys == sorted(keys)

    def test_json_uses_one_based_recipients(self):
        res = detect_periodicity(P, sync_state(), max_iter=8)
        d = pulse_signature(P, res).to_json_dict()
        assert {rec["recipient"] for rec in d["receptions"]} == {1, 2, 3}


class TestPulseEquivalence:
    def _sig(self, state, params=P):
        res = detect_periodicity(params, state, max_iter=16)
        assert isinstance(res, PeriodicityResult)
        return pulse_signature(params, res)

    def test_reflexive_and_symmetric(self):
        a = self._sig(rotating_wave_state(P.tau))
        b = self._sig(rotating_wave_state(P.tau))
        assert pulse_equivalent(a, a)
        assert pulse_equivalent(a, b) and pulse_equivalent(b, a)

    def test_period_mismatch_breaks_equivalence(self):
        a = self._sig(rotating_wave_state(P.tau))  # period 3*tau/4
        b = self._sig(sync_state())  # period tau
        assert not pulse_equivalent(a, b)

    def test_line_and_center_orbits_differ_by_period(self):
        a = self._sig(rotating_wave_state(P.tau))
        b = self._sig(ir4_line_state(P.tau, 0.10))
        assert not pulse_equivalent(a, b)

    def test_multiplicity_pattern_matters(self):
        # Same period can still fail on reception multiplicities: compare
        # the sync orbit with itself under a recipient relabeling (equal)
        # versus the rotating wave (unequal periods filtered earlier).
        a = self._sig(sync_state())
        assert pulse_equivalent(a, a)
