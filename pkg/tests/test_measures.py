import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from triqent import qcore
from triqent.bipartite import binary_entropy, eof
from triqent.canonical import (
    branch_unitaries,
    canonical_decomposition,
    canonicalize_params,
    form_from_params,
    reconstruct_state,
)
from triqent.classification import lu_equivalent
from triqent.measures import (
    InconsistentMeasures,
    MeasureSet,
    e1,
    e2_e3_imp,
    e4_e5_gain,
    e6,
    invert_measures,
    measure_set,
    s_psi_set,
    splitting_entanglement,
    splitting_overlap_sq,
)
from triqent.qcore import apply_local

from conftest import genuine_haar

GENERIC_FORM = form_from_params(0.8, 0.3, 0.7, 0.2, 0.5)


def _partner_form(form):
    """Generation partner: beta -> -beta, canonicalized."""
    params = canonicalize_params(
        (form.alpha, -form.beta, form.gamma, form.beta_prime)
    )
    return form_from_params(form.a, *params)


class TestE1:
    def test_ghz(self, ghz):
        assert abs(e1(canonical_decomposition(ghz)) - 1) < 1e-12

    def test_w(self, w):
        # Oracle value: binary entropy form of E at concurrence 2/3.
        x = (1 + np.sqrt(1 - 4 / 9)) / 2
        expected = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
        assert abs(e1(canonical_decomposition(w)) - expected) < 1e-9

    def test_vanishes_as_branch_becomes_product(self):
        values = [e1(form_from_params(a, 0.3, 0.4, 0.1, 0.2)) for a in (0.8, 0.95, 0.999, 0.999999)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-4


class TestGateCosts:
    def test_ghz_values(self, ghz):
        v2, v3 = e2_e3_imp(canonical_decomposition(ghz))
        assert abs(v2 - 1) < 1e-12
        assert abs(v3 - 0) < 1e-12

    def test_orthogonal_branches_maximal(self):
        form = form_from_params(0.9, 0.2, 0.4, 0.1, np.pi / 2)
        assert abs(e2_e3_imp(form)[1] - 1) < 1e-12

    def test_frozen_derived_value(self):
        # Oracle (channel-state entropy) evaluated once and frozen:
        # beta = pi/3, alpha + gamma = pi/4 -> e2 = 0.9078523006019320.
        form = form_from_params(0.9, 0.4 + np.pi / 8, np.pi / 3, np.pi / 8 - 0.4, 0.3)
        v2, _ = e2_e3_imp(form)
        assert abs(v2 - 0.9078523006019320) < 1e-12
        # and the trig correspondence gives the same number
        trig = binary_entropy((1 + np.cos(np.pi / 3) * np.cos(np.pi / 4)) / 2)
        assert abs(v2 - trig) < 1e-12


class TestGains:
    def test_ghz_maximal(self, ghz):
        v4, v5 = e4_e5_gain(canonical_decomposition(ghz))
        assert abs(v4 - 1) < 1e-12
        assert abs(v5 - 1) < 1e-12

    def test_beta_half_pi_maximal_at_equal_weights(self):
        # cos^2(beta) * [...] = 0 means the reduced state is maximally mixed
        # when a = b, so the entanglement gained is 1 (the overlap is 0).
        form = form_from_params(1 / np.sqrt(2), 0.3, np.pi / 2, 0.0, 0.2)
        v4, _ = e4_e5_gain(form)
        assert abs(v4 - 1) < 1e-12

    def test_identity_like_branch_gains_nothing(self):
        form = form_from_params(1 / np.sqrt(2), 1e-15, 0.0, 0.0, 0.0)
        v4, _ = e4_e5_gain(form)
        assert v4 < 1e-12


class TestSPsiSet:
    def test_member0_reconstructs_input(self):
        sp = s_psi_set(GENERIC_FORM)
        assert sp.psi.isclose(reconstruct_state(GENERIC_FORM), atol=1e-12)

    def test_ghz_family_degenerate(self, ghz):
        sp = s_psi_set(canonical_decomposition(ghz))
        for member in sp.members[1:]:
            equal, _ = lu_equivalent(sp.psi, member)
            assert equal

    def test_member2_is_conjugate_of_member0(self):
        sp = s_psi_set(GENERIC_FORM)
        equal, _ = lu_equivalent(sp.psi_conj, sp.psi.conj())
        assert equal

    def test_partner_not_equivalent_off_manifold(self):
        sp = s_psi_set(GENERIC_FORM)
        equal, conj = lu_equivalent(sp.psi, sp.psi_prime)
        assert not equal and not conj


class TestE6:
    def test_ghz_degenerate_convention(self, ghz):
        assert e6(canonical_decomposition(ghz)) == 0

    def test_discriminates_generic_pair(self):
        partner = _partner_form(GENERIC_FORM)
        assert e6(GENERIC_FORM) != e6(partner)
        # the two splitting entanglements really differ
        assert abs(
            splitting_entanglement(GENERIC_FORM) - splitting_entanglement(partner)
        ) > 1e-3

    def test_beta_prime_zero_degenerate(self):
        form = form_from_params(0.8, 0.3, 0.7, 0.2, 0.0)
        assert e6(form) == 0
        rec = reconstruct_state(form)
        partner = reconstruct_state(_partner_form(form))
        equal, _ = lu_equivalent(rec, partner)
        assert equal

    def test_last_term_sign_flip(self):
        # The partner differs exactly in the sign of the last expansion term.
        a, al, be, ga, bp = 0.8, 0.3, 0.7, 0.2, 0.5
        b = np.sqrt(1 - a * a)
        first_two = (
            4 * a**2 * b**2 * np.sin(be) ** 2 * np.sin(bp) ** 2 * np.cos(al - ga) ** 2
            + np.cos(be) ** 2 * np.cos(bp) ** 2
            * ((a**2 - b**2) ** 2 + 4 * a**2 * b**2 * np.cos(al + ga) ** 2)
        )
        direct = splitting_overlap_sq(a, al, be, ga, bp)
        partner = splitting_overlap_sq(a, al, -be, ga, bp)
        assert abs((direct + partner) / 2 - first_two) < 1e-12
        assert abs(direct - partner) > 1e-3


class TestTrigOracle:
    @given(st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_overlap_expansion_matches_direct(self, seed):
        rng = np.random.default_rng(seed)
        a = float(np.sqrt(rng.uniform(0.5, 0.95)))
        al, ga = rng.uniform(-np.pi / 2, np.pi / 2, 2)
        be, bp = rng.uniform(0, np.pi / 2, 2)
        b = np.sqrt(1 - a * a)
        u2, u3 = branch_unitaries(al, be, ga, bp)
        psi = np.array([a, 0, 0, b], dtype=complex)
        direct = abs(np.vdot(psi, np.kron(u2, u3) @ psi)) ** 2
        assert abs(direct - splitting_overlap_sq(a, al, be, ga, bp)) < 1e-12


class TestMeasureSetInvariance:
    @given(st.integers(0, 10**6))
    @settings(max_examples=10, deadline=None)
    def test_lu_invariance(self, seed):
        state = genuine_haar(seed)
        m0 = measure_set(canonical_decomposition(state))
        lu = qcore.random_local_unitary(3, seed + 13)
        m1 = measure_set(canonical_decomposition(apply_local(state, lu)))
        for k, v in m0.as_dict().items():
            assert abs(v - m1.as_dict()[k]) < 1e-8, k

    @given(st.integers(0, 10**6))
    @settings(max_examples=10, deadline=None)
    def test_conjugation_invariance(self, seed):
        state = genuine_haar(seed)
        m0 = measure_set(canonical_decomposition(state))
        m1 = measure_set(canonical_decomposition(state.conj()))
        for k, v in m0.as_dict().items():
            assert abs(v - m1.as_dict()[k]) < 1e-8, k


class TestInversion:
    def test_ghz_single_candidate(self, ghz):
        form = canonical_decomposition(ghz)
        cands = invert_measures(measure_set(form))
        assert len(cands) == 1
        assert cands[0].max_entangled_convention
        equal, _ = lu_equivalent(reconstruct_state(cands[0]), ghz)
        assert equal

    @given(st.integers(0, 10**6))
    @settings(max_examples=8, deadline=None)
    def test_roundtrip_recovers_source_family(self, seed):
        state = genuine_haar(seed)
        form = canonical_decomposition(state)
        cands = invert_measures(measure_set(form))
        assert 1 <= len(cands) <= 4
        hits = []
        for cand in cands:
            equal, conj = lu_equivalent(reconstruct_state(cand), state)
            hits.append(equal or conj)
        assert any(hits)

    def test_corrupted_measures_detected(self):
        m = measure_set(GENERIC_FORM)
        bad = MeasureSet(m.e1, m.e2, m.e3, min(m.e4 + 0.1, 1.0), m.e5, m.e6, m.e_1_23)
        with pytest.raises(InconsistentMeasures):
            invert_measures(bad)
