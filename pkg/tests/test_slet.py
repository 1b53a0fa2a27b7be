import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgslet import (
    Branch,
    BranchInconsistent,
    KGError,
    NoBracket,
    NonpositiveQ,
    PotentialPair,
    QuantumNumbers,
    RadialPotential,
    SupercriticalCoupling,
    anharmonic_corrections,
    b_c,
    energy_corrections,
    equal_mix,
    leading_energy,
    make_effective,
    omega,
    q_of_r,
    scalar_coulomb,
    shift_beta,
    solve_r0,
    solve_state,
    vector_coulomb,
)
from kgslet.errors import ComplexLeadingEnergy, ImaginaryFrequency
from kgslet.slet import _scan, delta_coefficients, epsilon_coefficients
from kgslet.tables import golden_rows, make_pair
from oracles import bc_by_differences, power_sum


def rp(*pairs):
    return RadialPotential.from_pairs(pairs)


def vector(A, k=0.0):
    return PotentialPair(1.0, vector=rp((-A, -1.0), (k, 1.0)))


def scalar(A):
    return PotentialPair(1.0, scalar=rp((-A, -1.0)))


def mixed(A):
    return PotentialPair(1.0, vector=rp((-A, -1.0)), scalar=rp((-A, -1.0)))


class TestChainPieces:
    def test_bc_vector_coulomb(self):
        A, r = 0.3, 2.7
        b, c = b_c(make_effective(vector(A)), r)
        assert b == pytest.approx(-A * A, rel=1e-14)
        assert c == pytest.approx(-A * A * r * r, rel=1e-14)

    def test_bc_free(self):
        assert b_c(make_effective(PotentialPair(1.0)), 1.3) == (0.0, 0.0)

    def test_bc_against_differentiated_closures(self):
        A1, k, r = 0.3, 0.05, 3.0
        V = power_sum([(-A1, -1.0), (k, 1.0)])
        S = power_sum([])
        b_ref, c_ref = bc_by_differences(1.0, V, S, A1, 0.0, r)
        b, c = b_c(make_effective(vector(A1, k)), r)
        assert b == pytest.approx(b_ref, rel=1e-8)
        assert c == pytest.approx(c_ref, rel=1e-8)

    def test_q_nonpositive_for_free_particle(self):
        with pytest.raises(NonpositiveQ):
            q_of_r(make_effective(PotentialPair(1.0)), 1.0)

    def test_vector_coulomb_expansion_point(self):
        A = 0.2
        sol = solve_state(vector(A), (0, 0))
        Q_exact = (0.5 + math.sqrt(0.25 - A * A)) ** 2
        assert sol.Q == pytest.approx(Q_exact, rel=1e-12)
        assert sol.Q == pytest.approx(0.918257569, rel=1e-9)
        assert sol.r0 == pytest.approx(math.sqrt(Q_exact**2 + Q_exact * A * A) / A, rel=1e-12)
        assert sol.r0 == pytest.approx(4.6902219, rel=1e-7)
        assert sol.E0 == pytest.approx(sol.Q / (A * sol.r0), rel=1e-13)

    def test_equal_mix_expansion_point(self):
        sol = solve_state(mixed(0.5), (0, 0))
        assert sol.r0 == pytest.approx(1.25, rel=1e-12)
        assert sol.E0 == pytest.approx(-0.5 / 1.25 + 1.0, rel=1e-13)

    def test_scalar_coulomb_expansion_point(self):
        A = 0.3
        sol = solve_state(scalar(A), (0, 0))
        assert sol.r0 == pytest.approx(sol.lbar**2 / A, rel=1e-12)

    def test_leading_energy_free_limit(self):
        eff = make_effective(PotentialPair(1.0))
        assert leading_energy(eff, 2.0, 0.0, Branch.PARTICLE) == 1.0
        assert leading_energy(eff, 2.0, 0.0, Branch.ANTIPARTICLE) == -1.0

    def test_leading_energy_complex(self):
        # scalar Coulomb: radicand Q/r^2 - 2mA/r + m^2 dips below zero for Q < A^2
        eff = make_effective(scalar(0.5))
        with pytest.raises(ComplexLeadingEnergy):
            leading_energy(eff, 0.02, 0.01)

    @pytest.mark.parametrize("pair", [vector(0.3), scalar(0.3)], ids=["vector", "scalar"])
    def test_frequency_is_two_for_coulomb(self, pair):
        assert solve_state(pair, (1, 1)).w == pytest.approx(2.0, rel=1e-13)

    def test_bare_centrifugal_frequency(self):
        eff = make_effective(PotentialPair(1.0))
        assert omega(eff, 1.0, 1.0, 1.0) == pytest.approx(math.sqrt(12.0))

    def test_imaginary_frequency(self):
        eff = make_effective(PotentialPair(1.0, vector=rp((1.0, 2.0))))
        with pytest.raises(ImaginaryFrequency):
            omega(eff, 1.0, 1.0, -100.0)

    @pytest.mark.parametrize("w,n_r,beta", [(2.0, 0, -1.0), (2.0, 2, -3.0),
                                             (math.sqrt(12.0), 0, -(1 + math.sqrt(3.0)) / 2)])
    def test_shift(self, w, n_r, beta):
        assert shift_beta(w, n_r) == pytest.approx(beta, rel=1e-15)

    def test_vectorized_scan_matches_scalar_chain(self):
        eff = make_effective(make_pair("scalar-linear", 0.3, 0.05))
        rs, gs = _scan(eff, 0, Branch.PARTICLE, 0.0, 0.5, 20.0, 25)
        for r, g in zip(rs, gs):
            Q = q_of_r(eff, float(r))
            E0 = leading_energy(eff, float(r), Q)
            beta = shift_beta(omega(eff, float(r), Q, E0), 0)
            assert g == pytest.approx(beta**2 - Q, rel=1e-10, abs=1e-12)


class TestAnharmonicCoefficients:
    def test_trivial_derivatives(self):
        eff = make_effective(PotentialPair(1.0))
        eps = epsilon_coefficients(eff, 1.0, 1.0, 1.0, -1.0)
        dlt = delta_coefficients(eff, 1.0, 1.0, 1.0, -1.0, 0.0)
        assert eps == (2.0, -3.0, -4.0, 5.0)
        assert dlt[2:] == (4.0, -5.0, -6.0, 7.0)

    def test_coulomb_higher_orders_vanish(self):
        sol = solve_state(vector(0.3), (0, 0))
        E1, E2, E3 = energy_corrections(make_effective(vector(0.3)), sol.r0, sol.Q, sol.E0,
                                        sol.w, sol.beta, 0)
        assert max(abs(E1), abs(E2), abs(E3)) <= 1e-12 * abs(sol.E0)

    def test_second_order_energy_feeds_third(self):
        # alpha2 uses the actual E2 through delta_1, delta_2
        pair = make_pair("vector-linear", 0.4, 0.05)
        eff = make_effective(pair)
        sol = solve_state(pair, (0, 0))
        a1, a2, eps, dlt = anharmonic_corrections(eff, sol.r0, sol.Q, sol.E0, sol.w, sol.beta, 0, sol.E2)
        assert a2 == sol.alpha2
        _, a2_zero, _, _ = anharmonic_corrections(eff, sol.r0, sol.Q, sol.E0, sol.w, sol.beta, 0, 0.0)
        assert a2_zero != a2


class TestSolveState:
    def test_vector_coulomb_energy(self):
        assert solve_state(vector(0.2)).energy == pytest.approx(0.97890631293, abs=1e-11)

    def test_vector_linear_row(self):
        sol = solve_state(vector(0.5, 0.2))
        np.testing.assert_allclose(sol.partial_sums, (0.87841386, 0.86508153, 0.86648455), atol=5e-8)

    def test_vector_linear_table_entries(self):
        sol = solve_state(vector(0.4, 0.05))
        assert sol.partial_sums[1] == pytest.approx(0.99763976, abs=5e-8)
        assert sol.partial_sums[2] == pytest.approx(0.99732540, abs=5e-8)

    def test_leading_energy_small_k(self):
        assert round(solve_state(vector(0.2, 0.01)).E0, 6) == 1.029590

    def test_scalar_linear_row(self):
        pair = PotentialPair(1.0, vector=rp((-0.5, -1.0)), scalar=rp((0.3, 1.0)))
        np.testing.assert_allclose(solve_state(pair).partial_sums, (0.9322673, 0.9074421, 0.906889),
                                   atol=1e-6)

    def test_scalar_linear_row_with_two_pass_order(self):
        sol = solve_state(make_pair("scalar-linear", 0.3, 0.05))
        np.testing.assert_allclose(sol.partial_sums, (1.085772, 1.081002, 1.079875), atol=5e-7)

    def test_equal_mix(self):
        sol = solve_state(mixed(0.5))
        assert sol.energy == pytest.approx(0.6, rel=1e-13)
        assert abs(sol.E2) <= 1e-12 * sol.E0 and abs(sol.E3) <= 1e-12 * sol.E0

    def test_supercritical(self):
        with pytest.raises(SupercriticalCoupling) as info:
            solve_state(vector(0.6))
        assert info.value.stage == "effective_l"

    def test_boundary_case_flagged(self):
        sol = solve_state(vector(0.5))
        assert sol.boundary_case and sol.l_prime == -0.5
        assert not solve_state(vector(0.4)).boundary_case

    def test_free_particle_has_no_expansion_point(self):
        with pytest.raises(NonpositiveQ) as info:
            solve_state(PotentialPair(1.0))
        assert info.value.stage == "solve_r0"

    def test_quantum_numbers_validated(self):
        with pytest.raises(ValueError):
            QuantumNumbers(-1, 0)
        with pytest.raises(ValueError):
            solve_state(vector(0.2), (0, 1.5))

    @pytest.mark.parametrize("pair", [vector(0.3), mixed(0.3)], ids=["vector", "equal-mix"])
    def test_antiparticle_branch_rejected_where_inconsistent(self, pair):
        with pytest.raises(BranchInconsistent):
            solve_state(pair, (0, 0), "antiparticle")

    @pytest.mark.parametrize("A", [0.1, 0.3, 0.7, 1.5])
    @pytest.mark.parametrize("qn", [(0, 0), (1, 0), (2, 1)])
    def test_scalar_branch_symmetry(self, A, qn):
        up = solve_state(scalar(A), qn, "particle").energy
        down = solve_state(scalar(A), qn, "antiparticle").energy
        assert down == -up

    def test_solution_invariants(self):
        for t in (1, 2, 3, 4):
            for row in golden_rows(t):
                sol = solve_state(row.pair())
                assert abs(sol.E1) <= 1e-12 * max(1.0, abs(sol.E0))
                assert sol.lbar**2 == pytest.approx(sol.Q, rel=1e-12)
                assert sol.residual <= sol.tolerance
                s2 = sol.E0 + sol.E2 / sol.lbar**2
                assert sol.partial_sums == (sol.E0, s2, s2 + sol.E3 / sol.lbar**3)
                assert sol.second_derivative > 0
                assert sol.brackets

    def test_serializable(self):
        d = solve_state(vector(0.3, 0.1)).to_dict()
        assert d["branch"] == "particle" and len(d["delta"]) == 6 and d["energy"] == d["partial_sums"][2]


class TestPhysicalProperties:
    @pytest.mark.parametrize("family", ["vector-linear", "scalar-linear"])
    @pytest.mark.parametrize("A1", [0.2, 0.3, 0.4, 0.5])
    def test_continuity_as_linear_term_vanishes(self, family, A1):
        E = solve_state(make_pair(family, A1, 1e-6)).energy
        assert E == pytest.approx(vector_coulomb(1.0, A1, 0, 0).energy, rel=1e-4)

    @pytest.mark.parametrize("t", [1, 2, 3, 4])
    def test_energy_increases_with_linear_strength(self, t):
        rows = golden_rows(t)
        for A1 in sorted({r.A1 for r in rows}):
            ks = sorted(r.k for r in rows if r.A1 == A1)
            energies = [solve_state(make_pair(rows[0].family, A1, k)).energy for k in ks]
            assert all(b > a for a, b in zip(energies, energies[1:]))

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.01, 0.49), st.integers(0, 4), st.integers(0, 3))
    def test_pure_coulomb_families_are_exact(self, A, n_r, l):
        for pair, exact in ((vector(A), vector_coulomb(1.0, A, n_r, l).energy),
                            (scalar(A), scalar_coulomb(1.0, A, n_r, l).energy),
                            (mixed(A), equal_mix(1.0, A, n_r, l).energy)):
            sol = solve_state(pair, (n_r, l))
            assert sol.energy == pytest.approx(exact, rel=1e-10)
            assert abs(sol.E2) <= 1e-12 * abs(sol.E0) and abs(sol.E3) <= 1e-12 * abs(sol.E0)

    def test_solve_r0_unpacks(self):
        r0, Q, E0, w, beta = solve_r0(make_effective(vector(0.2)), (0, 0))
        assert w == pytest.approx(2.0) and beta == pytest.approx(-1.0)

    def test_mass_scaling(self):
        # E scales with m when couplings are dimensionless and k scales as m^2
        m = 2.5
        light = solve_state(make_pair("scalar-linear", 0.3, 0.05)).energy
        heavy = solve_state(make_pair("scalar-linear", 0.3, 0.05 * m * m, mass=m)).energy
        assert heavy == pytest.approx(m * light, rel=1e-11)


def test_repulsive_potential_fails_with_stage():
    # a repulsive vector potential has no expansion point on the particle branch
    with pytest.raises(KGError) as info:
        solve_state(PotentialPair(1.0, vector=rp((0.3, -1.0))))
    assert info.value.stage is not None
