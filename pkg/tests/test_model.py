"""Hamiltonian builders against analytic reductions and direct integration."""

import numpy as np
import pytest
from scipy.linalg import eigh

from rydsim.errors import ConfigError
from rydsim.model import (
    SINGLE_ATOM_BASIS,
    TWO_ATOM_BASIS,
    EffectiveCoupling,
    GeometryConfig,
    InteractionChannel,
    LaserConfig,
    blockade_radius,
    bright_state,
    build_single_atom_hamiltonian,
    build_three_level_hamiltonian,
    build_two_atom_hamiltonian,
    dark_state,
    default_channels,
    interaction_shift,
    two_photon_rabi,
    validate_channels,
)
from rydsim.noise import ShotParams
from rydsim.quantum import (
    StateVector,
    overlap_probability,
    population,
    propagate_piecewise_constant,
)

TWO_PI = 2.0 * np.pi


def make_shot(r_a=(0.0, 0.0, 0.0), r_b=(0.0, 0.0, 0.0), delta_nu=0.0, scale=1.0):
    return ShotParams(
        delta_nu_mhz=delta_nu, intensity_scale=scale,
        r_a=np.asarray(r_a, float), r_b=np.asarray(r_b, float),
        pumped_a=True, pumped_b=True,
    )


def plain_coupling(omega_mhz, k=(0.0, 0.0, 0.0)):
    return EffectiveCoupling(omega_mhz=omega_mhz, k_eff=np.asarray(k, float))


def populations_vs_time(op, label0, t_grid_us):
    psi0 = StateVector.basis_state(op.basis, label0)
    return np.array(
        [
            [population(propagate_piecewise_constant(psi0, op, t), lb) for lb in op.basis]
            for t in t_grid_us
        ]
    )


class TestDerivedQuantities:
    def test_two_photon_rabi_paper_values(self):
        coupling = two_photon_rabi(LaserConfig())
        assert coupling.omega_mhz == pytest.approx(6.825, abs=1e-12)  # 260*21/(2*400)

    def test_two_photon_rabi_zero_leg(self):
        coupling = two_photon_rabi(LaserConfig(omega_b_mhz=0.0))
        assert coupling.omega_mhz == 0.0

    def test_effective_wavevector(self):
        coupling = two_photon_rabi(LaserConfig())
        expected = np.array([TWO_PI / 0.795, 0.0, TWO_PI / 0.474])
        np.testing.assert_allclose(coupling.k_eff, expected, atol=1e-12)
        assert np.linalg.norm(coupling.k_eff) == pytest.approx(15.4329530, abs=1e-6)

    def test_zero_intermediate_detuning_rejected(self):
        with pytest.raises(ConfigError, match="detuning"):
            LaserConfig(delta_intermediate_mhz=0.0)

    def test_interaction_shift(self):
        assert interaction_shift(GeometryConfig(separation_um=4.0)) == pytest.approx(50.0)
        assert interaction_shift(GeometryConfig(separation_um=3.6)) == pytest.approx(
            68.5871056, abs=1e-6
        )
        assert interaction_shift(GeometryConfig(separation_um=5.0, c3_mhz_um3=0.0)) == 0.0

    def test_blockade_radius(self):
        assert blockade_radius(3200.0, 7.0) == pytest.approx((3200.0 / 7.0) ** (1 / 3))
        assert blockade_radius(3200.0, 7.0) == pytest.approx(7.70, abs=5e-3)
        assert blockade_radius(3200.0, 3200.0) == pytest.approx(1.0)
        # at 18 um the shift is only ~0.55 MHz, far below the drive
        assert blockade_radius(3200.0, 0.55) == pytest.approx(18.0, abs=0.05)
        with pytest.raises(ConfigError):
            blockade_radius(3200.0, 0.0)

    def test_geometry_validation(self):
        with pytest.raises(ConfigError):
            GeometryConfig(separation_um=-1.0)
        with pytest.raises(ConfigError):
            GeometryConfig(separation_um=1.0, axis=[0.0, 0.0, 2.0])

    def test_channel_weights_must_sum_to_one(self):
        with pytest.raises(ConfigError, match="sum to 1"):
            validate_channels([InteractionChannel(50.0, 0.5), InteractionChannel(5.0, 0.4)])
        channels = default_channels(GeometryConfig(separation_um=4.0))
        assert channels[0].shift_mhz == pytest.approx(50.0)
        assert channels[0].weight == 1.0


class TestSingleAtom:
    def test_resonant_rabi(self):
        op = build_single_atom_hamiltonian(plain_coupling(7.0), make_shot())
        psi0 = StateVector.basis_state(SINGLE_ATOM_BASIS, "g")
        for t in np.linspace(0.0, 0.4, 23):
            p = population(propagate_piecewise_constant(psi0, op, t), "r")
            assert p == pytest.approx(np.sin(np.pi * 7.0 * t) ** 2, abs=1e-9)

    def test_detuned_amplitude_and_frequency(self):
        # delta_nu = omega halves the amplitude and raises the frequency to sqrt(2)*omega
        omega = 7.0
        op = build_single_atom_hamiltonian(plain_coupling(omega), make_shot(delta_nu=omega))
        psi0 = StateVector.basis_state(SINGLE_ATOM_BASIS, "g")
        g = np.sqrt(2.0) * omega
        for t in np.linspace(0.0, 0.4, 23):
            p = population(propagate_piecewise_constant(psi0, op, t), "r")
            assert p == pytest.approx(0.5 * np.sin(np.pi * g * t) ** 2, abs=1e-9)

    def test_zero_intensity_freezes_populations(self):
        op = build_single_atom_hamiltonian(
            plain_coupling(7.0), make_shot(scale=1e-300, delta_nu=0.3)
        )
        psi0 = StateVector.basis_state(SINGLE_ATOM_BASIS, "g")
        out = propagate_piecewise_constant(psi0, op, 1.0)
        assert population(out, "r") < 1e-12

    def test_atom_selector(self):
        coupling = plain_coupling(7.0, k=(1.0, 0.0, 0.0))
        shot = make_shot(r_a=(0.5, 0, 0), r_b=(-0.5, 0, 0))
        op_a = build_single_atom_hamiltonian(coupling, shot, "a")
        op_b = build_single_atom_hamiltonian(coupling, shot, "b")
        assert op_a.matrix[1, 0] != op_b.matrix[1, 0]
        with pytest.raises(ValueError):
            build_single_atom_hamiltonian(coupling, shot, "c")


class TestTwoAtom:
    def test_hermitian_by_construction(self):
        rng = np.random.default_rng(0)
        coupling = plain_coupling(7.0, k=(7.9, 0.0, 13.3))
        for _ in range(25):
            shot = make_shot(
                r_a=rng.normal(size=3), r_b=rng.normal(size=3),
                delta_nu=rng.normal(), scale=rng.uniform(0.5, 1.5),
            )
            op = build_two_atom_hamiltonian(coupling, shot, InteractionChannel(rng.normal()))
            assert np.max(np.abs(op.matrix - op.matrix.conj().T)) < 1e-12

    def test_noninteracting_factorization(self):
        # zero shift: P_rr(t) = P_a(t) * P_b(t) = sin^4(pi omega t)
        coupling = plain_coupling(7.0)
        op = build_two_atom_hamiltonian(coupling, make_shot(), InteractionChannel(0.0))
        pops = populations_vs_time(op, "gg", np.linspace(0.0, 0.5, 41))
        for t, row in zip(np.linspace(0.0, 0.5, 41), pops):
            p_single = np.sin(np.pi * 7.0 * t) ** 2
            assert row[3] == pytest.approx(p_single**2, abs=1e-9)

    def test_factorization_with_distinct_phases(self):
        coupling = plain_coupling(7.0, k=(7.9, 0.0, 13.3))
        shot = make_shot(r_a=(0.3, -0.1, 1.8), r_b=(-0.2, 0.4, -1.8))
        op2 = build_two_atom_hamiltonian(coupling, shot, InteractionChannel(0.0))
        op_a = build_single_atom_hamiltonian(coupling, shot, "a")
        op_b = build_single_atom_hamiltonian(coupling, shot, "b")
        psi2 = StateVector.basis_state(TWO_ATOM_BASIS, "gg")
        psi_a = StateVector.basis_state(SINGLE_ATOM_BASIS, "g")
        for t in np.linspace(0.0, 0.5, 21):
            p_rr = population(propagate_piecewise_constant(psi2, op2, t), "rr")
            p_a = population(propagate_piecewise_constant(psi_a, op_a, t), "r")
            p_b = population(propagate_piecewise_constant(psi_a, op_b, t), "r")
            assert p_rr == pytest.approx(p_a * p_b, abs=1e-9)

    def test_perfect_blockade_sqrt2_oscillation(self):
        # shift/omega = 100: no double excitation, single excitation at sqrt(2)*omega
        omega = 7.0
        coupling = plain_coupling(omega)
        op = build_two_atom_hamiltonian(coupling, make_shot(), InteractionChannel(100.0 * omega))
        t_grid = np.linspace(0.0, 2.0 / (np.sqrt(2.0) * omega), 61)  # two periods
        pops = populations_vs_time(op, "gg", t_grid)
        assert pops[:, 3].max() < 1e-3
        expected = np.sin(np.sqrt(2.0) * np.pi * omega * t_grid) ** 2
        assert np.max(np.abs(pops[:, 1] + pops[:, 2] - expected)) < 1e-3

    def test_exactly_one_frequency_within_0p1_percent(self):
        # the gg <-> bright-state splitting approaches sqrt(2)*omega at
        # large shift; at shift/omega = 100 it matches within 0.1%
        omega = 7.0
        coupling = plain_coupling(omega)
        op = build_two_atom_hamiltonian(coupling, make_shot(), InteractionChannel(100.0 * omega))
        w = np.sort(eigh(op.matrix, eigvals_only=True)) / TWO_PI
        splitting = w[2] - w[0]  # w[1] is the decoupled dark state at 0
        assert splitting == pytest.approx(np.sqrt(2.0) * omega, rel=1e-3)

    def test_blockade_suppression_at_paper_distances(self):
        coupling = plain_coupling(6.825)
        t_grid = np.linspace(0.0, 0.5, 101)
        near = build_two_atom_hamiltonian(coupling, make_shot(), InteractionChannel(68.587))
        far = build_two_atom_hamiltonian(coupling, make_shot(), InteractionChannel(0.549))
        p_rr_near = populations_vs_time(near, "gg", t_grid)[:, 3].max()
        p_rr_far = populations_vs_time(far, "gg", t_grid)[:, 3].max()
        assert p_rr_near < 0.01
        assert p_rr_far > 0.9

    def test_dark_state_never_populated(self):
        rng = np.random.default_rng(42)
        k = np.array([7.9033, 0.0, 13.2557])
        for _ in range(8):
            r_a, r_b = rng.normal(size=3), rng.normal(size=3)
            shot = make_shot(r_a=r_a, r_b=r_b, delta_nu=rng.normal(),
                             scale=rng.uniform(0.5, 1.5))
            op = build_two_atom_hamiltonian(
                plain_coupling(7.0, k), shot, InteractionChannel(rng.uniform(-80, 80))
            )
            dark = dark_state(k, r_a, r_b)
            psi0 = StateVector.basis_state(TWO_ATOM_BASIS, "gg")
            for t in np.linspace(0.0, 1.0, 11):
                psi = propagate_piecewise_constant(psi0, op, t)
                assert overlap_probability(psi, dark) < 1e-10

    def test_bright_state_matches_collective_two_level(self):
        omega = 7.0
        k = np.array([7.9033, 0.0, 13.2557])
        r_a, r_b = np.array([0.2, 0.1, 1.8]), np.array([-0.1, -0.3, -1.8])
        shot = make_shot(r_a=r_a, r_b=r_b)
        op = build_two_atom_hamiltonian(
            plain_coupling(omega, k), shot, InteractionChannel(100.0 * omega)
        )
        bright = bright_state(k, r_a, r_b)
        psi0 = StateVector.basis_state(TWO_ATOM_BASIS, "gg")
        for t in np.linspace(0.0, 2.0 / (np.sqrt(2.0) * omega), 31):
            psi = propagate_piecewise_constant(psi0, op, t)
            expected = np.sin(np.sqrt(2.0) * np.pi * omega * t) ** 2
            assert overlap_probability(psi, bright) == pytest.approx(expected, abs=1e-3)

    def test_populations_invariant_under_global_translation(self):
        k = np.array([7.9033, 0.0, 13.2557])
        r_a, r_b = np.array([0.2, 0.1, 1.8]), np.array([-0.1, -0.3, -1.8])
        d = np.array([0.37, -1.2, 0.85])
        coupling = plain_coupling(7.0, k)
        channel = InteractionChannel(68.587)
        op1 = build_two_atom_hamiltonian(coupling, make_shot(r_a=r_a, r_b=r_b), channel)
        op2 = build_two_atom_hamiltonian(
            coupling, make_shot(r_a=r_a + d, r_b=r_b + d), channel
        )
        pops1 = populations_vs_time(op1, "gg", np.linspace(0.0, 0.5, 21))
        pops2 = populations_vs_time(op2, "gg", np.linspace(0.0, 0.5, 21))
        assert np.max(np.abs(pops1 - pops2)) < 1e-10


class TestThreeLevel:
    def test_effective_oscillation_frequency(self):
        # dressed-state splitting of the compensated ladder; compares with
        # the eliminated-intermediate coupling omega_r*omega_b/(2*delta)
        op = build_three_level_hamiltonian(LaserConfig())
        w = np.sort(eigh(op.matrix, eigvals_only=True)) / TWO_PI
        splitting = w[1] - w[0]
        assert splitting == pytest.approx(6.993946, abs=1e-4)
        assert splitting == pytest.approx(6.825, rel=0.025)

    def test_time_domain_oscillation(self):
        op = build_three_level_hamiltonian(LaserConfig())
        t_grid = np.linspace(0.0, 0.6, 1201)
        pops = populations_vs_time(op, "g", t_grid)
        p_r, p_p = pops[:, 2], pops[:, 1]
        assert p_r.max() == pytest.approx(0.6732, abs=5e-3)
        # with a square pulse the bare ground state projects onto both
        # dressed states, so the transient p population reaches
        # omega_r^2/(omega_r^2 + delta^2), well above the adiabatic value
        bound = 260.0**2 / (260.0**2 + 400.0**2)
        assert p_p.max() < 1.01 * bound
        assert p_p.max() == pytest.approx(bound, abs=0.02)

    def test_zero_blue_leg_never_populates_r(self):
        op = build_three_level_hamiltonian(LaserConfig(omega_b_mhz=0.0))
        pops = populations_vs_time(op, "g", np.linspace(0.0, 1.0, 51))
        assert pops[:, 2].max() < 1e-20

    def test_frequency_scales_inversely_with_detuning(self):
        def splitting(delta):
            op = build_three_level_hamiltonian(LaserConfig(delta_intermediate_mhz=delta))
            w = np.sort(eigh(op.matrix, eigvals_only=True)) / TWO_PI
            return w[1] - w[0]

        ratio = splitting(400.0) / splitting(4000.0)
        assert ratio == pytest.approx(10.26358, abs=1e-3)
        assert ratio == pytest.approx(10.0, rel=0.03)

    def test_uncompensated_resonance_is_far_detuned(self):
        # without the light-shift compensation the bare two-photon
        # resonance misses the dressed one and transfer collapses
        op = build_three_level_hamiltonian(LaserConfig(), compensate_light_shift=False)
        pops = populations_vs_time(op, "g", np.linspace(0.0, 0.6, 601))
        assert pops[:, 2].max() < 0.03
