"""Transition strengths, Lambda-system discovery and absorption spectra."""

from __future__ import annotations

import numpy as np
import pytest

from zefoz import (
    AxisGrid,
    InvalidParameterError,
    SpectrumParams,
    TransitionOperator,
    absorption_spectrum,
    boltzmann_weights,
    find_lambda_systems,
    ion_levels,
    transition_table,
)

from conftest import local_max_indices


@pytest.fixture(scope="module")
def zefoz_table(levels_at_zefoz):
    ground, excited = levels_at_zefoz
    return transition_table(
        ground, excited, TransitionOperator.s_x(), SpectrumParams()
    )


def _strength(table, g, e):
    for line in table:
        if line.ground_label == g and line.excited_label == e:
            return line.strength
    raise AssertionError(f"line ({g},{e}) missing")


def test_clock_branches_are_equal_eighths(zefoz_table):
    # hand evaluation: <7/2,1/2| Sx |8g> = -1/(2 sqrt 2) and likewise for
    # |10g> up to sign, so both strengths are exactly 1/8
    assert _strength(zefoz_table, 8, 9) == pytest.approx(0.125, abs=1e-6)
    assert _strength(zefoz_table, 10, 9) == pytest.approx(0.125, abs=1e-6)


def test_excited_nine_couples_only_to_the_pair(zefoz_table):
    for g in range(1, 17):
        if g in (8, 10):
            continue
        assert _strength(zefoz_table, g, 9) < 1e-10


def test_identity_operator_gives_no_clock_coupling(levels_at_zefoz):
    ground, excited = levels_at_zefoz
    table = transition_table(
        ground, excited, TransitionOperator.identity(), SpectrumParams()
    )
    assert _strength(table, 8, 9) < 1e-12
    assert _strength(table, 10, 9) < 1e-12


def test_strength_sum_rule(levels_at_zefoz):
    # completeness: sum over excited levels of |<e|O|g>|^2 = <g|O^dag O|g>
    ground, excited = levels_at_zefoz
    for op in (TransitionOperator.s_x(), TransitionOperator.s_plus(),
               TransitionOperator.custom([[0.3, 0.1 + 0.2j], [0.7, -0.4j]])):
        table = transition_table(ground, excited, op, SpectrumParams())
        full = op.full_matrix(8, 2)
        gram = full.conj().T @ full
        for g in range(1, 17):
            total = sum(
                line.strength for line in table if line.ground_label == g
            )
            vec = ground.vector(g)
            expected = float((vec.conj() @ gram @ vec).real)
            assert total == pytest.approx(expected, abs=1e-10)


def test_strength_hermiticity(levels_at_zefoz):
    # |<e|O|g>|^2 computed forward equals |<g|O^dag|e>|^2 computed backward
    ground, excited = levels_at_zefoz
    op = TransitionOperator.custom([[0.2, 0.5 - 0.1j], [0.3 + 0.4j, -0.6]])
    forward = transition_table(ground, excited, op, SpectrumParams())
    dagger = TransitionOperator.custom(
        np.asarray([[0.2, 0.5 - 0.1j], [0.3 + 0.4j, -0.6]]).conj().T
    )
    backward = transition_table(excited, ground, dagger, SpectrumParams())
    for g in (1, 5, 8, 13):
        for e in (2, 9, 16):
            assert _strength(forward, g, e) == pytest.approx(
                _strength(backward, e, g), abs=1e-12
            )


def test_population_weights(levels_at_zefoz, zefoz_table):
    ground, _ = levels_at_zefoz
    weights = {}
    for line in zefoz_table:
        weights[line.ground_label] = line.population_weight
    assert sum(weights.values()) == pytest.approx(1.0, abs=1e-12)
    # colder levels are more populated
    assert weights[1] > weights[16]
    # infinite-temperature limit: uniform populations
    flat = boltzmann_weights(ground.energies, temperature=1e12)
    assert np.max(np.abs(flat - 1.0 / 16.0)) < 1e-6


def test_lambda_discovery_at_the_clock_point(zefoz_table):
    systems = find_lambda_systems(zefoz_table, max_asymmetry=0.01, max_leakage_ratio=0.01)
    match = [
        s for s in systems if (s.ground_a, s.ground_b, s.excited) == (8, 10, 9)
    ]
    assert match, "expected the symmetric 8-10-9 Lambda-system"
    best = match[0]
    assert best.strength_a == pytest.approx(0.125, abs=1e-6)
    assert best.strength_b == pytest.approx(0.125, abs=1e-6)
    assert best.asymmetry < 1e-6
    assert best.splitting == pytest.approx(2087.0, abs=10.0)


def test_lambda_discovery_edge_cases(zefoz_table):
    assert find_lambda_systems([]) == []
    # a floor above 1/8 excludes the clock system
    strict = find_lambda_systems(zefoz_table, min_strength=0.13)
    assert all((s.ground_a, s.ground_b, s.excited) != (8, 10, 9) for s in strict)
    with pytest.raises(InvalidParameterError):
        find_lambda_systems(zefoz_table, max_asymmetry=1.5)


def test_single_line_spectrum_normalization():
    from zefoz import TransitionLine

    line = TransitionLine(
        ground_label=1, excited_label=1, frequency=0.0, strength=0.4,
        population_weight=0.5,
    )
    for profile in ("gaussian", "lorentzian"):
        width = 1200.0 if profile == "lorentzian" else 200.0
        params = SpectrumParams(
            inhom_fwhm=35.0,
            line_profile=profile,
            grid=AxisGrid(-width, width, 80001),
        )
        freqs, depth = absorption_spectrum([line], params)
        area = np.trapezoid(depth, freqs)
        expected = 0.4 * 0.5
        tolerance = 1e-3 if profile == "gaussian" else 0.02  # lorentzian tails
        assert area == pytest.approx(expected, rel=tolerance)


def test_area_conserved_when_width_doubles(zefoz_table):
    grid = AxisGrid(-4000.0, 4000.0, 16001)
    narrow = SpectrumParams(inhom_fwhm=35.0, grid=grid)
    wide = SpectrumParams(inhom_fwhm=70.0, grid=grid)
    f1, d1 = absorption_spectrum(zefoz_table, narrow)
    f2, d2 = absorption_spectrum(zefoz_table, wide)
    a1 = np.trapezoid(d1, f1)
    a2 = np.trapezoid(d2, f2)
    assert a2 == pytest.approx(a1, rel=1e-3)
    # peak height of an isolated line halves; probe the strongest peak
    assert d2.max() < 0.75 * d1.max()


def test_two_resolved_lines_at_60p5_mT(nd_ground, nd_excited):
    # in a longitudinal bias field the two clock branches appear as two
    # well-resolved optical lines separated by the ground splitting
    field = (0.0, 0.0, 60.5)
    ground = ion_levels(nd_ground, field)
    excited = ion_levels(nd_excited, field)
    table = transition_table(ground, excited, TransitionOperator.s_x(), SpectrumParams())
    line1 = excited.energy(9) - ground.energy(10)
    line2 = excited.energy(9) - ground.energy(8)
    separation = line2 - line1
    assert separation == pytest.approx(2090.0, abs=10.0)

    params = SpectrumParams(inhom_fwhm=35.0, grid=AxisGrid(-1700.0, 700.0, 9601))
    freqs, depth = absorption_spectrum(table, params)
    step = freqs[1] - freqs[0]
    maxima = freqs[local_max_indices(depth)]
    for center in (line1, line2):
        assert np.min(np.abs(maxima - center)) < 2.0 * step
        # measure the width of the peak against its own height
        window = (freqs > center - 80.0) & (freqs < center + 80.0)
        local = depth[window]
        half = local.max() / 2.0
        above = local >= half
        width = step * np.count_nonzero(above)
        assert width == pytest.approx(35.0, abs=3.0)


def test_table_requires_matching_dimensions(nd_ground):
    small = ion_levels(
        # spin-1/2 nucleus gives a 4-dimensional space
        nd_ground.__class__(
            electron_spin=0.5, nuclear_spin=0.5, g_par=1.0, g_perp=1.0, A=1.0, B_hf=1.0
        ),
        (0.0, 0.0, 10.0),
    )
    big = ion_levels(nd_ground, (0.0, 0.0, 10.0))
    with pytest.raises(InvalidParameterError):
        transition_table(small, big, TransitionOperator.s_x(), SpectrumParams())


def test_spectrum_requires_grid(zefoz_table):
    with pytest.raises(InvalidParameterError):
        absorption_spectrum(zefoz_table, SpectrumParams())
