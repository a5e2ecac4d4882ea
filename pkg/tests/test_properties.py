"""Randomized numerical-hygiene properties.

Sampling is seeded so the suite is deterministic. "Non-degenerate" means
every level adjacent to the selected pair sits at least 5 MHz away; near
crossings the finite-difference reference itself loses accuracy, which is
exactly the regime the gradient routine flags and falls back on.
"""

from __future__ import annotations

import numpy as np

from zefoz import (
    SpinParams,
    TransitionOperator,
    TransitionSelector,
    SpectrumParams,
    build_hamiltonian,
    diagonalize,
    frequency_gradient,
    ion_levels,
    transition_table,
)


def random_params(rng) -> SpinParams:
    return SpinParams(
        electron_spin=0.5,
        nuclear_spin=3.5,
        g_par=rng.uniform(0.1, 3.0),
        g_perp=rng.uniform(0.0, 3.0),
        A=rng.uniform(-900.0, 900.0),
        B_hf=rng.uniform(-900.0, 900.0),
        P=rng.uniform(-50.0, 50.0),
    )


def gradient_deviations(n_samples: int, seed: int, min_gap: float = 5.0):
    """Max |Hellmann-Feynman - finite-difference| per random sample."""
    rng = np.random.default_rng(seed)
    deviations = []
    while len(deviations) < n_samples:
        params = random_params(rng)
        field = rng.uniform(-100.0, 100.0, 3)
        i, j = sorted(rng.choice(16, size=2, replace=False) + 1)
        levels = ion_levels(params, field)
        gaps = np.diff(levels.energies)
        neighbors = []
        for label in (i, j):
            if label > 1:
                neighbors.append(gaps[label - 2])
            if label < 16:
                neighbors.append(gaps[label - 1])
        if min(neighbors) < min_gap:
            continue
        # a small step keeps finite-difference truncation well below the
        # 1e-4 agreement bound even for sharp avoided crossings that pass
        # the gap filter; roundoff stays two decades lower still
        sel = TransitionSelector("ground", int(i), int(j))
        result = frequency_gradient(params, field, sel, step=0.002)
        deviations.append(
            float(np.max(np.abs(result.hellmann_feynman - result.finite_difference)))
        )
    return np.array(deviations)


def test_gradient_cross_check_on_random_samples():
    deviations = gradient_deviations(n_samples=1000, seed=20240521)
    assert deviations.max() < 1e-4


def test_eigenvector_unitarity_on_random_samples():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(200):
        params = random_params(rng)
        levels = ion_levels(params, rng.uniform(-100.0, 100.0, 3))
        v = levels.eigenvectors
        worst = max(worst, float(np.max(np.abs(v.conj().T @ v - np.eye(16)))))
    assert worst < 1e-10


def test_trace_conservation_on_random_samples():
    rng = np.random.default_rng(1234)
    for _ in range(200):
        params = random_params(rng)
        h = build_hamiltonian(params, rng.uniform(-100.0, 100.0, 3))
        levels = diagonalize(h)
        scale = max(1.0, float(np.sum(np.abs(levels.energies))))
        assert abs(np.sum(levels.energies) - np.trace(h).real) < 1e-9 * scale


def test_strength_sum_rule_on_random_samples():
    rng = np.random.default_rng(777)
    worst = 0.0
    for _ in range(40):
        ground = ion_levels(random_params(rng), rng.uniform(-80.0, 80.0, 3))
        excited = ion_levels(random_params(rng), rng.uniform(-80.0, 80.0, 3))
        raw = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        op = TransitionOperator.custom(raw)
        table = transition_table(ground, excited, op, SpectrumParams())
        full = op.full_matrix(8, 2)
        gram = full.conj().T @ full
        for g in range(1, 17):
            total = sum(line.strength for line in table if line.ground_label == g)
            vec = ground.vector(g)
            expected = float((vec.conj() @ gram @ vec).real)
            worst = max(worst, abs(total - expected))
    assert worst < 1e-10


def test_gradient_rotational_invariance_on_random_samples():
    # eigenvalues depend only on the transverse magnitude, so swapping the
    # transverse components leaves every transition frequency unchanged
    rng = np.random.default_rng(31415)
    for _ in range(50):
        params = random_params(rng)
        b, bz = rng.uniform(0.0, 50.0), rng.uniform(-80.0, 80.0)
        e1 = ion_levels(params, (b, 0.0, bz)).energies
        e2 = ion_levels(params, (0.0, b, bz)).energies
        assert np.max(np.abs(e1 - e2)) < 1e-9
