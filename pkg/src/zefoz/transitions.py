"""Optical transition strengths, symmetric Lambda-system discovery and
Boltzmann-weighted absorption spectra.

The optical operator acts on the electron spin only; the nuclear spin is a
spectator. The default sigma-polarization operator is Sx (x) 1_nuclear,
the minimal electron-spin-flip model: it couples each excited sublevel
only to ground sublevels sharing its nuclear composition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError
from .fieldmap import AxisGrid
from .operators import spin_matrices
from .spins import LevelSet

# Boltzmann constant expressed in MHz per kelvin (k_B / h).
BOLTZMANN_MHZ_PER_K = 2.08366e4

OPERATOR_KINDS = ("identity", "S_x", "S_y", "S_z", "S_plus", "S_minus", "custom")
LINE_PROFILES = ("gaussian", "lorentzian")


@dataclass(frozen=True)
class TransitionOperator:
    """Effective optical operator: an electron-spin part times nuclear identity."""

    kind: str
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise InvalidParameterError(
                f"operator kind must be one of {OPERATOR_KINDS}, got {self.kind!r}"
            )
        if self.kind == "custom":
            if self.matrix is None:
                raise InvalidParameterError("custom operator needs a matrix")
            m = np.asarray(self.matrix)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise InvalidParameterError("custom operator matrix must be square")

    @classmethod
    def s_x(cls) -> "TransitionOperator":
        return cls("S_x")

    @classmethod
    def s_y(cls) -> "TransitionOperator":
        return cls("S_y")

    @classmethod
    def s_z(cls) -> "TransitionOperator":
        return cls("S_z")

    @classmethod
    def s_plus(cls) -> "TransitionOperator":
        return cls("S_plus")

    @classmethod
    def s_minus(cls) -> "TransitionOperator":
        return cls("S_minus")

    @classmethod
    def identity(cls) -> "TransitionOperator":
        return cls("identity")

    @classmethod
    def custom(cls, matrix) -> "TransitionOperator":
        return cls("custom", matrix=np.asarray(matrix, dtype=complex))

    def electron_matrix(self, electron_dim: int) -> np.ndarray:
        spin = (electron_dim - 1) / 2.0
        sx, sy, sz = spin_matrices(spin)
        if self.kind == "identity":
            return np.eye(electron_dim, dtype=complex)
        if self.kind == "S_x":
            return sx
        if self.kind == "S_y":
            return sy
        if self.kind == "S_z":
            return sz
        if self.kind == "S_plus":
            return sx + 1j * sy
        if self.kind == "S_minus":
            return sx - 1j * sy
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (electron_dim, electron_dim):
            raise InvalidParameterError(
                f"custom operator is {m.shape}, electron space is "
                f"({electron_dim}, {electron_dim})"
            )
        return m

    def full_matrix(self, nuclear_dim: int, electron_dim: int) -> np.ndarray:
        return np.kron(np.eye(nuclear_dim), self.electron_matrix(electron_dim))


@dataclass(frozen=True)
class SpectrumParams:
    """Knobs for spectrum synthesis.

    ``inhom_fwhm`` is the optical inhomogeneous width in MHz; 35 is typical
    with a bias field applied, 70 without one. ``grid`` samples the output
    frequency axis (MHz relative to the optical origin).
    """

    temperature: float = 2.0
    inhom_fwhm: float = 35.0
    line_profile: str = "gaussian"
    grid: AxisGrid | None = None
    boltzmann_constant: float = BOLTZMANN_MHZ_PER_K

    def __post_init__(self):
        if not self.temperature > 0:
            raise InvalidParameterError("temperature must be positive")
        if not self.inhom_fwhm > 0:
            raise InvalidParameterError("inhom_fwhm must be positive")
        if self.line_profile not in LINE_PROFILES:
            raise InvalidParameterError(
                f"line_profile must be one of {LINE_PROFILES}, got {self.line_profile!r}"
            )
        if not self.boltzmann_constant > 0:
            raise InvalidParameterError("boltzmann_constant must be positive")


@dataclass(frozen=True)
class TransitionLine:
    ground_label: int
    excited_label: int
    frequency: float
    strength: float
    population_weight: float


@dataclass(frozen=True)
class LambdaSystem:
    """Two ground sublevels coupled to one excited sublevel.

    ``leakage`` is the strongest transition from the excited level to any
    other ground level; ``asymmetry`` is |sa - sb| / (sa + sb);
    ``splitting`` the two-photon frequency difference in MHz.
    """

    ground_a: int
    ground_b: int
    excited: int
    strength_a: float
    strength_b: float
    leakage: float
    asymmetry: float
    splitting: float


def boltzmann_weights(
    energies: np.ndarray, temperature: float, boltzmann_constant: float = BOLTZMANN_MHZ_PER_K
) -> np.ndarray:
    """Normalized thermal populations for energies in MHz."""
    e = np.asarray(energies, dtype=float)
    w = np.exp(-(e - e.min()) / (boltzmann_constant * temperature))
    return w / w.sum()


def transition_table(
    ground: LevelSet,
    excited: LevelSet,
    op: TransitionOperator,
    spectrum: SpectrumParams,
    optical_origin: float = 0.0,
) -> list[TransitionLine]:
    """All ground->excited lines: |<e|O|g>|^2, frequency, thermal weight.

    Ground and excited level sets must come from the same field point and
    share one Hilbert-space dimension.
    """
    if ground.dimension != excited.dimension:
        raise InvalidParameterError(
            f"mismatched Hilbert dimensions: ground {ground.dimension}, "
            f"excited {excited.dimension}"
        )
    if ground.basis is None or excited.basis is None:
        raise InvalidParameterError(
            "level sets need product-basis labels; build them via ion_levels()"
        )
    dim = ground.dimension
    electron_dim = len({b[1] for b in ground.basis})
    nuclear_dim = dim // electron_dim
    full_op = op.full_matrix(nuclear_dim, electron_dim)
    overlap = excited.eigenvectors.conj().T @ full_op @ ground.eigenvectors
    strengths = np.abs(overlap) ** 2
    weights = boltzmann_weights(
        ground.energies, spectrum.temperature, spectrum.boltzmann_constant
    )
    lines = []
    for g in range(dim):
        for e in range(dim):
            lines.append(
                TransitionLine(
                    ground_label=g + 1,
                    excited_label=e + 1,
                    frequency=float(excited.energies[e] - ground.energies[g] + optical_origin),
                    strength=float(strengths[e, g]),
                    population_weight=float(weights[g]),
                )
            )
    return lines


def find_lambda_systems(
    table: Sequence[TransitionLine],
    max_asymmetry: float = 0.01,
    max_leakage_ratio: float = 0.01,
    min_strength: float = 1e-6,
) -> list[LambdaSystem]:
    """Triples (g_a, g_b, e) forming near-symmetric Lambda configurations.

    Keeps triples whose two strengths both reach ``min_strength``, whose
    asymmetry stays below ``max_asymmetry`` and whose leakage relative to
    the weaker branch stays below ``max_leakage_ratio``. Sorted best-first
    by (asymmetry, -weaker strength).
    """
    for name, value in (
        ("max_asymmetry", max_asymmetry),
        ("max_leakage_ratio", max_leakage_ratio),
    ):
        if not 0.0 <= value <= 1.0:
            raise InvalidParameterError(f"{name} must lie in [0, 1], got {value!r}")
    if min_strength < 0:
        raise InvalidParameterError("min_strength must be non-negative")

    strengths: dict[tuple[int, int], float] = {}
    freqs: dict[tuple[int, int], float] = {}
    ground_labels: set[int] = set()
    excited_labels: set[int] = set()
    for line in table:
        key = (line.ground_label, line.excited_label)
        strengths[key] = line.strength
        freqs[key] = line.frequency
        ground_labels.add(line.ground_label)
        excited_labels.add(line.excited_label)

    systems = []
    grounds = sorted(ground_labels)
    for e in sorted(excited_labels):
        branch = {g: strengths.get((g, e), 0.0) for g in grounds}
        for ai, a in enumerate(grounds):
            sa = branch[a]
            if sa < min_strength:
                continue
            for b in grounds[ai + 1 :]:
                sb = branch[b]
                if sb < min_strength:
                    continue
                total = sa + sb
                if total <= 0.0:
                    continue
                asym = abs(sa - sb) / total
                if asym > max_asymmetry:
                    continue
                leak = max(
                    (branch[g] for g in grounds if g not in (a, b)), default=0.0
                )
                if leak > max_leakage_ratio * min(sa, sb):
                    continue
                systems.append(
                    LambdaSystem(
                        ground_a=a,
                        ground_b=b,
                        excited=e,
                        strength_a=sa,
                        strength_b=sb,
                        leakage=leak,
                        asymmetry=asym,
                        splitting=abs(freqs[(a, e)] - freqs[(b, e)]),
                    )
                )
    systems.sort(key=lambda s: (s.asymmetry, -min(s.strength_a, s.strength_b)))
    return systems


def gaussian_profile(x: np.ndarray, center: float, fwhm: float) -> np.ndarray:
    """Unit-area Gaussian of the given FWHM."""
    sigma = fwhm / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    return np.exp(-((x - center) ** 2) / (2.0 * sigma**2)) / (sigma * np.sqrt(2.0 * np.pi))


def lorentzian_profile(x: np.ndarray, center: float, fwhm: float) -> np.ndarray:
    """Unit-area Lorentzian of the given FWHM."""
    hw = fwhm / 2.0
    return hw / np.pi / ((x - center) ** 2 + hw**2)


def absorption_spectrum(
    table: Sequence[TransitionLine], spectrum: SpectrumParams
) -> tuple[np.ndarray, np.ndarray]:
    """Relative optical depth on the spectrum grid.

    Each line contributes strength x population weight x a unit-area
    profile of FWHM ``inhom_fwhm`` at the line frequency. The vertical
    scale is relative; absolute absorption is not modelled.
    """
    if spectrum.grid is None:
        raise InvalidParameterError("spectrum grid is required for synthesis")
    freqs = spectrum.grid.values()
    shape = gaussian_profile if spectrum.line_profile == "gaussian" else lorentzian_profile
    depth = np.zeros_like(freqs)
    for line in table:
        amplitude = line.strength * line.population_weight
        if amplitude == 0.0:
            continue
        depth += amplitude * shape(freqs, line.frequency, spectrum.inhom_fwhm)
    return freqs, depth
