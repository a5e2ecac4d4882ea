"""Effective spin Hamiltonian of a Kramers doublet coupled to its nucleus.

The model for one electronic state is

    H = g_par*mu_B*Bz*Sz + g_perp*mu_B*(Bx*Sx + By*Sy)
        + A*Iz*Sz + B_hf*(Ix*Sx + Iy*Sy)
        + P*(Iz^2 - I(I+1)/3)

with energies in MHz, magnetic fields in mT and mu_B in MHz/mT. The z axis
is the crystal symmetry axis. Eigenstates are expressed in the |M_I, M_S>
product basis (M_I outer descending, M_S inner descending).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ComputationError, InvalidParameterError
from .operators import (
    electron_operator,
    is_half_integer,
    multiplicity,
    nuclear_operator,
    product_basis,
    spin_matrices,
)

# Rounded frequency-unit Bohr magneton conventionally used for this ion
# family; the CODATA value is 13.996245 MHz/mT.
BOHR_MAGNETON_MHZ_PER_MT = 14.0


@dataclass(frozen=True)
class SpinParams:
    """Parameter set of the effective Hamiltonian for one electronic state.

    ``A`` and ``B_hf`` are the axial and transverse hyperfine constants in
    MHz, ``P`` the quadrupole constant in MHz, ``g_par``/``g_perp`` the
    g-factor components along/perpendicular to z, and ``mu_B`` the Bohr
    magneton in MHz/mT.
    """

    electron_spin: float
    nuclear_spin: float
    g_par: float
    g_perp: float
    A: float
    B_hf: float
    P: float = 0.0
    mu_B: float = BOHR_MAGNETON_MHZ_PER_MT

    def __post_init__(self):
        if not is_half_integer(self.electron_spin) or self.electron_spin < 0.5:
            raise InvalidParameterError(
                f"electron_spin must be a half-integer >= 1/2, got {self.electron_spin!r}"
            )
        if not is_half_integer(self.nuclear_spin) or self.nuclear_spin < 0.0:
            raise InvalidParameterError(
                f"nuclear_spin must be a non-negative half-integer, got {self.nuclear_spin!r}"
            )
        if not (self.mu_B > 0.0):
            raise InvalidParameterError(f"mu_B must be positive, got {self.mu_B!r}")
        for name in ("g_par", "g_perp", "A", "B_hf", "P"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")

    @property
    def dimension(self) -> int:
        return multiplicity(self.electron_spin) * multiplicity(self.nuclear_spin)


@dataclass(frozen=True)
class FieldVector:
    """Applied dc magnetic field in mT, z along the crystal axis."""

    bx: float
    by: float
    bz: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.bx, self.by, self.bz])):
            raise InvalidParameterError("field components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz], dtype=float)


def as_field(field) -> np.ndarray:
    """Coerce a FieldVector or length-3 sequence into a float array (mT)."""
    if isinstance(field, FieldVector):
        return field.as_array()
    arr = np.asarray(field, dtype=float)
    if arr.shape != (3,):
        raise InvalidParameterError(f"field must have 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("field components must be finite")
    return arr


@dataclass(frozen=True)
class IonParams:
    """Ground and excited parameter sets of one ion plus an optical origin.

    ``optical_origin`` (MHz) is added to optical transition frequencies;
    absolute optical frequencies are otherwise not modelled.
    """

    ground: SpinParams
    excited: SpinParams
    optical_origin: float = 0.0


class StateComponent(NamedTuple):
    m_i: float
    m_s: float
    amplitude: complex


@dataclass
class LevelSet:
    """Sorted eigenenergies (MHz) and gauge-fixed eigenvectors.

    ``eigenvectors[:, k]`` belongs to ``energies[k]``; ``labels`` are 1-based
    and ascend with energy. ``basis`` lists (M_I, M_S) per product-basis
    index when the dimensions of a spin pair were supplied.
    """

    energies: np.ndarray
    eigenvectors: np.ndarray
    labels: np.ndarray
    basis: list[tuple[float, float]] | None = None

    @property
    def dimension(self) -> int:
        return self.energies.size

    def energy(self, label: int) -> float:
        return float(self.energies[self._index(label)])

    def vector(self, label: int) -> np.ndarray:
        return self.eigenvectors[:, self._index(label)]

    def _index(self, label: int) -> int:
        if not 1 <= label <= self.dimension:
            raise InvalidParameterError(
                f"level label {label} outside 1..{self.dimension}"
            )
        return label - 1


def build_hamiltonian(params: SpinParams, field) -> np.ndarray:
    """Assemble the effective Hamiltonian matrix (MHz) at the given field.

    The result is exactly Hermitian by construction and traceless whenever
    the quadrupole term enters through its traceless form.
    """
    b = as_field(field)
    sx, sy, sz = spin_matrices(params.electron_spin)
    ix, iy, iz = spin_matrices(params.nuclear_spin)
    dim_s = multiplicity(params.electron_spin)
    dim_i = multiplicity(params.nuclear_spin)

    h = params.g_par * params.mu_B * b[2] * electron_operator(sz, dim_i)
    h = h + params.g_perp * params.mu_B * (
        b[0] * electron_operator(sx, dim_i) + b[1] * electron_operator(sy, dim_i)
    )
    h = h + params.A * np.kron(iz, sz)
    h = h + params.B_hf * (np.kron(ix, sx) + np.kron(iy, sy))
    if params.P != 0.0:
        i_val = params.nuclear_spin
        quad = iz @ iz - i_val * (i_val + 1.0) / 3.0 * np.eye(dim_i)
        h = h + params.P * nuclear_operator(quad, dim_s)
    return h


def _gauge_fix(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column's phase so its largest component is real >= 0."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, k])))
        pivot = out[idx, k]
        mag = abs(pivot)
        if mag > 0.0:
            out[:, k] *= pivot.conjugate() / mag
    return out


def _degenerate_clusters(energies: np.ndarray, gap: float) -> list[slice]:
    clusters = []
    start = 0
    for k in range(1, energies.size + 1):
        if k == energies.size or energies[k] - energies[k - 1] >= gap:
            if k - start > 1:
                clusters.append(slice(start, k))
            start = k
    return clusters


def diagonalize(
    hamiltonian: np.ndarray,
    *,
    basis: list[tuple[float, float]] | None = None,
    hermiticity_tol: float = 1e-12,
    degeneracy_gap: float = 1e-6,
) -> LevelSet:
    """Full eigen-decomposition of a Hermitian matrix, sorted ascending.

    Eigenvectors are gauge-fixed (largest component real and non-negative).
    Within clusters closer than ``degeneracy_gap`` MHz the individual
    vectors are not physically meaningful; they are re-orthonormalized and
    gauge-fixed but only the spanned subspace should be relied on.
    """
    h = np.asarray(hamiltonian, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidParameterError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))))
    residual = float(np.max(np.abs(h - h.conj().T)))
    if residual > hermiticity_tol * scale:
        raise ComputationError(
            f"matrix is not Hermitian: residual {residual:.3e} exceeds "
            f"{hermiticity_tol:.1e} relative"
        )
    energies, vectors = np.linalg.eigh(h)
    for cluster in _degenerate_clusters(energies, degeneracy_gap):
        block, _ = np.linalg.qr(vectors[:, cluster])
        vectors[:, cluster] = block
    vectors = _gauge_fix(vectors)
    labels = np.arange(1, energies.size + 1)
    if basis is not None and len(basis) != energies.size:
        raise InvalidParameterError(
            f"basis has {len(basis)} labels for dimension {energies.size}"
        )
    return LevelSet(energies=energies, eigenvectors=vectors, labels=labels, basis=basis)


def ion_levels(params: SpinParams, field) -> LevelSet:
    """Diagonalize one electronic state at a field, with basis labels."""
    h = build_hamiltonian(params, field)
    labels = product_basis(params.nuclear_spin, params.electron_spin)
    return diagonalize(h, basis=labels)


def state_composition(
    levels: LevelSet, label: int, threshold: float = 0.0
) -> list[StateComponent]:
    """Product-basis components of one eigenstate, sorted by |amplitude|.

    Returns every component with magnitude strictly above ``threshold``.
    With ``threshold=0`` the squared magnitudes of the returned list sum
    to one.
    """
    if not 0.0 <= threshold < 1.0:
        raise InvalidParameterError(f"threshold must lie in [0, 1), got {threshold!r}")
    if levels.basis is None:
        raise InvalidParameterError(
            "level set carries no product-basis labels; build it via ion_levels()"
        )
    vec = levels.vector(label)
    order = np.argsort(-np.abs(vec), kind="stable")
    out = []
    for idx in order:
        amp = vec[idx]
        if abs(amp) > threshold:
            m_i, m_s = levels.basis[idx]
            out.append(StateComponent(m_i=m_i, m_s=m_s, amplitude=complex(amp)))
    return out
