"""Transition frequencies versus magnetic field: gradients, curvatures,
stationary-point (ZEFOZ) search and the quadratic field model.

Conventions
-----------
* Frequencies in MHz, fields in mT.
* ``frequency_gradient`` returns MHz/mT.
* ``frequency_curvatures`` returns the coefficient matrix C (kHz/mT^2) of
  the quadratic expansion  w(B0+d) ~= w(B0) + grad.d + d^T C d,
  i.e. HALF the plain second-derivative matrix. The diagonal of C at a
  stationary point gives the curvatures S2i used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidParameterError
from .operators import electron_operator, multiplicity, spin_matrices
from .spins import IonParams, LevelSet, SpinParams, as_field, ion_levels

MANIFOLDS = ("ground", "excited", "optical")


@dataclass(frozen=True)
class AxisGrid:
    """Inclusive 1-D grid specification along one field axis (mT)."""

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise InvalidParameterError(f"grid count must be >= 1, got {self.count}")
        if self.stop < self.start:
            raise InvalidParameterError(
                f"grid stop {self.stop} is below start {self.start}"
            )

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start], dtype=float)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class FieldGrid:
    """Cartesian product of three axis grids."""

    x: AxisGrid
    y: AxisGrid
    z: AxisGrid

    def axis(self, index: int) -> AxisGrid:
        return (self.x, self.y, self.z)[index]

    def free_axes(self) -> list[int]:
        """Axes with more than one grid point (searchable directions)."""
        return [k for k in range(3) if self.axis(k).count > 1]

    def points(self) -> np.ndarray:
        """All grid points, shape (N, 3), x varying slowest."""
        vx, vy, vz = self.x.values(), self.y.values(), self.z.values()
        gx, gy, gz = np.meshgrid(vx, vy, vz, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])

    def contains(self, point: np.ndarray, margin: float = 1e-9) -> bool:
        for k in range(3):
            ax = self.axis(k)
            if not (ax.start - margin <= point[k] <= ax.stop + margin):
                return False
        return True


@dataclass(frozen=True)
class TransitionSelector:
    """Pick a level pair: within one manifold, or one optical line.

    For ``manifold="optical"``, ``level_i`` is the ground label and
    ``level_j`` the excited label.
    """

    manifold: str
    level_i: int
    level_j: int

    def __post_init__(self):
        if self.manifold not in MANIFOLDS:
            raise InvalidParameterError(
                f"manifold must be one of {MANIFOLDS}, got {self.manifold!r}"
            )
        if self.level_i < 1 or self.level_j < 1:
            raise InvalidParameterError("level labels are 1-based positive integers")
        if self.manifold != "optical" and self.level_i == self.level_j:
            raise InvalidParameterError("same-manifold selector needs two distinct levels")


@dataclass(frozen=True)
class GradientResult:
    """Field gradient of a transition frequency (MHz/mT).

    ``vector`` is the Hellmann-Feynman estimate unless the computation was
    flagged (near-degeneracy, or disagreement between the two estimates),
    in which case the central finite-difference value is returned there.
    """

    vector: np.ndarray
    hellmann_feynman: np.ndarray
    finite_difference: np.ndarray
    flagged: bool
    min_gap: float


@dataclass(frozen=True)
class ZefozPoint:
    """A stationary point of a transition frequency in field space.

    ``curvatures`` holds the diagonal quadratic coefficients (S2x, S2y, S2z)
    in kHz/mT^2; ``curvature_matrix`` is the full 3x3 coefficient matrix.
    ``hessian_signature`` is the sign triple of the diagonal (-1, 0, +1).
    """

    field: np.ndarray
    omega0: float
    gradient_residual: float
    curvatures: np.ndarray
    hessian_signature: tuple[int, int, int]
    curvature_matrix: np.ndarray
    selector: TransitionSelector

    @property
    def signature_string(self) -> str:
        return ",".join({1: "+", 0: "0", -1: "-"}[s] for s in self.hessian_signature)


def _split_params(params, sel: TransitionSelector):
    """Resolve which SpinParams serve the selector's manifold(s)."""
    if sel.manifold == "optical":
        if not isinstance(params, IonParams):
            raise InvalidParameterError("optical selector requires IonParams")
        return params.ground, params.excited, params.optical_origin
    if isinstance(params, IonParams):
        single = params.ground if sel.manifold == "ground" else params.excited
    else:
        single = params
    return single, None, 0.0


def _check_labels(sel: TransitionSelector, dim_i: int, dim_j: int):
    if sel.level_i > dim_i or sel.level_j > dim_j:
        raise InvalidParameterError(
            f"selector labels ({sel.level_i}, {sel.level_j}) exceed manifold "
            f"dimensions ({dim_i}, {dim_j})"
        )


def transition_frequency(params, field, sel: TransitionSelector) -> float:
    """Frequency E_j - E_i (MHz) from fresh diagonalization at ``field``.

    Optical selectors return E_excited - E_ground plus the ion's optical
    origin. ``params`` may be a SpinParams (same-manifold selectors) or an
    IonParams (required for optical).
    """
    p_i, p_j, origin = _split_params(params, sel)
    if sel.manifold == "optical":
        lg = ion_levels(p_i, field)
        le = ion_levels(p_j, field)
        _check_labels(sel, lg.dimension, le.dimension)
        return le.energy(sel.level_j) - lg.energy(sel.level_i) + origin
    levels = ion_levels(p_i, field)
    _check_labels(sel, levels.dimension, levels.dimension)
    return levels.energy(sel.level_j) - levels.energy(sel.level_i)


def _zeeman_derivatives(params: SpinParams) -> list[np.ndarray]:
    """dH/dB_i for i = x, y, z; field-independent matrices (MHz/mT)."""
    sx, sy, sz = spin_matrices(params.electron_spin)
    dim_i = multiplicity(params.nuclear_spin)
    return [
        params.g_perp * params.mu_B * electron_operator(sx, dim_i),
        params.g_perp * params.mu_B * electron_operator(sy, dim_i),
        params.g_par * params.mu_B * electron_operator(sz, dim_i),
    ]


def _expectation_gradient(params: SpinParams, levels: LevelSet, label: int) -> np.ndarray:
    vec = levels.vector(label)
    return np.array(
        [float((vec.conj() @ dh @ vec).real) for dh in _zeeman_derivatives(params)]
    )


def _neighbor_gap(levels: LevelSet, label: int) -> float:
    idx = label - 1
    gaps = np.diff(levels.energies)
    near = []
    if idx > 0:
        near.append(gaps[idx - 1])
    if idx < levels.dimension - 1:
        near.append(gaps[idx])
    return float(min(near)) if near else np.inf


def frequency_gradient(
    params,
    field,
    sel: TransitionSelector,
    *,
    step: float = 0.01,
    degeneracy_gap: float = 1e-3,
    consistency_tol: float = 1e-4,
) -> GradientResult:
    """Gradient of the selected transition frequency, cross-checked two ways.

    Computes Hellmann-Feynman expectation values on the eigenstates and
    central finite differences with the given ``step`` (mT). Away from
    level crossings the two must agree to ``consistency_tol`` MHz/mT; if
    they do not, or a connected level sits closer than ``degeneracy_gap``
    MHz to a neighbor, the result is flagged and the finite-difference
    estimate is used.
    """
    if step <= 0:
        raise InvalidParameterError(f"step must be positive, got {step}")
    b = as_field(field)
    p_i, p_j, _ = _split_params(params, sel)
    if sel.manifold == "optical":
        lg = ion_levels(p_i, b)
        le = ion_levels(p_j, b)
        _check_labels(sel, lg.dimension, le.dimension)
        hf = _expectation_gradient(p_j, le, sel.level_j) - _expectation_gradient(
            p_i, lg, sel.level_i
        )
        min_gap = min(_neighbor_gap(lg, sel.level_i), _neighbor_gap(le, sel.level_j))
    else:
        levels = ion_levels(p_i, b)
        _check_labels(sel, levels.dimension, levels.dimension)
        hf = _expectation_gradient(p_i, levels, sel.level_j) - _expectation_gradient(
            p_i, levels, sel.level_i
        )
        min_gap = min(
            _neighbor_gap(levels, sel.level_i), _neighbor_gap(levels, sel.level_j)
        )

    fd = np.zeros(3)
    for k in range(3):
        offset = np.zeros(3)
        offset[k] = step
        fd[k] = (
            transition_frequency(params, b + offset, sel)
            - transition_frequency(params, b - offset, sel)
        ) / (2.0 * step)

    flagged = min_gap < degeneracy_gap or bool(np.max(np.abs(hf - fd)) > consistency_tol)
    vector = fd if flagged else hf
    return GradientResult(
        vector=vector,
        hellmann_feynman=hf,
        finite_difference=fd,
        flagged=flagged,
        min_gap=min_gap,
    )


def frequency_curvatures(
    params, field, sel: TransitionSelector, *, step: float = 0.5
) -> np.ndarray:
    """Quadratic-expansion coefficient matrix C in kHz/mT^2.

    Central second differences with one Richardson extrapolation level
    (steps ``step`` and ``step/2``). C equals half the plain Hessian, so
    its diagonal at a stationary point reproduces the curvatures S2i of
    the quadratic model directly.
    """
    if step < 1e-4:
        raise InvalidParameterError(
            f"curvature step collapsed below 1e-4 mT (got {step})"
        )
    b = as_field(field)

    def freq(point: np.ndarray) -> float:
        return transition_frequency(params, point, sel)

    f0 = freq(b)

    def second_diag(axis: int, h: float) -> float:
        e = np.zeros(3)
        e[axis] = h
        return (freq(b + e) - 2.0 * f0 + freq(b - e)) / h**2

    def second_mixed(a1: int, a2: int, h: float) -> float:
        e1 = np.zeros(3)
        e2 = np.zeros(3)
        e1[a1] = h
        e2[a2] = h
        return (
            freq(b + e1 + e2) - freq(b + e1 - e2) - freq(b - e1 + e2) + freq(b - e1 - e2)
        ) / (4.0 * h**2)

    def richardson(fn, *args) -> float:
        coarse = fn(*args, step)
        fine = fn(*args, step / 2.0)
        return (4.0 * fine - coarse) / 3.0

    raw = np.zeros((3, 3))
    for k in range(3):
        raw[k, k] = richardson(second_diag, k)
    for a1 in range(3):
        for a2 in range(a1 + 1, 3):
            m = richardson(second_mixed, a1, a2)
            raw[a1, a2] = raw[a2, a1] = m
    return raw / 2.0 * 1000.0  # half-convention, MHz -> kHz


def quadratic_model(z: ZefozPoint, delta_field) -> float:
    """w0 + sum_i S2i * dBi^2, curvatures converted from kHz to MHz."""
    d = np.asarray(delta_field, dtype=float)
    return float(z.omega0 + np.sum(z.curvatures * 1e-3 * d**2))


def _free_gradient(params, point, sel, free: list[int]) -> np.ndarray:
    return frequency_gradient(params, point, sel).vector[free]


def _newton_refine(
    params,
    sel: TransitionSelector,
    start: np.ndarray,
    bounds: FieldGrid,
    free: list[int],
    tol: float,
    max_iter: int,
) -> np.ndarray | None:
    """Damped Newton root-finding on the free gradient components."""
    point = start.copy()
    grad = _free_gradient(params, point, sel, free)
    for _ in range(max_iter):
        if np.max(np.abs(grad)) <= tol:
            return point
        curv = frequency_curvatures(params, point, sel)
        jac = 2.0 * curv[np.ix_(free, free)] * 1e-3  # raw Hessian, MHz/mT^2
        try:
            if np.linalg.cond(jac) > 1e10:
                raise np.linalg.LinAlgError("near-singular")
            delta = np.linalg.solve(jac, -grad)
        except np.linalg.LinAlgError:
            # coordinate-descent fallback on the diagonal curvature
            diag = np.diag(jac)
            safe = np.where(np.abs(diag) > 1e-12, diag, np.inf)
            delta = -grad / safe
        if not np.all(np.isfinite(delta)):
            return None
        # damping: accept the first step that shrinks the gradient norm
        improved = False
        for damp in (1.0, 0.5, 0.25, 0.125, 0.0625):
            trial = point.copy()
            trial[free] += damp * delta
            for k in free:  # clip into bounds
                ax = bounds.axis(k)
                trial[k] = min(max(trial[k], ax.start), ax.stop)
            trial_grad = _free_gradient(params, trial, sel, free)
            if np.max(np.abs(trial_grad)) < np.max(np.abs(grad)):
                point, grad = trial, trial_grad
                improved = True
                break
        if not improved:
            break
    return point if np.max(np.abs(grad)) <= tol else None


def zefoz_search(
    params,
    sel: TransitionSelector,
    initial_field,
    bounds: FieldGrid,
    tol: float = 1e-6,
    *,
    max_iter: int = 60,
) -> list[ZefozPoint]:
    """Locate stationary points of the selected transition frequency.

    A coarse scan over ``bounds`` brackets sign changes of the gradient
    along every free axis; each bracket (plus ``initial_field``) seeds a
    damped Newton refinement of grad w = 0. Stationary points of any
    Hessian signature are reported (field-insensitive transitions are
    generically saddle points). Returns all distinct points found inside
    the bounds, sorted by gradient residual; an empty list means none.
    """
    if tol <= 0:
        raise InvalidParameterError(f"tol must be positive, got {tol}")
    start = as_field(initial_field)
    if not bounds.contains(start):
        raise InvalidParameterError("initial field lies outside the search bounds")
    free = bounds.free_axes()
    if not free:
        raise InvalidParameterError("search bounds leave no free axis to vary")

    grid_points = bounds.points()
    grads = np.array([_free_gradient(params, p, sel, free) for p in grid_points])

    seeds = [start]
    # bracket sign changes along each free axis of the rectangular grid
    shape = tuple(bounds.axis(k).count for k in range(3))
    grads_nd = grads.reshape(shape + (len(free),))
    points_nd = grid_points.reshape(shape + (3,))
    for fi, axis in enumerate(free):
        g_ax = np.moveaxis(grads_nd[..., fi], axis, 0)
        p_ax = np.moveaxis(points_nd, axis, 0)
        sign_change = g_ax[:-1] * g_ax[1:] < 0
        for idx in np.argwhere(sign_change):
            lead = tuple(idx)
            lo = p_ax[lead]
            hi = p_ax[(idx[0] + 1,) + lead[1:]]
            seeds.append((lo + hi) / 2.0)

    found: list[ZefozPoint] = []
    for seed in seeds:
        solution = _newton_refine(params, sel, seed, bounds, free, tol, max_iter)
        if solution is None or not bounds.contains(solution, margin=1e-6):
            continue
        if any(np.max(np.abs(solution - z.field)) < 1e-6 for z in found):
            continue
        grad = frequency_gradient(params, solution, sel).vector
        residual = float(np.max(np.abs(grad[free])))
        if residual > tol:
            continue
        curv = frequency_curvatures(params, solution, sel)
        diag = np.diag(curv).copy()
        signature = tuple(int(np.sign(round(c, 6))) for c in diag)
        found.append(
            ZefozPoint(
                field=solution,
                omega0=transition_frequency(params, solution, sel),
                gradient_residual=residual,
                curvatures=diag,
                hessian_signature=signature,
                curvature_matrix=curv,
                selector=sel,
            )
        )
    found.sort(key=lambda z: z.gradient_residual)
    return found


@dataclass
class LevelDiagram:
    """Energies of every level across a 1-D field grid, identity-tracked.

    Rows of ``energies`` follow the grid; columns follow the level labels
    assigned at the first grid point (ascending there). Tracking maximizes
    eigenvector overlap between adjacent points so curves keep their
    identity through crossings. ``low_overlap[k]`` is set when the best
    overlap at step k fell below the tracking threshold.
    """

    field_points: np.ndarray
    energies: np.ndarray
    low_overlap: np.ndarray


def level_diagram(
    params,
    grid: FieldGrid,
    manifold: str = "ground",
    *,
    overlap_threshold: float = 0.6,
) -> LevelDiagram:
    """Track the full level structure along a single-axis field grid."""
    if manifold not in ("ground", "excited"):
        raise InvalidParameterError("level_diagram maps one manifold: ground or excited")
    free = grid.free_axes()
    if len(free) > 1:
        raise InvalidParameterError("level diagram requires a 1-D field grid")
    single = params
    if isinstance(params, IonParams):
        single = params.ground if manifold == "ground" else params.excited

    points = grid.points()
    first = ion_levels(single, points[0])
    dim = first.dimension
    energies = np.zeros((len(points), dim))
    flags = np.zeros(len(points), dtype=bool)
    energies[0] = first.energies
    prev_vectors = first.eigenvectors

    for k in range(1, len(points)):
        levels = ion_levels(single, points[k])
        overlap = np.abs(prev_vectors.conj().T @ levels.eigenvectors)
        rows, cols = linear_sum_assignment(-overlap)
        order = np.empty(dim, dtype=int)
        order[rows] = cols
        energies[k] = levels.energies[order]
        prev_vectors = levels.eigenvectors[:, order]
        if float(overlap[rows, cols].min()) < overlap_threshold:
            flags[k] = True
    return LevelDiagram(field_points=points, energies=energies, low_overlap=flags)
