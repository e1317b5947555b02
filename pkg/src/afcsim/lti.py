"""Small dense continuous-time LTI systems: series composition, frequency
response, H-infinity norms, and the loop robustness certificate.

Everything here is sized for controller-analysis work (state dimensions up
to a few tens), so plain dense LAPACK routines via numpy are used throughout.
All objects are immutable after construction and safe to share.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "StateSpaceModel",
    "RobustnessCertificate",
    "FrequencyAtPoleError",
    "UnstableSystemError",
    "IllPosedLoopError",
    "HinfConvergenceError",
    "static_gain",
    "identity",
    "siso",
    "series",
    "freq_response",
    "is_stable",
    "hinf_norm",
    "closed_loop_tzw",
    "robustness_margin",
]

# Strictness margin for is_stable: eigenvalue real parts must be < -STABILITY_MARGIN.
STABILITY_MARGIN = 0.0

# Seed grid for the norm bisection lower bound, rad/s.
_INIT_GRID = np.logspace(-3.0, 3.0, 400)

# An eigenvalue counts as imaginary-axis when |Re| < _IMAG_AXIS_RTOL * (1 + |lambda|).
_IMAG_AXIS_RTOL = 1e-8

_MAX_BISECTIONS = 200


class FrequencyAtPoleError(ValueError):
    """Frequency response requested at (or numerically at) a pole."""


class UnstableSystemError(ValueError):
    """Operation requires a stable system."""


class IllPosedLoopError(ValueError):
    """Feedback loop with a singular static loop matrix."""


class HinfConvergenceError(RuntimeError):
    """Norm bisection failed to converge; carries the best bracket."""

    def __init__(self, message: str, lower: float, upper: float):
        super().__init__(f"{message} (best bracket [{lower:.9e}, {upper:.9e}])")
        self.lower = lower
        self.upper = upper


def _matrix(value, name: str) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(value, dtype=float))
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={arr.ndim}")
    return arr


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """Realization dx/dt = A x + B u, y = C x + D u.

    A zero-state model (A is 0 x 0) encodes the static gain D.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        a = _matrix(self.A, "A") if np.size(self.A) else np.asarray(self.A, float).reshape(0, 0)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError(f"A must be square, got shape {a.shape}")
        b = np.asarray(self.B, dtype=float)
        c = np.asarray(self.C, dtype=float)
        d = _matrix(self.D, "D")
        if b.ndim != 2:
            raise ValueError(f"B must be a 2-D matrix, got ndim={b.ndim}")
        if c.ndim != 2:
            raise ValueError(f"C must be a 2-D matrix, got ndim={c.ndim}")
        p, m = d.shape
        if b.shape != (n, m):
            raise ValueError(f"B must be {n}x{m} to match A and D, got {b.shape}")
        if c.shape != (p, n):
            raise ValueError(f"C must be {p}x{n} to match A and D, got {c.shape}")
        for name, arr in (("A", a), ("B", b), ("C", c), ("D", d)):
            if arr.size and not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.D.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.D.shape[0]

    def __repr__(self):
        return (f"StateSpaceModel(n_states={self.n_states}, "
                f"n_inputs={self.n_inputs}, n_outputs={self.n_outputs})")


def static_gain(d) -> StateSpaceModel:
    """Zero-state model realizing the constant gain matrix d."""
    d = _matrix(d, "D")
    p, m = d.shape
    return StateSpaceModel(np.zeros((0, 0)), np.zeros((0, m)), np.zeros((p, 0)), d)


def identity(m: int) -> StateSpaceModel:
    """Static identity on m channels."""
    return static_gain(np.eye(m))


def siso(a: float, b: float, c: float, d: float) -> StateSpaceModel:
    """One-state single-input single-output model."""
    return StateSpaceModel([[a]], [[b]], [[c]], [[d]])


def _cascade(outer: StateSpaceModel, inner: StateSpaceModel) -> StateSpaceModel:
    """Realization of outer*inner (input feeds inner first)."""
    if inner.n_outputs != outer.n_inputs:
        raise ValueError(
            f"series: output dimension of the upstream factor ({inner.n_outputs}) "
            f"does not match input dimension of the downstream factor ({outer.n_inputs})")
    n1, n2 = inner.n_states, outer.n_states
    n = n1 + n2
    a = np.zeros((n, n))
    a[:n1, :n1] = inner.A
    a[n1:, n1:] = outer.A
    a[n1:, :n1] = outer.B @ inner.C
    b = np.vstack([inner.B, outer.B @ inner.D])
    c = np.hstack([outer.D @ inner.C, outer.C])
    d = outer.D @ inner.D
    return StateSpaceModel(a, b, c, d)


def series(post: StateSpaceModel, mid: StateSpaceModel,
           pre: StateSpaceModel) -> StateSpaceModel:
    """Realization of post*mid*pre; the signal flows pre -> mid -> post.

    The state dimension of the result is the sum of the three factors' state
    dimensions, and its frequency response equals the matrix product of the
    factor responses at every frequency.
    """
    return _cascade(post, _cascade(mid, pre))


def _response(a, b, c, d, omega: float) -> np.ndarray:
    if a.shape[0] == 0:
        return d.astype(complex)
    m = 1j * omega * np.eye(a.shape[0]) - a
    return c @ np.linalg.solve(m, b.astype(complex)) + d


def freq_response(ss: StateSpaceModel, omega: float) -> np.ndarray:
    """Complex response C (jw I - A)^-1 B + D at the frequency omega (rad/s).

    Raises FrequencyAtPoleError when jw is (numerically) an eigenvalue of A.
    """
    if ss.n_states == 0:
        return ss.D.astype(complex)
    m = 1j * float(omega) * np.eye(ss.n_states) - ss.A
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1.0):
        raise FrequencyAtPoleError(f"frequency at pole: omega={omega!r}")
    return ss.C @ np.linalg.solve(m, ss.B.astype(complex)) + ss.D


def is_stable(ss: StateSpaceModel) -> bool:
    """True iff every eigenvalue of A has real part < -STABILITY_MARGIN.

    A zero-state model is stable by convention.
    """
    if ss.n_states == 0:
        return True
    return float(np.max(np.linalg.eigvals(ss.A).real)) < -STABILITY_MARGIN


def _sigma_max(mat: np.ndarray) -> float:
    if mat.size == 0:
        return 0.0
    return float(np.linalg.svd(mat, compute_uv=False)[0])


def _has_imaginary_axis_eig(a, b, c, d, gamma: float) -> bool:
    """Bounded-real Hamiltonian test: does sup_w sigma_max(G(jw)) reach gamma?

    Valid only for gamma > sigma_max(D).
    """
    m = d.shape[1]
    p = d.shape[0]
    r = gamma * gamma * np.eye(m) - d.T @ d
    rinv_dt = np.linalg.solve(r, d.T)
    rinv_bt = np.linalg.solve(r, b.T)
    arc = a + b @ rinv_dt @ c
    h = np.block([
        [arc, b @ rinv_bt],
        [-c.T @ (np.eye(p) + d @ rinv_dt) @ c, -arc.T],
    ])
    eigs = np.linalg.eigvals(h)
    return bool(np.any(np.abs(eigs.real) < _IMAG_AXIS_RTOL * (1.0 + np.abs(eigs))))


def hinf_norm(ss: StateSpaceModel, tol: float = 1e-8) -> float:
    """Peak gain sup_w sigma_max(G(jw)) of a stable system, to relative tol.

    The value is bracketed by bisection on the candidate level gamma using
    the bounded-real Hamiltonian imaginary-axis eigenvalue test, seeded with
    a lower bound from a 400-point logarithmic frequency grid plus the DC
    and feedthrough gains.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not is_stable(ss):
        raise UnstableSystemError("norm undefined for unstable system")
    if ss.n_states == 0:
        return _sigma_max(ss.D)
    a, b, c, d = ss.A, ss.B, ss.C, ss.D
    sigma_d = _sigma_max(d)
    lower = max(sigma_d, _sigma_max(_response(a, b, c, d, 0.0)))
    for w in _INIT_GRID:
        lower = max(lower, _sigma_max(_response(a, b, c, d, float(w))))
    if lower == 0.0:
        return 0.0

    # Grow an upper bound: the first level with no imaginary-axis crossing.
    gamma = lower * (1.0 + 1e-6)
    upper = None
    for _ in range(128):
        if _has_imaginary_axis_eig(a, b, c, d, gamma):
            lower = gamma
            gamma *= 2.0
        else:
            upper = gamma
            break
    if upper is None:
        raise HinfConvergenceError("no valid upper bound found", lower, gamma)

    for _ in range(_MAX_BISECTIONS):
        if upper - lower <= tol * lower:
            return 0.5 * (lower + upper)
        mid = 0.5 * (lower + upper)
        if _has_imaginary_axis_eig(a, b, c, d, mid):
            lower = mid
        else:
            upper = mid
    raise HinfConvergenceError("bisection did not converge", lower, upper)


def closed_loop_tzw(ps: StateSpaceModel, k: StateSpaceModel) -> StateSpaceModel:
    """Stacked closed-loop map [(I + Ps K)^-1 ; K (I + Ps K)^-1].

    Negative feedback with the disturbance w entering at the plant-output
    summing junction: the controller sees v = w - Ps(u), u = K(v), and the
    stacked outputs are (v, u). Rejects loops whose static part I + Dps Dk
    is singular.
    """
    if ps.n_inputs != k.n_outputs or ps.n_outputs != k.n_inputs:
        raise ValueError(
            f"closed loop needs plant {ps.n_outputs}x{ps.n_inputs} against "
            f"controller {k.n_outputs}x{k.n_inputs}")
    p = ps.n_outputs
    m = ps.n_inputs
    loop = np.eye(p) + ps.D @ k.D
    sv = np.linalg.svd(loop, compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1.0):
        raise IllPosedLoopError("ill-posed loop: I + D_ps D_k is singular")
    delta = np.linalg.inv(loop)

    np_, nk = ps.n_states, k.n_states
    n = np_ + nk
    a = np.zeros((n, n))
    a[:np_, :np_] = ps.A - ps.B @ k.D @ delta @ ps.C
    a[:np_, np_:] = ps.B @ k.C - ps.B @ k.D @ delta @ ps.D @ k.C
    a[np_:, :np_] = -k.B @ delta @ ps.C
    a[np_:, np_:] = k.A - k.B @ delta @ ps.D @ k.C
    b = np.vstack([ps.B @ k.D @ delta, k.B @ delta])
    c = np.zeros((p + m, n))
    c[:p, :np_] = -delta @ ps.C
    c[:p, np_:] = -delta @ ps.D @ k.C
    c[p:, :np_] = -k.D @ delta @ ps.C
    c[p:, np_:] = k.C - k.D @ delta @ ps.D @ k.C
    d = np.vstack([delta, k.D @ delta])
    return StateSpaceModel(a, b, c, d)


@dataclass(frozen=True)
class RobustnessCertificate:
    """Loop robustness summary: peak closed-loop gain and its reciprocal margin."""

    norm_tzw: float
    epsilon: float
    loop_stable: bool


def robustness_margin(ps: StateSpaceModel, k: StateSpaceModel,
                      tol: float = 1e-8) -> RobustnessCertificate:
    """Certificate for the (ps, k) loop: gain of the stacked closed-loop map
    and the supremal margin epsilon = 1/norm.

    An unstable closed loop yields loop_stable=False with the norm reported
    as unbounded (epsilon 0).
    """
    tzw = closed_loop_tzw(ps, k)
    if not is_stable(tzw):
        return RobustnessCertificate(norm_tzw=math.inf, epsilon=0.0, loop_stable=False)
    norm = hinf_norm(tzw, tol)
    epsilon = math.inf if norm == 0.0 else 1.0 / norm
    return RobustnessCertificate(norm_tzw=norm, epsilon=epsilon, loop_stable=True)
