"""Radially symmetric explicit finite-difference simulator for the coupled
system (damped component driven by |v|^p, free component by |u|^q), with
functional tracking, discrete balance residuals, support checks and blow-up
detection.

n = 1 is solved on the full symmetric interval; n >= 2 on the radial half
line with an even-symmetry ghost at the origin (regularized Laplacian
n * u_rr(0)) and homogeneous Dirichlet at the outer boundary, which the light
cone never reaches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .params import ProblemParams, sphere_area
from .testfn import PhiEvaluator


@dataclass(frozen=True)
class Numerics:
    """Grid/time configuration.  dt = cfl * h; r_max defaults to
    R + t_max + max(0.5, 4h): the light cone plus enough padding that the
    scheme's sub-truncation dust (which runs slightly ahead of the cone)
    never grazes the Dirichlet wall within the run."""

    h: float = 0.02
    cfl: float = 0.45
    t_max: float = 40.0
    threshold: float = 1e8
    functional_threshold: float | None = None
    support_tol: float = 1.0   # multiplier on the h^2 (1+t) truncation floor
    r_max: float | None = None

    def resolved_r_max(self, R: float) -> float:
        if self.r_max is not None:
            return self.r_max
        return R + self.t_max + max(0.5, 4.0 * self.h)


@dataclass(frozen=True)
class InitialDataSpec:
    """Nonnegative radial profiles scaled by per-component amplitudes; support
    radius comes from ProblemParams.R.  Blow-up runs of the eigenfunction route
    need amp_u0, amp_v1 > 0; the direct route additionally exercises amp_u1."""

    shape: str = "bump"  # "bump" or "cosine"
    amp_u0: float = 1.0
    amp_u1: float = 1.0
    amp_v0: float = 1.0
    amp_v1: float = 1.0

    def __post_init__(self) -> None:
        if self.shape not in ("bump", "cosine"):
            raise ValueError(f"unknown profile shape {self.shape!r}")
        for name in ("amp_u0", "amp_u1", "amp_v0", "amp_v1"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")


def profile(shape: str, r: np.ndarray, R: float) -> np.ndarray:
    """Unit-amplitude nonnegative profile supported in |r| <= R."""
    rr = np.abs(np.asarray(r, dtype=float)) / R
    out = np.zeros_like(rr)
    if shape == "bump":
        inside = rr < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - rr[inside] ** 2))
    elif shape == "cosine":
        inside = rr <= 1.0
        out[inside] = np.cos(0.5 * math.pi * rr[inside]) ** 2
    else:
        raise ValueError(f"unknown profile shape {shape!r}")
    return out


class BlowupReason(str, Enum):
    MAX_NORM = "max_norm"
    FUNCTIONAL = "functional"
    NONE = "none"


@dataclass
class RadialField:
    """Two time levels of (u, v) on the grid, plus quadrature weights."""

    n: int
    h: float
    dt: float
    x: np.ndarray        # node coordinates (signed for n=1, radii otherwise)
    w: np.ndarray        # quadrature weights: integral f dx = w . f
    u: np.ndarray
    u_prev: np.ndarray
    v: np.ndarray
    v_prev: np.ndarray
    k: int = 0           # completed steps; current time = k * dt

    @property
    def t(self) -> float:
        return self.k * self.dt


def make_field(n: int, h: float, dt: float, r_max: float) -> RadialField:
    """Zero-initialized field on the grid covering radius r_max."""
    m = int(math.ceil(r_max / h))
    if n == 1:
        x = (np.arange(2 * m + 1) - m) * h
    else:
        x = np.arange(m + 1) * h
    w = _weights(n, x, h)
    z = np.zeros_like(x)
    return RadialField(n=n, h=h, dt=dt, x=x, w=w,
                       u=z.copy(), u_prev=z.copy(), v=z.copy(), v_prev=z.copy())


def _weights(n: int, x: np.ndarray, h: float) -> np.ndarray:
    # trapezoid with the radial surface factor for n >= 2
    if n == 1:
        w = np.full_like(x, h)
    else:
        w = sphere_area(n) * x ** (n - 1) * h
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def laplacian(field: RadialField, f: np.ndarray) -> np.ndarray:
    """Second-order radial Laplacian; zero on the Dirichlet boundary rows."""
    n, h, x = field.n, field.h, field.x
    out = np.zeros_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (h * h)
    if n >= 2:
        out[1:-1] += (n - 1) / x[1:-1] * (f[2:] - f[:-2]) / (2.0 * h)
        # removable singularity at r = 0: even ghost gives n * f''(0)
        out[0] = 2.0 * n * (f[1] - f[0]) / (h * h)
    return out


def _pow_abs(f: np.ndarray, e: float) -> np.ndarray:
    if e == 2.0:
        return f * f
    if e == 3.0:
        return np.abs(f) * f * f
    return np.abs(f) ** e


@dataclass(frozen=True)
class InitialMoments:
    """Quadratures of the velocity data, needed by the balance identities."""

    du0: float  # integral of eps*u1
    dv0: float  # integral of eps*v1


def make_initial_data(params: ProblemParams, spec: InitialDataSpec,
                      numerics: Numerics) -> tuple[RadialField, InitialMoments]:
    """Seed both time levels: data eps*(u0, u1, v0, v1) at t=0 and the back
    level u(-dt) = u(0) - dt*eps*u1 + (dt^2/2)(lap u(0) - eps*u1 + |v(0)|^p)
    (and the undamped analogue for v), a second-order-consistent start."""
    h = numerics.h
    dt = numerics.cfl * h
    if not 0.0 < numerics.cfl < 1.0:
        raise ValueError(f"CFL violation: need 0 < cfl < 1, got {numerics.cfl}")
    if h <= 0.0 or numerics.t_max <= 0.0 or numerics.threshold <= 0.0:
        raise ValueError("h, t_max and threshold must be positive")
    r_max = numerics.resolved_r_max(params.R)
    if r_max < params.R + numerics.t_max + h:
        raise ValueError("domain too small: the light cone reaches the boundary")
    fld = make_field(params.n, h, dt, r_max)
    eps = params.epsilon
    base = profile(spec.shape, fld.x, params.R)
    u0 = eps * spec.amp_u0 * base
    u1 = eps * spec.amp_u1 * base
    v0 = eps * spec.amp_v0 * base
    v1 = eps * spec.amp_v1 * base
    fld.u = u0.copy()
    fld.v = v0.copy()
    fld.u_prev = (u0 - dt * u1
                  + 0.5 * dt * dt * (laplacian(fld, u0) - u1 + _pow_abs(v0, params.p)))
    fld.v_prev = (v0 - dt * v1
                  + 0.5 * dt * dt * (laplacian(fld, v0) + _pow_abs(u0, params.q)))
    for arr in (fld.u_prev, fld.v_prev):
        arr[-1] = 0.0
        if params.n == 1:
            arr[0] = 0.0
    return fld, InitialMoments(du0=float(fld.w @ u1), dv0=float(fld.w @ v1))


def step(field: RadialField, params: ProblemParams,
         src_u: np.ndarray | None = None, src_v: np.ndarray | None = None,
         coupling: bool = True) -> None:
    """Advance one leapfrog step in place.

    The damping is the centered difference (u_next - u_prev)/(2 dt), absorbed
    into the implicit 1 + dt/2 divisor; v gets the plain leapfrog update.
    src_u / src_v override the computed sources |v|^p / |u|^q (used to add
    forcing, or to drop the coupling entirely with coupling=False).
    """
    p, q = params.p, params.q
    dt = field.dt
    if src_u is None:
        src_u = _pow_abs(field.v, p) if coupling else np.zeros_like(field.v)
    if src_v is None:
        src_v = _pow_abs(field.u, q) if coupling else np.zeros_like(field.u)
    lap_u = laplacian(field, field.u)
    lap_v = laplacian(field, field.v)
    u_next = (2.0 * field.u - field.u_prev + dt * dt * (lap_u + src_u)
              + 0.5 * dt * field.u_prev) / (1.0 + 0.5 * dt)
    v_next = 2.0 * field.v - field.v_prev + dt * dt * (lap_v + src_v)
    u_next[-1] = v_next[-1] = 0.0
    if field.n == 1:
        u_next[0] = v_next[0] = 0.0
    field.u_prev, field.u = field.u, u_next
    field.v_prev, field.v = field.v, v_next
    field.k += 1


def functionals(field: RadialField, phi_values: np.ndarray | None = None):
    """(U, V, V1) = (integral u, integral v, integral v * e^{-t} Phi)."""
    U = float(field.w @ field.u)
    V = float(field.w @ field.v)
    if phi_values is None:
        phi_values = PhiEvaluator(field.n).phi(np.abs(field.x))
    V1 = math.exp(-field.t) * float(field.w @ (field.v * phi_values))
    return U, V, V1


def support_radius(field: RadialField, tol: float = 1.0) -> float:
    """Largest |x| carrying amplitude above the accumulated-truncation floor.

    An explicit scheme at Courant number < 1 moves strictly-nonzero values
    faster than the light cone, but only at amplitudes of the scheme's own
    global error, O(h^2 (1+t)) relative to the field maximum.  Nodal support
    is therefore measured above the floor tol * h^2 * (1+t) * max-amplitude;
    with that floor the cone containment R + t + 2h holds (and a transport or
    stencil bug would still blast through it).
    """
    floor = tol * field.h * field.h * (1.0 + field.t)
    m_u = float(np.max(np.abs(field.u)))
    m_v = float(np.max(np.abs(field.v)))
    mask = np.zeros(field.x.shape, dtype=bool)
    if m_u > 0.0:
        mask |= np.abs(field.u) > floor * m_u
    if m_v > 0.0:
        mask |= np.abs(field.v) > floor * m_v
    if not mask.any():
        return 0.0
    return float(np.max(np.abs(field.x[mask])))


def _cumtrapz(f: np.ndarray, dt: float) -> np.ndarray:
    out = np.zeros_like(f)
    if f.size > 1:
        out[1:] = np.cumsum(0.5 * (f[1:] + f[:-1])) * dt
    return out


def _ddt(f: np.ndarray, dt: float) -> np.ndarray:
    """Second-order time derivative: centered inside, one-sided at the ends."""
    out = np.empty_like(f)
    if f.size < 3:
        out[:] = np.gradient(f, dt) if f.size > 1 else 0.0
        return out
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * dt)
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dt)
    return out


def balance_residuals(times: np.ndarray, U: np.ndarray, V: np.ndarray,
                      int_v_p: np.ndarray, int_u_q: np.ndarray,
                      du0: float, dv0: float):
    """Discrete residuals of the two integrated identities
        U'(t) + U(t) = U'(0) + U(0) + II(|v|^p),   V'(t) = V'(0) + II(|u|^q),
    normalized by the running magnitude of each right-hand side."""
    if times.size < 2:
        z = np.zeros_like(times)
        return z, z
    dt = times[1] - times[0]
    rhs_u = du0 + U[0] + _cumtrapz(int_v_p, dt)
    rhs_v = dv0 + _cumtrapz(int_u_q, dt)
    res_u = _ddt(U, dt) + U - rhs_u
    res_v = _ddt(V, dt) - rhs_v
    norm_u = max(np.max(np.abs(rhs_u)), 1e-300)
    norm_v = max(np.max(np.abs(rhs_v)), 1e-300)
    if np.max(np.abs(rhs_u)) == 0.0:
        norm_u = 1.0
    if np.max(np.abs(rhs_v)) == 0.0:
        norm_v = 1.0
    return res_u / norm_u, res_v / norm_v


@dataclass
class FunctionalTrace:
    """Per-step functional time series of one run plus the detection result."""

    times: np.ndarray
    U: np.ndarray
    V: np.ndarray
    V1: np.ndarray
    max_u: np.ndarray
    max_v: np.ndarray
    src_u: np.ndarray          # integral of |v|^p (drives U)
    src_v: np.ndarray          # integral of |u|^q (drives V)
    res_u: np.ndarray          # normalized balance residual series
    res_v: np.ndarray
    t_blowup: float | None
    reason: BlowupReason
    support_max_excess: float  # max over records of support radius - (R + t)
    du0: float
    dv0: float
    t_blowup_refined: float | None = None  # optional h/2 sanity rerun

    @property
    def res_u_max(self) -> float:
        return float(np.max(np.abs(self.res_u))) if self.res_u.size else 0.0

    @property
    def res_v_max(self) -> float:
        return float(np.max(np.abs(self.res_v))) if self.res_v.size else 0.0


def run(params: ProblemParams, spec: InitialDataSpec, numerics: Numerics,
        phi_evaluator: PhiEvaluator | None = None,
        refine_check: bool = False) -> FunctionalTrace:
    """March to t_max or blow-up, recording functionals every step.

    Blow-up is flagged the first time max|u| + max|v| crosses the threshold
    (or any value goes non-finite); the optional functional threshold flags
    on U + V instead.  The reported time is threshold-dependent by design.
    refine_check reruns at h/2 and attaches the detected time as a Richardson
    sanity value (fits should only be trusted when the two agree).
    """
    fld, moments = make_initial_data(params, spec, numerics)
    if phi_evaluator is None:
        phi_evaluator = PhiEvaluator(params.n)
    phi_vals = phi_evaluator.phi(np.abs(fld.x))
    n_steps = int(round(numerics.t_max / fld.dt))

    times, Us, Vs, V1s = [], [], [], []
    mus, mvs, sus, svs = [], [], [], []
    t_blowup = None
    reason = BlowupReason.NONE
    max_excess = -math.inf

    for k in range(n_steps + 1):
        pow_v = _pow_abs(fld.v, params.p)
        pow_u = _pow_abs(fld.u, params.q)
        U, V, V1 = functionals(fld, phi_vals)
        m_u = float(np.max(np.abs(fld.u)))
        m_v = float(np.max(np.abs(fld.v)))
        times.append(fld.t)
        Us.append(U)
        Vs.append(V)
        V1s.append(V1)
        mus.append(m_u)
        mvs.append(m_v)
        sus.append(float(fld.w @ pow_v))
        svs.append(float(fld.w @ pow_u))
        max_excess = max(max_excess,
                         support_radius(fld, numerics.support_tol)
                         - (params.R + fld.t))
        finite = math.isfinite(m_u) and math.isfinite(m_v)
        if not finite or m_u + m_v > numerics.threshold:
            t_blowup = fld.t
            reason = BlowupReason.MAX_NORM
            break
        if (numerics.functional_threshold is not None
                and U + V > numerics.functional_threshold):
            t_blowup = fld.t
            reason = BlowupReason.FUNCTIONAL
            break
        if k == n_steps:
            break
        step(fld, params, src_u=pow_v, src_v=pow_u)

    times = np.asarray(times)
    U_arr, V_arr = np.asarray(Us), np.asarray(Vs)
    su_arr, sv_arr = np.asarray(sus), np.asarray(svs)
    res_u, res_v = balance_residuals(times, U_arr, V_arr, su_arr, sv_arr,
                                     moments.du0, moments.dv0)
    refined = None
    if refine_check:
        finer = Numerics(h=0.5 * numerics.h, cfl=numerics.cfl,
                         t_max=numerics.t_max, threshold=numerics.threshold,
                         functional_threshold=numerics.functional_threshold,
                         support_tol=numerics.support_tol,
                         r_max=numerics.r_max)
        refined = run(params, spec, finer, phi_evaluator).t_blowup
    return FunctionalTrace(times=times, U=U_arr, V=V_arr, V1=np.asarray(V1s),
                           max_u=np.asarray(mus), max_v=np.asarray(mvs),
                           src_u=su_arr, src_v=sv_arr,
                           res_u=res_u, res_v=res_v,
                           t_blowup=t_blowup, reason=reason,
                           support_max_excess=max_excess,
                           du0=moments.du0, dv0=moments.dv0,
                           t_blowup_refined=refined)
