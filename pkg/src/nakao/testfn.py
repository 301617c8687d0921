"""Positive Laplace eigenfunction Phi (Delta Phi = Phi), the decaying wave
solution Psi = e^{-t} Phi, and the Hoelder-norm quadratures built on them.

Phi is 2*cosh(r) in one dimension and the sphere average of e^{x.w} above;
it grows like r^{-(n-1)/2} e^r, so evaluation goes through log_phi to stay
finite far out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import sphere_area


@dataclass
class PhiEvaluator:
    """Quadrature-backed evaluator of Phi for one dimension n.

    The polar-angle integral uses Gauss-Legendre of order `order`; whenever a
    radius beyond the validated range is requested the order is doubled until
    two consecutive orders agree to 1e-12 relative (the integrand needs more
    nodes as r grows).  Beyond `r_switch` the calibrated asymptotic form
    K * r^{-(n-1)/2} e^r takes over to keep large-radius evaluation cheap.
    """

    n: int
    order: int = 64
    r_switch: float = 200.0
    max_order: int = 4096
    # the active rule is swapped as one reference so concurrent readers never
    # see mismatched nodes/weights
    _rule: tuple = field(init=False, repr=False, default=None)
    _validated_r: float = field(init=False, default=0.0)
    _log_k: float | None = field(init=False, default=None, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if self.n >= 2:
            self._rule = self._make_rule(self.order)

    @staticmethod
    def _make_rule(order: int) -> tuple:
        x, w = np.polynomial.legendre.leggauss(order)
        # map [-1, 1] -> [0, pi]
        return order, 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w

    def _log_phi_quad(self, r: np.ndarray, rule: tuple | None = None) -> np.ndarray:
        # factor out e^r: the integrand e^{r(cos t - 1)} sin^{n-2} t lies in [0, 1]
        _, theta, weights = rule if rule is not None else self._rule
        core = np.exp(r[:, None] * (np.cos(theta)[None, :] - 1.0))
        if self.n > 2:
            core = core * np.sin(theta)[None, :] ** (self.n - 2)
        s = core @ weights
        return r + np.log(sphere_area(self.n - 1) * s)

    def _ensure_order(self, r_max: float) -> None:
        if r_max <= self._validated_r:
            return
        probe = np.array([max(r_max, 1.0)])
        rule = self._rule
        while True:
            a = self._log_phi_quad(probe, rule)[0]
            doubled = self._make_rule(2 * rule[0])
            b = self._log_phi_quad(probe, doubled)[0]
            if abs(a - b) <= 1e-12 * max(1.0, abs(b)):
                break
            rule = doubled
            if rule[0] >= self.max_order:
                break
        self._rule = rule
        self.order = rule[0]
        self._validated_r = max(r_max, 1.0)

    def log_phi(self, r):
        """log Phi(r), elementwise, finite for any radius."""
        arr = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(arr < 0.0):
            raise ValueError("radius must be nonnegative")
        if self.n == 1:
            out = arr + np.log1p(np.exp(-2.0 * arr))
        else:
            out = np.empty_like(arr)
            near = arr <= self.r_switch
            if np.any(near):
                self._ensure_order(float(np.max(arr[near])))
                out[near] = self._log_phi_quad(arr[near])
            if np.any(~near):
                far = arr[~near]
                out[~near] = (self._asymptotic_log_k() + far
                              - 0.5 * (self.n - 1) * np.log(far))
        return out[0] if np.isscalar(r) or np.ndim(r) == 0 else out

    def phi(self, r):
        """Phi(r) itself (overflows past r ~ 709 like e^r does)."""
        return np.exp(self.log_phi(r))

    def _asymptotic_log_k(self) -> float:
        # calibrate K once so the two branches agree at the switch radius
        if self._log_k is None:
            self._ensure_order(self.r_switch)
            at_switch = self._log_phi_quad(np.array([self.r_switch]))[0]
            self._log_k = float(at_switch - self.r_switch
                                + 0.5 * (self.n - 1) * math.log(self.r_switch))
        return self._log_k

    def asymptotic_ratio(self, r):
        """r^{(n-1)/2} e^{-r} Phi(r); tends to a positive constant."""
        arr = np.asarray(r, dtype=float)
        return np.exp(self.log_phi(arr) - arr + 0.5 * (self.n - 1) * np.log(arr))


def laplacian_residual(evaluator: PhiEvaluator, r_grid, h: float) -> float:
    """max |Phi'' + (n-1)/r Phi' - Phi| over the grid, derivatives by central
    differences of step h.  Decays like h^2 where the quadrature is converged."""
    r = np.asarray(r_grid, dtype=float)
    if np.any(r - h <= 0.0):
        raise ValueError("grid must keep r - h > 0")
    fm, f0, fp = evaluator.phi(r - h), evaluator.phi(r), evaluator.phi(r + h)
    second = (fp - 2.0 * f0 + fm) / (h * h)
    first = (fp - fm) / (2.0 * h)
    res = second + (evaluator.n - 1) / r * first - f0
    return float(np.max(np.abs(res)))


def wave_residual(evaluator: PhiEvaluator, r_grid, t: float, h: float,
                  dt: float) -> float:
    """max |Psi_tt - (Psi'' + (n-1)/r Psi')| for Psi = e^{-t} Phi, all three
    derivatives by central differences; bounded by quadrature + stencil error."""
    r = np.asarray(r_grid, dtype=float)
    phi_m, phi_0, phi_p = (evaluator.phi(r - h), evaluator.phi(r),
                           evaluator.phi(r + h))
    psi_tt = phi_0 * math.exp(-t) * (math.exp(dt) - 2.0 + math.exp(-dt)) / (dt * dt)
    lap = ((phi_p - 2.0 * phi_0 + phi_m) / (h * h)
           + (evaluator.n - 1) / r * (phi_p - phi_m) / (2.0 * h)) * math.exp(-t)
    return float(np.max(np.abs(psi_tt - lap)))


def psi_holder_norm(evaluator: PhiEvaluator, t: float, p: float, R: float,
                    panel: float = 0.5, order: int = 16) -> float:
    """integral of |Psi(t,.)|^{p'} over the ball of radius R+t (p' = p/(p-1)).

    Composite Gauss-Legendre in the radius with panels of width <= `panel`;
    the integrand is evaluated in log space so large t is safe.
    """
    if t < 0.0 or p <= 1.0 or R <= 0.0:
        raise ValueError("need t >= 0, p > 1, R > 0")
    pp = p / (p - 1.0)
    upper = R + t
    x, w = np.polynomial.legendre.leggauss(order)
    m = max(1, int(math.ceil(upper / panel)))
    edges = np.linspace(0.0, upper, m + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    r = (mid[:, None] + half * x[None, :]).ravel()
    wts = np.broadcast_to(half * w[None, :], (m, x.size)).ravel()
    log_f = pp * (evaluator.log_phi(r) - t)
    n = evaluator.n
    if n >= 2:
        log_f = log_f + (n - 1) * np.log(r)
    return sphere_area(n) * float(np.sum(wts * np.exp(log_f)))


def holder_ratio(evaluator: PhiEvaluator, t, p: float, R: float) -> np.ndarray:
    """psi_holder_norm normalized by (R+t)^{(n-1)(2-p')/2}; stays bounded in t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    pp = p / (p - 1.0)
    expo = (evaluator.n - 1) * (2.0 - pp) / 2.0
    vals = np.array([psi_holder_norm(evaluator, float(s), p, R) for s in t])
    return vals / (R + t) ** expo


def c2_constant(evaluator: PhiEvaluator, p: float, R: float,
                t_max: float = 50.0, num: int = 101) -> float:
    """Calibrated Hoelder constant: the max of holder_ratio over a t grid."""
    ts = np.linspace(0.0, t_max, num)
    return float(np.max(holder_ratio(evaluator, ts, p, R)))
