"""Radial harmonic analysis on R^n.

Conventions: ``fhat(xi) = int f(x) exp(-i x.xi) dx``, which for radial ``f``
reduces to ``omega_{n-1} int_0^inf f(r) j_{(n-2)/2}(r |xi|) r^(n-1) dr``;
Plancherel then reads ``||f||_2^2 = (2 pi)^(-n) ||fhat||_2^2``.

Spectral integrals are taken over radii ``rho in [0, rho_max]`` (plus a
declared-envelope tail bound) with an explicit breakpoint at ``1/t`` where
the weight ``min{1, (t rho)^k}`` has its kink.  Transforms are memoized per
profile through :class:`RadialTransform`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .profiles import NEGLIGIBLE, RadialProfile
from .quad import DecayHint, GridSpec, integrate_finite
from .specfun import bessel_j_norm

__all__ = [
    "Dimension",
    "ExponentPair",
    "RadialTransform",
    "DEFAULT_SPECTRAL_GRID",
    "fourier_radial",
    "spherical_mean_radial",
    "mean_minus_identity",
    "SphericalMeanProfile",
    "lp_norm_radial",
    "diff_norm",
    "modulus_omega",
    "growth_lhs",
    "tail_lhs",
    "spectral_parts",
    "plancherel_spectral",
]

DEFAULT_SPECTRAL_GRID = GridSpec("log", 1e-4, 1e3, 2000)
DEFAULT_RHO_MAX = 1e3
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Dimension:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2 (got {self.n})")

    @property
    def alpha_eq(self) -> float:
        return (self.n - 2) / 2

    @property
    def omega(self) -> float:
        """Surface measure of the unit sphere in R^n."""
        return 2.0 * math.pi ** (self.n / 2) / math.gamma(self.n / 2)


@dataclass(frozen=True)
class ExponentPair:
    p: float

    def __post_init__(self):
        if not 1.0 <= self.p <= 2.0:
            raise ValueError(f"exponent p must lie in [1, 2] (got {self.p})")

    @property
    def q(self) -> float:
        return math.inf if self.p == 1.0 else self.p / (self.p - 1.0)


def _sphere_weight_total(n: int) -> float:
    # int_0^pi sin^(n-2) theta dtheta
    return math.sqrt(math.pi) * math.exp(math.lgamma((n - 1) / 2) - math.lgamma(n / 2))


def _radial_integral(g, f: RadialProfile, upper: float, rtol: float, extra=()) -> float:
    pts = [b for b in (*f.breakpoints, *extra) if 0 < b < upper]
    res = integrate_finite(g, 0.0, upper, tol=1e-300, rtol=rtol, points=pts)
    if not res.converged:
        raise ConvergenceError(f"radial integral for {f!r} did not converge", res.error_estimate)
    return float(res.value)


class RadialTransform:
    """Memoized radial Fourier transform of one profile in one dimension.

    Values are computed in blocks of similar frequency (each block is one
    vector-valued adaptive integral) and cached by exact frequency, so
    repeated spectral integrals over overlapping nodes are cheap.  Caching
    does not change any value.  A profile with a Gaussian spectral envelope
    ``C exp(-a xi^2)`` has its transform set to 0 where that envelope is
    below ``NEGLIGIBLE`` times its value at 0.
    """

    def __init__(self, f: RadialProfile, dim: Dimension, rtol: float = 1e-12, block: int = 128):
        self.f = f
        self.dim = dim
        self.rtol = rtol
        self.block = block
        self.radius = f.effective_radius()
        if not math.isfinite(self.radius):
            raise ValueError(f"profile {f!r} has no finite effective radius")
        n = dim.n
        if self.radius == 0.0:
            self.l1 = 0.0
        else:
            self.l1 = dim.omega * _radial_integral(
                lambda r: np.abs(f(r)) * r ** (n - 1), f, self.radius, 1e-13)
        self.atol = max(rtol * self.l1, 1e-300)
        hint = f.spectral_hint(n)
        self._cut = math.inf
        if hint is not None and hint.kind == "gaussian":
            self._cut = math.sqrt(-math.log(NEGLIGIBLE) / hint.rate)
        self._cache: dict[float, float] = {}
        self.max_error = 0.0
        self.truncated = 0

    def _block(self, xi: np.ndarray) -> np.ndarray:
        f, n, a = self.f, self.dim.n, self.dim.alpha_eq
        R = self.radius

        def g(r):
            return (f(r) * r ** (n - 1)) * bessel_j_norm(a, np.multiply.outer(xi, r))

        n_init = int(math.ceil(float(xi.max()) * R / math.pi)) + 1
        pts = [b for b in f.breakpoints if 0 < b < R]
        res = integrate_finite(g, 0.0, R, tol=self.atol / self.dim.omega, points=pts,
                               n_init=n_init, max_intervals=400_000)
        if not res.converged:
            raise ConvergenceError(
                f"Fourier transform of {f!r} did not converge near |xi|={xi.max():.4g}",
                self.dim.omega * res.error_estimate)
        self.max_error = max(self.max_error, self.dim.omega * res.error_estimate)
        return self.dim.omega * np.asarray(res.value)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        if np.any(xi < 0) or not np.all(np.isfinite(xi)):
            raise ValueError("|xi| must be finite and nonnegative")
        flat = xi.ravel()
        missing = np.unique(np.array([x for x in flat if x not in self._cache], dtype=float))
        if missing.size:
            if self.radius == 0.0:
                vals = np.zeros(missing.size)
            else:
                vals = np.zeros(missing.size)
                live = missing < self._cut
                self.truncated += int((~live).sum())
                todo = missing[live]
                # blocks grouped by octave so each integral has similar oscillation
                octave = np.floor(np.log2(np.maximum(todo * self.radius, 1.0)))
                out = np.empty(todo.size)
                for o in np.unique(octave):
                    idx = np.flatnonzero(octave == o)
                    for k in range(0, idx.size, self.block):
                        sel = idx[k:k + self.block]
                        out[sel] = self._block(todo[sel])
                vals[live] = out
            self._cache.update(zip(missing.tolist(), vals.tolist()))
        cache = self._cache
        res = np.fromiter((cache[x] for x in flat.tolist()), dtype=float, count=flat.size)
        res = res.reshape(xi.shape)
        return res[()] if res.ndim == 0 else res


def fourier_radial(f: RadialProfile, dim: Dimension, xi_abs, rtol: float = 1e-12):
    """Radial Fourier transform ``fhat(|xi|)`` (scalar or array)."""
    return RadialTransform(f, dim, rtol=rtol)(xi_abs)


# ---------------------------------------------------------------------------
# spherical means
# ---------------------------------------------------------------------------

def _mean_minus(f: RadialProfile, n: int, t: float, s: np.ndarray, tol: float) -> np.ndarray:
    """``M^t f(s) - f(s)`` for an array of radii ``s`` (cosine-rule form).

    theta is split at the angle beyond which ``|x + t omega|`` leaves the
    effective support, so narrow profiles are never stepped over.
    """
    R = f.effective_radius()
    W = _sphere_weight_total(n)
    fs = f(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (R * R - s * s - t * t) / (2.0 * s * t)
    c = np.where(np.isfinite(c), c, np.where(s * t == 0, np.inf, c))
    theta_c = np.where(c >= 1.0, 0.0, np.where(c <= -1.0, math.pi, np.arccos(np.clip(c, -1.0, 1.0))))

    def g(v):
        th_a = np.multiply.outer(theta_c, v)
        th_b = theta_c[:, None] + np.multiply.outer(math.pi - theta_c, v)
        out = 0.0
        for th, width in ((th_a, theta_c), (th_b, math.pi - theta_c)):
            u = np.sqrt(np.maximum(s[:, None] ** 2 + t * t + 2.0 * s[:, None] * t * np.cos(th), 0.0))
            w = np.sin(th) ** (n - 2) if n > 2 else 1.0
            out = out + width[:, None] * (f(u) - fs[:, None]) * w
        return out

    res = integrate_finite(g, 0.0, 1.0, tol=tol * W, max_intervals=200_000)
    if not res.converged:
        raise ConvergenceError(f"spherical mean of {f!r} did not converge at t={t}", res.error_estimate / W)
    return np.asarray(res.value) / W


def mean_minus_identity(f: RadialProfile, dim: Dimension, t: float, s, tol: float | None = None):
    """``M^t f(s) - f(s)`` without forming the two terms separately."""
    s = np.asarray(s, dtype=float)
    if not (math.isfinite(t) and t >= 0) or np.any(s < 0):
        raise ValueError("t and s must be finite and nonnegative")
    if t == 0:
        out = np.zeros_like(s)
    else:
        tol = 1e-13 * max(f.peak, 1e-300) if tol is None else tol
        out = _mean_minus(f, dim.n, float(t), np.atleast_1d(s).ravel(), tol).reshape(s.shape)
    return out[()] if out.ndim == 0 else out


def spherical_mean_radial(f: RadialProfile, dim: Dimension, t: float, s, tol: float | None = None):
    """Spherical mean ``M^t f`` evaluated at radius ``s``."""
    s = np.asarray(s, dtype=float)
    return f(s) + mean_minus_identity(f, dim, t, s, tol)


class SphericalMeanProfile(RadialProfile):
    """The radial function ``s -> M^t f(s)`` on ``R^n``."""

    family = "spherical_mean"

    def __init__(self, f: RadialProfile, dim: Dimension, t: float):
        if not (math.isfinite(t) and t >= 0):
            raise ValueError("t must be finite and nonnegative")
        self.f = f
        self.dim = dim
        self.t = float(t)
        self._radius = f.effective_radius() + self.t
        self.support = f.support + self.t
        self.decay_hint = f.decay_hint
        self.breakpoints = tuple(sorted({abs(self.t - b) for b in f.breakpoints}
                                        | {self.t + b for b in f.breakpoints}))

    def _eval(self, r):
        return np.asarray(spherical_mean_radial(self.f, self.dim, self.t, r), dtype=float)

    @property
    def peak(self):
        return self.f.peak

    def effective_radius(self):
        return self._radius

    def spectral_hint(self, n):
        return self.f.spectral_hint(n)

    @property
    def params(self):
        return {"base": self.f.to_dict(), "t": self.t}


# ---------------------------------------------------------------------------
# norms and moduli
# ---------------------------------------------------------------------------

def lp_norm_radial(f: RadialProfile, dim: Dimension, p: float, rtol: float = 1e-12) -> float:
    """``(omega int |f|^p r^(n-1) dr)^(1/p)``; ``p = inf`` gives the sup on a grid."""
    if not p >= 1:
        raise ValueError("p must be >= 1")
    R = f.effective_radius()
    if R == 0.0:
        return 0.0
    if not math.isfinite(R):
        raise ValueError(f"profile {f!r} is not in L^p")
    if math.isinf(p):
        return float(np.max(np.abs(f(np.linspace(0.0, R, 4097)))))
    n = dim.n
    val = _radial_integral(lambda r: np.abs(f(r)) ** p * r ** (n - 1), f, R, rtol)
    return (dim.omega * val) ** (1.0 / p)


_S_BLOCK = 96


def diff_norm(f: RadialProfile, dim: Dimension, p: float, t: float, rtol: float = 1e-10) -> float:
    """``||M^t f - f||_p`` by nested quadrature over the radius and the angle."""
    if not p >= 1 or math.isinf(p):
        raise ValueError("diff_norm needs finite p >= 1")
    if not (math.isfinite(t) and t >= 0):
        raise ValueError("t must be finite and nonnegative")
    R = f.effective_radius()
    if t == 0 or R == 0.0:
        return 0.0
    if not math.isfinite(R):
        raise ValueError(f"profile {f!r} is not in L^p")
    n = dim.n
    # M^t f - f is O(t^2) while rounding in f(u) - f(s) is O(eps): both the
    # inner tolerance and the reachable outer accuracy follow from that.
    small = min(1.0, t * t)
    inner_tol = f.peak * max(1e-13 * small, 100 * _EPS)
    rtol = max(rtol, 1e3 * _EPS / small)

    def g(s):
        d = np.concatenate([_mean_minus(f, n, t, s[k:k + _S_BLOCK], inner_tol)
                            for k in range(0, s.size, _S_BLOCK)])
        return np.abs(d) ** p * s ** (n - 1)

    upper = t + R
    extra = [t, abs(t - R), R, *[abs(t - b) for b in f.breakpoints], *[t + b for b in f.breakpoints]]
    pts = [b for b in extra if 0 < b < upper]
    res = integrate_finite(g, 0.0, upper, tol=1e-300, rtol=rtol, points=pts, max_intervals=20_000)
    if not res.converged:
        raise ConvergenceError(f"||M^t f - f||_{p} for {f!r} at t={t} did not converge", res.error_estimate)
    return (dim.omega * float(res.value)) ** (1.0 / p)


def modulus_omega(f: RadialProfile, dim: Dimension, p: float, r, points: int = 16):
    """Modulus of continuity ``sup_{0 <= t <= r} ||M^t f - f||_p`` on a grid.

    For an array of radii the t-grid is the union of ``linspace(0, r_i,
    points)`` over all ``r_i`` and each value is a running maximum, so the
    result is nondecreasing in ``r`` by construction.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ValueError("r must be finite and nonnegative")
    flat = np.atleast_1d(r).ravel()
    grid = np.unique(np.concatenate([np.linspace(0.0, ri, points) for ri in flat]))
    vals = np.array([diff_norm(f, dim, p, float(t)) for t in grid])
    running = np.maximum.accumulate(vals)
    out = np.array([running[np.searchsorted(grid, ri, side="right") - 1] for ri in flat]).reshape(r.shape)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# spectral expressions
# ---------------------------------------------------------------------------

def _integrand_hint(f: RadialProfile, n: int, q: float) -> DecayHint:
    hint = f.spectral_hint(n)
    if hint is None:
        raise ValueError(f"profile {f!r} declares no spectral decay")
    if hint.kind == "gaussian":
        return DecayHint("gaussian", q * hint.rate)
    if hint.kind == "exponential":
        return DecayHint("exponential", q * hint.rate)
    k = q * hint.rate - (n - 1)
    if k <= 1:
        raise ValueError(
            f"|fhat|^{q:g} of {f!r} is not integrable in dimension {n} "
            f"(transform decays like |xi|^-{hint.rate:g})")
    return DecayHint("polynomial", k)


def _transform_for(f, dim, fhat):
    if fhat is None:
        return RadialTransform(f, dim)
    return fhat


def _spectral_scale(fhat, n: int, q: float, rho_max: float) -> float:
    rho = GridSpec("log", 1e-3, rho_max, 64).nodes()
    return float(np.max(np.abs(fhat(rho)) ** q * rho ** n))


# Fixed dyadic breakpoints shared by every t, so memoized transform nodes
# are reused across a sweep; only the segment holding 1/t differs.
_DYADIC = tuple(2.0 ** k for k in range(-24, 31))


def _dyadic_between(a: float, b: float) -> list:
    return [x for x in _DYADIC if a < x < b]


def _envelope_bound(g, hint: DecayHint, T: float) -> float:
    amp = float(np.max(np.abs(g(np.linspace(T, 1.25 * T, 33)))))
    return hint.tail_bound(amp, T)


def _tail_integral(g, a: float, hint: DecayHint, tol: float, rho_max: float):
    """``int_a^inf g`` truncated at the first dyadic ``T`` whose envelope bound
    is below ``tol/2``, or at ``rho_max``."""
    T = a
    bound = _envelope_bound(g, hint, a)
    if bound > 0.5 * tol:
        for T in [x for x in _DYADIC if a < x < rho_max] + [rho_max]:
            bound = _envelope_bound(g, hint, T)
            if bound <= 0.5 * tol:
                break
    if T <= a:
        return 0.0, bound, a
    res = integrate_finite(g, a, T, tol=0.5 * tol, points=_dyadic_between(a, T))
    if not res.converged:
        raise ConvergenceError("spectral tail integral did not converge", res.error_estimate)
    return float(res.value), bound, T


def _plain_head(plain, upper: float, tol: float) -> float:
    res = integrate_finite(plain, 0.0, upper, tol=0.5 * tol, points=_dyadic_between(0.0, upper))
    if not res.converged:
        raise ConvergenceError("spectral integral did not converge", res.error_estimate)
    return float(res.value)


def spectral_parts(f: RadialProfile, dim: Dimension, q: float, t: float, *, fhat=None,
                   rho_max: float = DEFAULT_RHO_MAX, rtol: float = 1e-10) -> dict:
    """Head and tail of ``omega int min{1,(t rho)^(2q)} |fhat|^q rho^(n-1) drho``.

    ``head`` covers ``rho < 1/t`` (weighted), ``tail`` covers ``rho > 1/t``
    (weight one), so ``tail <= head + tail`` holds exactly.  The tail is
    truncated where the declared spectral envelope allows and never beyond
    ``rho_max``; the envelope bound of the neglected part is returned as
    ``tail_bound``.  For ``q = 2`` and a bound above tolerance the neglected
    mass is instead recovered from Plancherel (``method`` records which).
    """
    n = dim.n
    fhat = _transform_for(f, dim, fhat)
    hint = _integrand_hint(f, n, q)
    if t == 0:
        return {"head": 0.0, "tail": 0.0, "tail_bound": 0.0, "method": "direct", "truncation": 0.0}
    tol = rtol * _spectral_scale(fhat, n, q, rho_max)
    kink = 1.0 / t

    def weighted(rho):
        return (np.minimum(1.0, (t * rho) ** (2 * q)) * np.abs(fhat(rho)) ** q) * rho ** (n - 1)

    def plain(rho):
        return np.abs(fhat(rho)) ** q * rho ** (n - 1)

    head_stop = min(kink, rho_max)
    head_res = integrate_finite(weighted, 0.0, head_stop, tol=0.5 * tol,
                                points=_dyadic_between(0.0, head_stop))
    if not head_res.converged:
        raise ConvergenceError("spectral head integral did not converge", head_res.error_estimate)
    if kink > rho_max:
        tail, bound, T = 0.0, _envelope_bound(plain, hint, rho_max), rho_max
    else:
        tail, bound, T = _tail_integral(plain, kink, hint, tol, rho_max)
    head = dim.omega * float(head_res.value)
    tail = dim.omega * tail
    bound = dim.omega * bound
    method = "direct"
    if q == 2 and bound > 0.5 * tol * dim.omega:
        # Slow spectral decay (a jump in f): the mass the truncation misses
        # is known exactly from Plancherel and the spatial L2 norm.
        total = (2 * math.pi) ** n * lp_norm_radial(f, dim, 2.0) ** 2
        below = dim.omega * _plain_head(plain, head_stop, tol)
        method = "plancherel-complement"
        if kink <= rho_max:
            tail, bound = max(total - below, 0.0), 0.0
        else:
            # the split of the remainder across 1/t is unknown: bound only
            bound = max(total - below, 0.0)
    return {
        "head": head,
        "tail": tail,
        "tail_bound": bound,
        "method": method,
        "truncation": T,
    }


def _sup_parts(f, dim, t, fhat, grid: GridSpec):
    fhat = _transform_for(f, dim, fhat)
    rho = grid.nodes()
    vals = np.abs(fhat(rho))
    weight = np.minimum(1.0, (t * rho) ** 2)
    return rho, vals, weight


def growth_lhs(f: RadialProfile, dim: Dimension, exps: ExponentPair, t: float, *, fhat=None,
               rho_max: float = DEFAULT_RHO_MAX, spectral_grid: GridSpec = DEFAULT_SPECTRAL_GRID,
               rtol: float = 1e-10) -> float:
    """Spectral side of the growth estimate.

    ``q < inf``: ``(omega int min{1,(t rho)^(2q)} |fhat(rho)|^q rho^(n-1) drho)^(1/q)``;
    ``p = 1``: ``sup`` over the spectral grid of ``min{1,(t rho)^2} |fhat(rho)|``.
    """
    if not (math.isfinite(t) and t >= 0):
        raise ValueError("t must be finite and nonnegative")
    if t == 0:
        return 0.0
    if math.isinf(exps.q):
        rho, vals, weight = _sup_parts(f, dim, t, fhat, spectral_grid)
        return float(np.max(weight * vals))
    parts = spectral_parts(f, dim, exps.q, t, fhat=fhat, rho_max=rho_max, rtol=rtol)
    return (parts["head"] + parts["tail"]) ** (1.0 / exps.q)


def tail_lhs(f: RadialProfile, dim: Dimension, exps: ExponentPair, t: float, *, fhat=None,
             rho_max: float = DEFAULT_RHO_MAX, spectral_grid: GridSpec = DEFAULT_SPECTRAL_GRID,
             rtol: float = 1e-10) -> float:
    """Spectral tail beyond ``1/t``: ``L^q`` norm, or the sup when ``p = 1``."""
    if not (math.isfinite(t) and t > 0):
        raise ValueError("tail_lhs needs t > 0")
    if math.isinf(exps.q):
        rho, vals, _ = _sup_parts(f, dim, t, fhat, spectral_grid)
        tail = vals[rho > 1.0 / t]
        return float(tail.max()) if tail.size else 0.0
    parts = spectral_parts(f, dim, exps.q, t, fhat=fhat, rho_max=rho_max, rtol=rtol)
    return parts["tail"] ** (1.0 / exps.q)


def plancherel_spectral(f: RadialProfile, dim: Dimension, *, fhat=None,
                        rho_max: float = DEFAULT_RHO_MAX, rtol: float = 1e-10) -> float:
    """``(2 pi)^(-n) ||fhat||_2^2`` computed on the spectral side."""
    n = dim.n
    fhat = _transform_for(f, dim, fhat)
    hint = _integrand_hint(f, n, 2.0)
    tol = rtol * _spectral_scale(fhat, n, 2.0, rho_max)

    def plain(rho):
        return np.abs(fhat(rho)) ** 2 * rho ** (n - 1)

    head = integrate_finite(plain, 0.0, 1.0, tol=0.5 * tol, points=_dyadic_between(0.0, 1.0))
    if not head.converged:
        raise ConvergenceError("spectral L2 integral did not converge", head.error_estimate)
    tail, _, _ = _tail_integral(plain, 1.0, hint, tol, rho_max)
    return dim.omega * (float(head.value) + tail) / (2 * math.pi) ** n
