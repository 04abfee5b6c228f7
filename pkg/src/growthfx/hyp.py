"""Radial harmonic analysis for Jacobi functions (rank-one symmetric spaces).

Conventions: the Jacobi transform is ``fhat(lam) = int_0^inf f(t) phi_lam(t)
Delta(t) dt`` with ``Delta = (2 sinh t)^(2a+1) (2 cosh t)^(2b+1)``, and the
inverse is

    f(t) = (1 / 2 pi) int_0^inf fhat(mu) phi_mu(t) |c(mu)|^-2 dmu,

with ``c`` normalized by ``c(-i rho) = 1``.  The constant ``1/(2 pi)`` was
fixed by the roundtrip on the three-dimensional real hyperbolic space, where
``phi_mu(t) = sin(mu t) / (mu sinh t)`` and ``|c(mu)|^-2 = mu^2`` reduce the
inversion to the Fourier sine inversion formula.  Norms are taken in
``L^p(Delta dt)``.

Spherical means are computed geometrically for ``beta = -1/2`` through the
hyperbolic cosine rule, and spectrally (``phi_mu(t) fhat(mu)`` inverted) for
every other order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .profiles import NEGLIGIBLE, RadialProfile
from .quad import GridSpec, _composite_jacobi, integrate_finite
from .specfun import OrderPair, c_function_density, delta_density, hyp2f1_series, jacobi_phi

__all__ = [
    "SpectralGrid",
    "DEFAULT_MU_GRID",
    "DEFAULT_T_GRID",
    "INVERSION_CONSTANT",
    "hyp_radius",
    "AbelKernel",
    "JacobiTransform",
    "jacobi_transform",
    "inverse_jacobi_transform",
    "spectral_integral",
    "spherical_mean_hyp",
    "spherical_mean_spectral",
    "MeanProfile",
    "lp_norm_hyp",
    "diff_norm_hyp",
    "diff_norm_hyp_spectral",
    "plancherel_hyp",
    "roundtrip_error",
    "spectral_cutoff",
    "theorem5_lhs",
    "theorem6_lhs",
    "corollary7_tail",
    "strip_halfwidth",
]

DEFAULT_MU_GRID = GridSpec("log", 1e-3, 1e2, 1500)
DEFAULT_T_GRID = GridSpec("log", 1e-2, 10.0, 25)
INVERSION_CONSTANT = 1.0 / (2.0 * math.pi)
INVERSION_CONVENTION = "f(t) = (1/2pi) int_0^inf fhat(mu) phi_mu(t) |c(mu)|^-2 dmu, c(-i rho) = 1"
DEFAULT_MU_MAX = 1e3
_EPS = np.finfo(float).eps
# relative level at which profile * Delta * e^(rho t) counts as zero
_SPATIAL_CUT = 1e-32


@dataclass(frozen=True)
class SpectralGrid:
    """Sweep over ``lam = mu + i eta`` with ``mu`` on a grid and fixed ``eta``."""

    mu_grid: GridSpec = DEFAULT_MU_GRID
    eta: float = 0.0

    def points(self) -> np.ndarray:
        return self.mu_grid.nodes() + 1j * self.eta


def strip_halfwidth(p: float, rho: float) -> float:
    """Half-width ``(2/p - 1) rho`` of the strip on which spherical functions
    lie in ``L^q(Delta dt)``."""
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"p must lie in [1, 2] (got {p})")
    return (2.0 / p - 1.0) * rho


def _log_delta(order: OrderPair, t: np.ndarray) -> np.ndarray:
    # log Delta without overflow for large t
    a, b = order.alpha, order.beta
    with np.errstate(divide="ignore"):
        lsinh = np.where(t > 20, t, np.log(np.sinh(np.minimum(t, 20.0)) + (t == 0)))
        lsinh = np.where(t == 0, -np.inf, lsinh)
    lcosh = np.logaddexp(t, -t)
    return (2 * a + 1) * (math.log(2.0) + lsinh) + (2 * b + 1) * lcosh


def hyp_radius(f: RadialProfile, order: OrderPair, t_max: float = 400.0) -> float:
    """Radius beyond which ``|f| Delta e^(rho t)`` is negligible.

    Raises ``ValueError`` when the profile does not decay fast enough to be
    integrable against ``Delta`` with room for the strip ``|eta| <= rho``.
    """
    if f.effective_radius() == 0.0:
        return 0.0
    hint = f.decay_hint
    if math.isinf(f.support):
        if hint is None:
            raise ValueError(f"profile {f!r} declares no decay; it cannot be used on a symmetric space")
        if hint.kind == "polynomial" or (hint.kind == "exponential" and hint.rate <= 3 * order.rho):
            raise ValueError(f"decay of {f!r} does not beat the growth of Delta(t) e^(rho t)")
    upper = min(f.support, t_max)
    t = np.linspace(0.0, upper, 16001)
    with np.errstate(divide="ignore"):
        logh = np.log(np.abs(f(t))) + _log_delta(order, t) + order.rho * t
    top = float(np.max(logh))
    if not math.isfinite(top):
        return 0.0
    live = np.flatnonzero(logh > top + math.log(_SPATIAL_CUT))
    T = float(t[min(live[-1] + 1, t.size - 1)])
    if math.isinf(f.support) and T >= upper:
        raise ValueError(f"profile {f!r} is not negligible against Delta(t) by t={upper}")
    return min(T, f.support)


def _check_lambda(lam: np.ndarray, halfwidth: float) -> None:
    if not np.all(np.isfinite(lam)):
        raise ValueError("spectral points must be finite")
    if np.any(np.abs(lam.imag) > halfwidth * (1 + 1e-12)):
        raise ValueError(f"|Im lambda| exceeds the admissible strip half-width {halfwidth:g}")


class AbelKernel:
    """Abel transform of a profile, the lam-independent half of the transform.

    Exchanging the order of integration in the Mehler-type representation of
    ``phi_lam`` gives ``fhat(lam) = int_0^T cos(lam s) A(s) ds`` with

        A(s) = K 2^(2b+2) int_s^T f(t) sinh t (cosh t)^(b-a+1)
               (cosh 2t - cosh 2s)^(a-1/2) 2F1(a+b, a-b; a+1/2; z) dt,
        z = (cosh t - cosh s) / (2 cosh t),

    ``K = 2^(a+3/2) Gamma(a+1) / (sqrt(pi) Gamma(a+1/2))``.  ``A(s)`` behaves
    like ``(T - s)^(a+1/2)`` at the cut ``T`` and is stored as that power
    times a smooth factor ``B(s)``; both integrals use panel rules whose last
    panel is Gauss-Jacobi.  Requires ``alpha > -1/2``.
    """

    def __init__(self, f: RadialProfile, order: OrderPair, T: float, tol: float = 1e-13):
        a, b = order.alpha, order.beta
        if not a > -0.5:
            raise ValueError("the Abel route needs alpha > -1/2")
        self.f = f
        self.order = order
        self.T = float(T)
        self.tol = tol
        self.e = a - 0.5
        self.logc = ((a + 1.5) * math.log(2.0) + math.lgamma(a + 1.0) - math.lgamma(a + 0.5)
                     - 0.5 * math.log(math.pi) + (2 * b + 2) * math.log(2.0))
        self._rules: dict[int, tuple] = {}

    def _B(self, s: np.ndarray, panels: int, n: int):
        a, b, e, T = self.order.alpha, self.order.beta, self.e, self.T
        u, w = _composite_jacobi(panels, n, e)
        L = (T - s)[:, None]
        d = L * (1.0 - u[None, :])
        t = s[:, None] + d
        ch = np.cosh(t)
        z = (ch - np.cosh(s)[:, None]) / (2.0 * ch)
        F, _ = hyp2f1_series(a + b, a - b, a + 0.5, z)
        g = (self.f(t) * np.sinh(t) * ch ** (b - a + 1.0)
             * (2.0 * np.sinh(t + s[:, None]) * (np.sinh(d) / d)) ** e * F.real)
        return g @ w, np.abs(g) @ np.abs(w)

    def smooth_factor(self, s: np.ndarray) -> np.ndarray:
        """``B(s)`` with ``A(s) = (T - s)^(alpha+1/2) B(s)``."""
        out = np.empty(s.size)
        todo = np.arange(s.size)
        panels = 2
        while todo.size:
            prev, _ = self._B(s[todo], panels, 32)
            cur, mag = self._B(s[todo], panels, 48)
            ok = np.abs(cur - prev) <= self.tol * np.maximum(mag, 1e-300)
            out[todo[ok]] = cur[ok]
            todo = todo[~ok]
            panels *= 2
            if todo.size and panels > 1024:
                raise ConvergenceError("Abel transform did not converge", float(np.max(np.abs(cur - prev))))
        return math.exp(self.logc) * out

    def rule(self, level: int):
        """Cosine-transform rules (coarse, fine) for ``|Re lam| <= 2**level``."""
        if level not in self._rules:
            T = self.T
            panels = int(math.ceil(2.0 ** level * T / 12.0)) + 1
            pair = []
            for n in (32, 48):
                x, w = _composite_jacobi(panels, n, self.order.alpha + 0.5)
                s = T * x
                pair.append((s, T ** (self.order.alpha + 1.5) * w * self.smooth_factor(s)))
            self._rules[level] = tuple(pair)
        return self._rules[level]


_MIN_LEVEL = 4


class JacobiTransform:
    """Memoized Jacobi transform of one profile for one order.

    ``method="abel"`` (the default when ``alpha > -1/2``) integrates the
    Abel kernel once per frequency band, after which each spectral point
    costs one cosine sum; the band of ``lam`` is the smallest ``2**k`` above
    ``|Re lam|``, so a value does not depend on what was requested before.
    ``method="direct"`` integrates ``f phi_lam Delta`` adaptively and serves
    as the independent route.  Real points return real values after
    asserting that the imaginary residue is below ``1e-10`` (relative to
    ``int |f| Delta``).
    """

    def __init__(self, f: RadialProfile, order: OrderPair, rtol: float = 1e-12, block: int = 64,
                 method: str = "auto"):
        if method not in ("auto", "abel", "direct"):
            raise ValueError(f"unknown transform method {method!r}")
        if method == "auto":
            method = "abel" if order.alpha > -0.5 else "direct"
        self.f = f
        self.order = order
        self.rtol = rtol
        self.block = block
        self.method = method
        self.radius = hyp_radius(f, order)
        self.halfwidth = f.admissible_eta(order.rho)
        self.pts = [b for b in f.breakpoints if 0 < b < self.radius]
        if self.radius == 0.0:
            self.l1 = 0.0
        else:
            res = integrate_finite(lambda t: np.abs(f(t)) * delta_density(order, t), 0.0, self.radius,
                                   tol=1e-300, rtol=1e-13, points=self.pts)
            self.l1 = float(res.value)
        self.atol = max(rtol * self.l1, 1e-300)
        self._abel = AbelKernel(f, order, self.radius) if method == "abel" and self.radius > 0 else None
        self._cache: dict[complex, complex] = {}
        self.max_error = 0.0

    def _direct(self, lam: np.ndarray) -> np.ndarray:
        f, order = self.f, self.order
        T = self.radius

        def g(t):
            w = f(t) * delta_density(order, t)
            return jacobi_phi(order, lam[:, None], t[None, :]) * w

        n_init = int(math.ceil(float(np.max(np.abs(lam.real))) * T / math.pi)) + 1
        res = integrate_finite(g, 0.0, T, tol=self.atol, points=self.pts, n_init=n_init,
                               max_intervals=200_000)
        if not res.converged:
            raise ConvergenceError(
                f"Jacobi transform of {f!r} did not converge near |lam|={np.max(np.abs(lam)):.4g}",
                res.error_estimate)
        self.max_error = max(self.max_error, res.error_estimate)
        return np.asarray(res.value, dtype=complex)

    def _by_abel(self, lam: np.ndarray, level: int) -> np.ndarray:
        (s0, w0), (s1, w1) = self._abel.rule(level)
        coarse = np.cos(lam[:, None] * s0[None, :]) @ w0
        fine = np.cos(lam[:, None] * s1[None, :]) @ w1
        err = float(np.max(np.abs(fine - coarse)))
        if err > self.atol:
            raise ConvergenceError(f"Abel-route transform of {self.f!r} did not converge", err)
        self.max_error = max(self.max_error, err)
        return fine

    def _compute(self, lam: np.ndarray) -> np.ndarray:
        vals = np.zeros(lam.size, dtype=complex)
        if self.radius == 0.0:
            return vals
        if self.method == "abel":
            level = np.maximum(np.ceil(np.log2(np.maximum(np.abs(lam.real), 1.0))), _MIN_LEVEL).astype(int)
            for k in np.unique(level):
                idx = np.flatnonzero(level == k)
                for j in range(0, idx.size, 1024):
                    sel = idx[j:j + 1024]
                    vals[sel] = self._by_abel(lam[sel], int(k))
            return vals
        octave = np.floor(np.log2(np.maximum(np.abs(lam.real) * self.radius, 1.0)))
        for o in np.unique(octave):
            idx = np.flatnonzero(octave == o)
            for k in range(0, idx.size, self.block):
                sel = idx[k:k + self.block]
                vals[sel] = self._direct(lam[sel])
        return vals

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        _check_lambda(lam, self.halfwidth)
        flat = lam.ravel()
        missing = np.unique(np.array([x for x in flat.tolist() if x not in self._cache], dtype=complex))
        if missing.size:
            vals = self._compute(missing)
            real = missing.imag == 0
            resid = np.abs(vals[real].imag)
            if resid.size and float(resid.max()) > 1e-10 * max(self.l1, 1e-300):
                raise ConvergenceError("Jacobi transform at real lambda has an imaginary residue",
                                       float(resid.max()))
            vals[real] = vals[real].real
            self._cache.update(zip(missing.tolist(), vals.tolist()))
        cache = self._cache
        out = np.fromiter((cache[x] for x in flat.tolist()), dtype=complex, count=flat.size).reshape(lam.shape)
        if np.all(lam.imag == 0):
            out = out.real
        return out[()] if out.ndim == 0 else out


def _transform_for(f, order, fhat):
    if fhat is None:
        return JacobiTransform(f, order)
    if fhat.f is not f or fhat.order != order:
        raise ValueError("the supplied transform belongs to a different profile or order")
    return fhat


def jacobi_transform(f: RadialProfile, order: OrderPair, lam, rtol: float = 1e-12,
                     method: str = "auto"):
    """Jacobi transform ``fhat(lam)`` at a spectral point or an array of points."""
    if hasattr(lam, "value"):
        lam = lam.value
    return JacobiTransform(f, order, rtol=rtol, method=method)(lam)


# ---------------------------------------------------------------------------
# integrals over the spectral half line
# ---------------------------------------------------------------------------

def spectral_integral(g, tol: float, mu_max: float = DEFAULT_MU_MAX, start: float = 0.125,
                      mu_min_stop: float = 4.0) -> tuple:
    """``int_0^inf g(mu) dmu`` over ``[0, start]`` and then dyadic segments.

    Integration stops after two consecutive segments beyond ``mu_min_stop``
    each contribute less than ``tol/8`` in max norm, or at ``mu_max``.
    Returns ``(value, truncation)``; ``g`` may be vector valued (last axis
    is the node axis).
    """
    a, b = 0.0, start
    total = 0.0
    quiet = 0
    while True:
        res = integrate_finite(g, a, b, tol=0.125 * tol, max_intervals=50_000)
        if not res.converged:
            raise ConvergenceError(f"spectral integral on [{a:g}, {b:g}] did not converge",
                                   res.error_estimate)
        total = total + np.asarray(res.value)
        small = float(np.max(np.abs(res.value))) < 0.125 * tol
        quiet = quiet + 1 if (small and a >= mu_min_stop) else 0
        if quiet >= 2 or b >= mu_max:
            break
        a, b = b, min(2.0 * b, mu_max)
    total = total[()] if np.ndim(total) == 0 else total
    return total, b


def inverse_jacobi_transform(fhat, order: OrderPair, t, tol: float = 1e-12,
                             mu_max: float = DEFAULT_MU_MAX):
    """``(1/2pi) int_0^inf fhat(mu) phi_mu(t) |c(mu)|^-2 dmu`` at radii ``t``.

    ``fhat`` is a vectorized callable of real ``mu`` (for instance a
    :class:`JacobiTransform`).  ``tol`` is absolute.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("t must be finite and nonnegative")
    tt = np.atleast_1d(t).ravel()

    def g(mu):
        w = np.real(fhat(mu)) * c_function_density(order, mu)
        return np.real(jacobi_phi(order, mu[None, :], tt[:, None])) * w

    val, _ = spectral_integral(g, tol / INVERSION_CONSTANT, mu_max)
    out = (INVERSION_CONSTANT * np.asarray(val)).reshape(t.shape)
    return out[()] if out.ndim == 0 else out


def _spectral_scale(fhat, order: OrderPair) -> float:
    mu = np.geomspace(1e-2, 1e2, 64)
    return float(np.max(np.abs(fhat(mu)) ** 2 * c_function_density(order, mu) * mu))


def plancherel_hyp(f: RadialProfile, order: OrderPair, *, fhat=None, rtol: float = 1e-10) -> float:
    """Spectral side of Plancherel: ``(1/2pi) int |fhat|^2 |c|^-2 dmu``."""
    fhat = _transform_for(f, order, fhat)
    if fhat.radius == 0.0:
        return 0.0

    def g(mu):
        return np.abs(fhat(mu)) ** 2 * c_function_density(order, mu)

    val, _ = spectral_integral(g, rtol * _spectral_scale(fhat, order))
    return INVERSION_CONSTANT * float(val)


def spectral_cutoff(fhat, order: OrderPair, rel: float = 1e-6, mu_max: float = DEFAULT_MU_MAX) -> tuple:
    """Frequency ``M`` beyond which the Plancherel mass of ``fhat`` is below
    ``rel**2`` times the total.

    By Plancherel, discarding the spectrum above ``M`` changes the inverse
    transform by at most ``rel`` in relative ``L^2(Delta dt)``.  Returns
    ``(M, tail)`` with ``tail`` the relative mass found beyond ``M`` on the
    dyadic segments that were integrated.
    """
    def g(mu):
        return np.abs(fhat(mu)) ** 2 * c_function_density(order, mu)

    edges = [0.0, 0.125]
    masses = []
    while True:
        a, b = edges[-2], edges[-1]
        # roundoff in fhat leaves a noise floor, so the target is absolute
        floor = 1e-4 * rel * rel * sum(masses) if masses else 1e-300
        res = integrate_finite(g, a, b, tol=max(floor, 1e-300), rtol=1e-8, max_intervals=50_000)
        if not res.converged:
            raise ConvergenceError(f"spectral mass on [{a:g}, {b:g}] did not converge", res.error_estimate)
        masses.append(float(res.value))
        total = sum(masses)
        quiet = len(masses) >= 3 and b > 4.0 and max(masses[-2:]) < 1e-3 * rel * rel * total
        if quiet or b >= mu_max:
            break
        edges.append(min(2.0 * b, mu_max))
    total = sum(masses)
    tail = 0.0
    for k in range(len(masses) - 1, 0, -1):
        if (tail + masses[k]) > rel * rel * total:
            return edges[k + 1], tail / total
        tail += masses[k]
    return edges[1], tail / total


def roundtrip_error(f: RadialProfile, order: OrderPair, *, fhat=None, panels: int = 24,
                    nodes: int = 16, rel: float = 1e-6, tol: float = 1e-8) -> float:
    """Relative ``L^2(Delta dt)`` error of ``inverse(transform(f))`` against ``f``.

    The inversion integral stops at :func:`spectral_cutoff` ``(rel)``, which
    contributes at most ``rel`` to the result; ``tol`` is the pointwise
    quadrature tolerance relative to the peak of ``f`` (roundoff in
    ``fhat`` is amplified by ``|c|^-2`` at high frequency, so much tighter
    targets are not reachable).  The spatial norm
    uses composite Gauss-Legendre over ``[0, T]``.
    """
    fhat = _transform_for(f, order, fhat)
    T = fhat.radius
    if T == 0.0:
        return 0.0
    M, _ = spectral_cutoff(fhat, order, rel)
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.unique(np.concatenate([np.linspace(0.0, T, panels + 1), fhat.pts]))
    h = np.diff(edges)
    t = (edges[:-1, None] + 0.5 * h[:, None] * (1.0 + x[None, :])).ravel()
    wt = (0.5 * h[:, None] * w[None, :]).ravel() * delta_density(order, t)
    back = inverse_jacobi_transform(fhat, order, t, tol=tol * max(f.peak, 1e-300), mu_max=M)
    ref = f(t)
    num = float(np.sum(wt * (back - ref) ** 2))
    den = float(np.sum(wt * ref ** 2))
    return math.sqrt(num / den)


# ---------------------------------------------------------------------------
# spherical means
# ---------------------------------------------------------------------------

def _require_geometric(order: OrderPair) -> None:
    if order.beta != -0.5:
        raise ValueError(
            "the geometric spherical mean exists only for beta = -1/2; "
            "use spherical_mean_spectral for other orders")


def _sin_weight_total(alpha: float) -> float:
    # int_0^pi sin^(2 alpha) theta dtheta
    return math.sqrt(math.pi) * math.exp(math.lgamma(alpha + 0.5) - math.lgamma(alpha + 1.0))


def _mean_minus_hyp(f: RadialProfile, alpha: float, t: float, s: np.ndarray, R: float,
                    tol: float) -> np.ndarray:
    """``M^t f(s) - f(s)`` for ``beta = -1/2`` (hyperbolic cosine rule).

    The distance is ``arccosh(1 + y)`` with
    ``y = 2 sinh^2((s - t)/2) + 2 sinh s sinh t cos^2(theta/2)``, written so
    no cancellation occurs for small ``s`` or ``t``.  theta is split where
    the distance crosses the effective radius ``R``.
    """
    W = _sin_weight_total(alpha)
    fs = f(s)
    y0 = 2.0 * np.sinh(0.5 * (s - t)) ** 2
    sst = 2.0 * np.sinh(s) * math.sinh(t)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        c2 = (math.cosh(R) - 1.0 - y0) / sst
    # cos^2(theta_c / 2) = c2; distance < R for theta > theta_c
    c2 = np.where(np.isfinite(c2), c2, np.inf)
    theta_c = np.where(c2 >= 1.0, 0.0, np.where(c2 <= 0.0, math.pi,
                                                  2.0 * np.arccos(np.sqrt(np.clip(c2, 0.0, 1.0)))))

    def g(v):
        th_a = np.multiply.outer(theta_c, v)
        th_b = theta_c[:, None] + np.multiply.outer(math.pi - theta_c, v)
        out = 0.0
        for th, width in ((th_a, theta_c), (th_b, math.pi - theta_c)):
            y = y0[:, None] + sst[:, None] * np.cos(0.5 * th) ** 2
            u = np.log1p(y + np.sqrt(y * (y + 2.0)))
            w = np.sin(th) ** (2 * alpha) if alpha != 0 else 1.0
            out = out + width[:, None] * (f(u) - fs[:, None]) * w
        return out

    res = integrate_finite(g, 0.0, 1.0, tol=tol * W, max_intervals=200_000)
    if not res.converged:
        raise ConvergenceError(f"hyperbolic spherical mean of {f!r} did not converge at t={t}",
                               res.error_estimate / W)
    return np.asarray(res.value) / W


def _effective_radius(f: RadialProfile) -> float:
    R = f.effective_radius()
    if not math.isfinite(R):
        # a profile without an effective radius is sampled through its full range
        return 50.0
    return R


def spherical_mean_hyp(f: RadialProfile, order: OrderPair, t: float, s, tol: float | None = None):
    """Geometric spherical mean ``M^t f(s)`` for ``beta = -1/2``.

    Averages ``f(arccosh(cosh s cosh t + sinh s sinh t cos theta))`` against
    the normalized ``sin^(2 alpha) theta dtheta``.
    """
    _require_geometric(order)
    s = np.asarray(s, dtype=float)
    if not (math.isfinite(t) and t >= 0) or np.any(s < 0):
        raise ValueError("t and s must be finite and nonnegative")
    if t == 0 or f.effective_radius() == 0.0:
        out = np.asarray(f(s), dtype=float)
    else:
        tol = 1e-13 * max(f.peak, 1e-300) if tol is None else tol
        flat = np.atleast_1d(s).ravel()
        d = _mean_minus_hyp(f, order.alpha, float(t), flat, _effective_radius(f), tol)
        out = (f(flat) + d).reshape(s.shape)
    return out[()] if out.ndim == 0 else out


def spherical_mean_spectral(f: RadialProfile, order: OrderPair, t: float, s, *, fhat=None,
                            tol: float = 1e-9, rel: float = 1e-8):
    """``M^t f(s)`` as the inverse transform of ``phi_mu(t) fhat(mu)``; any order.

    The inversion stops at :func:`spectral_cutoff` ``(rel)`` of ``f``, which
    bounds the truncation error in ``L^2(Delta dt)`` by ``rel ||f||_2``
    since ``|phi_mu(t)| <= 1``.
    """
    fhat = _transform_for(f, order, fhat)
    if not (math.isfinite(t) and t >= 0):
        raise ValueError("t must be finite and nonnegative")
    M, _ = spectral_cutoff(fhat, order, rel)

    def shifted(mu):
        return np.real(jacobi_phi(order, mu, t)) * fhat(mu)

    return inverse_jacobi_transform(shifted, order, s, tol=tol * max(f.peak, 1e-300), mu_max=M)


class MeanProfile(RadialProfile):
    """The radial function ``s -> M^t f(s)`` for ``beta = -1/2``."""

    family = "spherical_mean"

    def __init__(self, f: RadialProfile, order: OrderPair, t: float):
        _require_geometric(order)
        self.f = f
        self.order = order
        self.t = float(t)
        R = _effective_radius(f)
        self.support = R + self.t if math.isfinite(f.support) else math.inf
        self._radius = R + self.t
        self.decay_hint = f.decay_hint
        self.breakpoints = tuple(sorted({abs(self.t - b) for b in f.breakpoints}
                                        | {self.t + b for b in f.breakpoints} | {self.t}))

    def _eval(self, r):
        return np.asarray(spherical_mean_hyp(self.f, self.order, self.t, r), dtype=float)

    @property
    def peak(self):
        return self.f.peak

    def effective_radius(self):
        return self._radius

    @property
    def params(self):
        return {"base": self.f.to_dict(), "t": self.t}


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def lp_norm_hyp(f: RadialProfile, order: OrderPair, p: float, rtol: float = 1e-12) -> float:
    """``(int |f|^p Delta dt)^(1/p)``."""
    if not 1 <= p < math.inf:
        raise ValueError("p must be finite and >= 1")
    T = hyp_radius(f, order)
    if T == 0.0:
        return 0.0
    pts = [b for b in f.breakpoints if 0 < b < T]
    res = integrate_finite(lambda t: np.abs(f(t)) ** p * delta_density(order, t), 0.0, T,
                           tol=1e-300, rtol=rtol, points=pts)
    if not res.converged:
        raise ConvergenceError(f"L^{p} norm of {f!r} did not converge", res.error_estimate)
    return float(res.value) ** (1.0 / p)


_S_BLOCK = 96


def diff_norm_hyp(f: RadialProfile, order: OrderPair, p: float, t: float, *, fhat=None,
                  rtol: float = 1e-10) -> float:
    """``||M^t f - f||_{L^p(Delta dt)}`` computed in space.

    ``beta = -1/2`` uses the geometric mean; other orders evaluate ``M^t f``
    spectrally (slower, and limited by the inverse-transform tolerance).
    """
    if not 1 <= p < math.inf:
        raise ValueError("p must be finite and >= 1")
    if not (math.isfinite(t) and t >= 0):
        raise ValueError("t must be finite and nonnegative")
    T = hyp_radius(f, order)
    if t == 0 or T == 0.0:
        return 0.0
    small = min(1.0, t * t)
    if order.beta == -0.5:
        R = _effective_radius(f)
        inner_tol = f.peak * max(1e-13 * small, 100 * _EPS)
        rtol = max(rtol, 1e3 * _EPS / small)

        def diff(s):
            return np.concatenate([_mean_minus_hyp(f, order.alpha, t, s[k:k + _S_BLOCK], R, inner_tol)
                                   for k in range(0, s.size, _S_BLOCK)])
    else:
        fhat = _transform_for(f, order, fhat)
        rtol = max(rtol, 1e-6)

        def diff(s):
            return spherical_mean_spectral(f, order, t, s, fhat=fhat, tol=1e-10 * small) - f(s)

    def g(s):
        return np.abs(diff(s)) ** p * delta_density(order, s)

    upper = t + T
    extra = [t, abs(t - T), T, *[abs(t - b) for b in f.breakpoints], *[t + b for b in f.breakpoints]]
    pts = [b for b in extra if 0 < b < upper]
    res = integrate_finite(g, 0.0, upper, tol=1e-300, rtol=rtol, points=pts, max_intervals=20_000)
    if not res.converged:
        raise ConvergenceError(f"||M^t f - f||_{p} for {f!r} at t={t} did not converge",
                               res.error_estimate)
    return float(res.value) ** (1.0 / p)


def _weighted_spectral(f, order, fhat, weight, rtol):
    fhat = _transform_for(f, order, fhat)
    if fhat.radius == 0.0:
        return 0.0

    def g(mu):
        return weight(mu) * np.abs(fhat(mu)) ** 2 * c_function_density(order, mu)

    val, _ = spectral_integral(g, rtol * _spectral_scale(fhat, order))
    return INVERSION_CONSTANT * float(val)


def diff_norm_hyp_spectral(f: RadialProfile, order: OrderPair, t: float, *, fhat=None,
                           rtol: float = 1e-10) -> float:
    """``||M^t f - f||_2`` from Plancherel: ``(1/2pi) int |1 - phi_mu(t)|^2 |fhat|^2 |c|^-2``."""
    if t == 0:
        return 0.0

    def weight(mu):
        return np.abs(1.0 - jacobi_phi(order, mu, t)) ** 2

    return math.sqrt(_weighted_spectral(f, order, fhat, weight, rtol))


def theorem6_lhs(f: RadialProfile, order: OrderPair, t: float, *, fhat=None,
                 rtol: float = 1e-10) -> float:
    """``((1/2pi) int min{1, (mu t)^4} |fhat(mu)|^2 |c(mu)|^-2 dmu)^(1/2)``."""
    if not (math.isfinite(t) and t >= 0):
        raise ValueError("t must be finite and nonnegative")
    if t == 0:
        return 0.0

    def weight(mu):
        return np.minimum(1.0, (mu * t) ** 4)

    return math.sqrt(_weighted_spectral(f, order, fhat, weight, rtol))


def _strip_check(order: OrderPair, p: float, eta: float) -> None:
    if not 1.0 <= p < 2.0:
        raise ValueError(f"the sup form needs p in [1, 2) (got {p})")
    half = strip_halfwidth(p, order.rho)
    if not abs(eta) < half:
        raise ValueError(f"|eta| = {abs(eta):g} lies outside the strip |eta| < (2/p - 1) rho = {half:g}")


def theorem5_lhs(f: RadialProfile, order: OrderPair, p: float, eta: float, t: float, *, fhat=None,
                 mu_grid: GridSpec = DEFAULT_MU_GRID) -> float:
    """``sup_mu min{1, (t mu)^2} |fhat(mu + i eta)|`` over the mu-grid."""
    _strip_check(order, p, eta)
    if not (math.isfinite(t) and t >= 0):
        raise ValueError("t must be finite and nonnegative")
    if t == 0:
        return 0.0
    fhat = _transform_for(f, order, fhat)
    mu = mu_grid.nodes()
    vals = np.abs(fhat(mu + 1j * eta))
    return float(np.max(np.minimum(1.0, (t * mu) ** 2) * vals))


def corollary7_tail(f: RadialProfile, order: OrderPair, p: float, eta: float, t: float, *,
                    fhat=None, mu_grid: GridSpec = DEFAULT_MU_GRID, rtol: float = 1e-10) -> float:
    """Spectral tail beyond ``1/t``.

    ``p < 2``: ``sup_{mu > 1/t} |fhat(mu + i eta)|`` on the mu-grid;
    ``p = 2``: ``((1/2pi) int_{mu > 1/t} |fhat|^2 |c|^-2)^(1/2)``.
    """
    if not (math.isfinite(t) and t > 0):
        raise ValueError("the tail needs t > 0")
    if p == 2.0:
        # the indicator jump sits at 1/t; split the integral there
        fh = _transform_for(f, order, fhat)

        def g(mu):
            return np.abs(fh(mu)) ** 2 * c_function_density(order, mu)

        tol = rtol * _spectral_scale(fh, order)
        full, T = spectral_integral(g, tol)
        if 1.0 / t >= T:
            return 0.0
        res = integrate_finite(g, 0.0, 1.0 / t, tol=0.25 * tol, max_intervals=50_000)
        if not res.converged:
            raise ConvergenceError("spectral head integral did not converge", res.error_estimate)
        return math.sqrt(max(INVERSION_CONSTANT * (float(full) - float(res.value)), 0.0))
    _strip_check(order, p, eta)
    fhat = _transform_for(f, order, fhat)
    mu = mu_grid.nodes()
    tail = mu[mu > 1.0 / t]
    if tail.size == 0:
        return 0.0
    return float(np.max(np.abs(fhat(tail + 1j * eta))))
