"""Special functions: normalized Bessel, Jacobi functions, density, c-function.

Conventions
-----------
``j_alpha(x) = 2**alpha * Gamma(alpha+1) * x**(-alpha) * J_alpha(x)`` so that
``j_alpha(0) = 1``.  Jacobi functions use ``rho = alpha + beta + 1`` and the
density ``Delta(t) = (2 sinh t)**(2 alpha+1) * (2 cosh t)**(2 beta+1)``.
The c-function is

    c(lam) = 2**(rho - i lam) Gamma(alpha+1) Gamma(i lam)
             / (Gamma((i lam + rho)/2) Gamma((i lam + alpha - beta + 1)/2))

which makes ``f(t) = (1/2pi) int_0^inf fhat(mu) phi_mu(t) |c(mu)|**-2 dmu``
the inverse of ``fhat(lam) = int_0^inf f(t) phi_lam(t) Delta(t) dt``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import jv

from .errors import ConvergenceError, PrecisionWarning
from .quad import _composite_jacobi, integrate_endpoint_singular

__all__ = [
    "OrderPair",
    "SpectralPoint",
    "MultiplicityPair",
    "multiplicities_to_order",
    "loggamma",
    "bessel_j_norm",
    "one_minus_j",
    "one_minus_j_mehler",
    "mehler_j",
    "hyp2f1_series",
    "jacobi_phi",
    "jacobi_phi_ode",
    "delta_density",
    "c_function",
    "c_function_density",
]

# Switch points (covered by the cross-path tests).
BESSEL_SERIES_MAX = 4.0
ONE_MINUS_J_SERIES_MAX = 2.0
_SERIES_TERMS = 40


@dataclass(frozen=True)
class OrderPair:
    """Jacobi order ``(alpha, beta)``; ``rho`` is always recomputed."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("orders must be finite")
        if not self.alpha > -0.5:
            raise ValueError(f"alpha must exceed -1/2 (got {self.alpha})")

    @property
    def rho(self) -> float:
        return self.alpha + self.beta + 1.0

    @property
    def in_classical_range(self) -> bool:
        return -0.5 <= self.beta <= self.alpha

    def require_classical_range(self) -> None:
        if not self.in_classical_range:
            raise ValueError(
                f"order (alpha={self.alpha}, beta={self.beta}) outside -1/2 <= beta <= alpha"
            )

    @property
    def is_real_hyperbolic(self) -> bool:
        return self.beta == -0.5

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "rho": self.rho}


@dataclass(frozen=True)
class SpectralPoint:
    """Complex spectral parameter ``mu + i eta``."""

    mu: float
    eta: float = 0.0

    @property
    def value(self) -> complex:
        return complex(self.mu, self.eta)

    def in_strip(self, eta0: float) -> bool:
        return abs(self.eta) <= eta0

    def in_Dp(self, p: float, rho: float) -> bool:
        if not 1 < p < 2:
            raise ValueError("D_p is defined for 1 < p < 2")
        return abs(self.eta) < (2.0 / p - 1.0) * rho


@dataclass(frozen=True)
class MultiplicityPair:
    m_gamma: int
    m_2gamma: int

    def __post_init__(self):
        for v in (self.m_gamma, self.m_2gamma):
            if int(v) != v or v < 0:
                raise ValueError("root multiplicities are nonnegative integers")
        if self.m_gamma < 1:
            raise ValueError("m_gamma must be at least 1")


def multiplicities_to_order(m: MultiplicityPair) -> OrderPair:
    order = OrderPair((m.m_gamma + m.m_2gamma - 1) / 2, (m.m_2gamma - 1) / 2)
    # half-sum of positive roots must agree with alpha + beta + 1
    assert order.rho == (m.m_gamma + 2 * m.m_2gamma) / 2
    return order


# ---------------------------------------------------------------------------
# complex log-gamma (Stirling series after upward recurrence)
# ---------------------------------------------------------------------------

_STIRLING = np.array([
    1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188,
    -691 / 360360, 1 / 156, -3617 / 122400,
])
_STIRLING_SHIFT = 15.0
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def loggamma(z):
    """A logarithm of Gamma(z) for complex ``z`` (not necessarily principal).

    ``Gamma(z) = exp(loggamma(z))`` to ~1e-14 relative away from the poles.
    """
    z = np.asarray(z, dtype=complex)
    shift = np.clip(np.ceil(_STIRLING_SHIFT - z.real), 0, None)
    acc = np.zeros(z.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in range(int(shift.max(initial=0))):
            acc += np.where(k < shift, np.log(z + k), 0.0)
        w = z + shift
        winv2 = 1.0 / (w * w)
        series = np.zeros(z.shape, dtype=complex)
        for c in _STIRLING[::-1]:
            series = series * winv2 + c
        out = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series / w - acc
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# normalized Bessel functions
# ---------------------------------------------------------------------------

def _check_alpha(alpha: float) -> None:
    if not alpha > -0.5:
        raise ValueError(f"alpha must exceed -1/2 (got {alpha})")


def _check_x(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("argument must be finite")
    if np.any(x < 0):
        raise ValueError("argument must be nonnegative")
    return x


def _j_series(alpha: float, x: np.ndarray, skip_first: bool = False) -> np.ndarray:
    # sum_k (-x^2/4)^k / (k! (alpha+1)_k), summed smallest-first
    q = -0.25 * x * x
    terms = [np.ones_like(x)]
    for k in range(1, _SERIES_TERMS):
        terms.append(terms[-1] * q / (k * (alpha + k)))
    start = 1 if skip_first else 0
    out = np.zeros_like(x)
    for t in reversed(terms[start:]):
        out = out + t
    return out


def bessel_j_norm(alpha: float, x):
    """Normalized Bessel function ``j_alpha(x)``, vectorized over ``x``.

    Power series for ``x <= 4``; above that the scaled ``J_alpha`` from
    scipy (AMOS/Cephes) with the normalization applied in log space.
    """
    _check_alpha(alpha)
    x = _check_x(x)
    out = np.empty_like(x)
    small = x <= BESSEL_SERIES_MAX
    out[small] = _j_series(alpha, x[small])
    big = ~small
    if big.any():
        xb = x[big]
        logpref = alpha * math.log(2.0) + math.lgamma(alpha + 1.0) - alpha * np.log(xb)
        out[big] = np.exp(logpref) * jv(alpha, xb)
    return out[()] if out.ndim == 0 else out


def one_minus_j(alpha: float, x):
    """``1 - j_alpha(x)`` without cancellation at small ``x``.

    The series of ``1 - j`` (no constant term) is used for ``x <= 2``, so the
    relative error stays at rounding level as ``x -> 0``.
    """
    _check_alpha(alpha)
    x = _check_x(x)
    out = np.empty_like(x)
    small = x <= ONE_MINUS_J_SERIES_MAX
    out[small] = -_j_series(alpha, x[small], skip_first=True)
    big = ~small
    if big.any():
        out[big] = 1.0 - bessel_j_norm(alpha, x[big])
    return out[()] if out.ndim == 0 else out


def _mehler_prefactor(alpha: float) -> float:
    return 2.0 * math.exp(math.lgamma(alpha + 1.0) - math.lgamma(alpha + 0.5)) / math.sqrt(math.pi)


def _mehler_integral(alpha: float, x: np.ndarray, kernel, tol: float):
    e = alpha - 0.5

    def smooth(y):
        # weight (1-y^2)^e = (1-y)^e (1+y)^e; the first factor is in the rule
        return (1.0 + y) ** e * kernel(np.multiply.outer(x, y))

    res = integrate_endpoint_singular(smooth, 0.0, 1.0, e, tol=tol, n_start=32, n_max=4096)
    if not res.converged:
        raise ConvergenceError(
            f"Mehler quadrature for alpha={alpha} reached error {res.error_estimate:.3g} > {tol:.3g}",
            res.error_estimate,
        )
    return res.value


def mehler_j(alpha: float, x, tol: float = 1e-13):
    """``j_alpha(x)`` by quadrature of the Mehler cosine integral.

    The endpoint weight ``(1 - y^2)**(alpha - 1/2)`` is carried by a
    Gauss-Jacobi rule, so ``alpha < 1/2`` needs no special handling.
    """
    _check_alpha(alpha)
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = _check_x(x)
    scale = _mehler_prefactor(alpha)
    val = scale * _mehler_integral(alpha, np.atleast_1d(x), np.cos, tol / scale)
    return val.reshape(x.shape)[()] if x.ndim == 0 else val.reshape(x.shape)


def one_minus_j_mehler(alpha: float, x, tol: float = 1e-13):
    """``1 - j_alpha(x)`` from the sin^2 form of the Mehler integral."""
    _check_alpha(alpha)
    x = _check_x(x)
    scale = 2.0 * _mehler_prefactor(alpha)

    def sin2(arg):
        s = np.sin(0.5 * arg)
        return s * s

    val = scale * _mehler_integral(alpha, np.atleast_1d(x), sin2, tol / scale)
    return val.reshape(x.shape)[()] if x.ndim == 0 else val.reshape(x.shape)


# ---------------------------------------------------------------------------
# Gauss hypergeometric series and Jacobi functions
# ---------------------------------------------------------------------------

def hyp2f1_series(a, b, c, z, max_terms: int = 20000):
    """Vectorized power series of 2F1(a, b; c; z) for ``|z| < 1``.

    Returns ``(value, peak)`` where ``peak`` is the largest term modulus,
    which bounds the rounding error by roughly ``eps * peak``.
    """
    a, b, c, z = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, z)))
    shape = a.shape
    a, b, c, z = (v.ravel() for v in (a, b, c, z))
    total = np.ones(a.size, dtype=complex)
    peak = np.ones(a.size)
    term = np.ones(a.size, dtype=complex)
    idx = np.arange(a.size)
    aa, bb, cc, zz = a, b, c, z
    for k in range(max_terms):
        term = term * (aa + k) * (bb + k) / ((cc + k) * (k + 1)) * zz
        total[idx] += term
        mag = np.abs(term)
        peak[idx] = np.maximum(peak[idx], mag)
        if k % 8 == 7:
            live = mag > 1e-17 * np.maximum(np.abs(total[idx]), 1e-300)
            if not live.all():
                idx, term = idx[live], term[live]
                aa, bb, cc, zz = aa[live], bb[live], cc[live], zz[live]
                if idx.size == 0:
                    break
    else:
        raise ConvergenceError(f"2F1 series did not converge in {max_terms} terms")
    return total.reshape(shape), peak.reshape(shape)


def _log2cosh(t):
    return t + np.log1p(np.exp(-2.0 * t))


def c_function(order: OrderPair, lam):
    """Harish-Chandra c-function ``c(lam)`` (complex, vectorized)."""
    lam = np.asarray(lam, dtype=complex)
    a, b, rho = order.alpha, order.beta, order.rho
    il = 1j * lam
    logc = ((rho - il) * math.log(2.0) + math.lgamma(a + 1.0) + loggamma(il)
            - loggamma(0.5 * (il + rho)) - loggamma(0.5 * (il + a - b + 1.0)))
    return np.exp(logc)


def c_function_density(order: OrderPair, mu):
    """Plancherel density ``|c(mu)|**-2`` for ``mu > 0``."""
    mu = np.asarray(mu, dtype=float)
    if np.any(~(mu > 0)):
        raise ValueError("c-function density is evaluated for mu > 0 only")
    a, b, rho = order.alpha, order.beta, order.rho
    il = 1j * mu
    re_logc = (rho * math.log(2.0) + math.lgamma(a + 1.0) + loggamma(il).real
               - loggamma(0.5 * (il + rho)).real - loggamma(0.5 * (il + a - b + 1.0)).real)
    out = np.exp(-2.0 * re_logc)
    return out[()] if out.ndim == 0 else out


def _phi_tanh_series(order: OrderPair, lam, t):
    # phi = (cosh t)^(-rho - i lam) 2F1((rho+i lam)/2, (alpha-beta+1+i lam)/2; alpha+1; tanh^2 t)
    a, b, rho = order.alpha, order.beta, order.rho
    il = 1j * lam
    F, _ = hyp2f1_series(0.5 * (rho + il), 0.5 * (a - b + 1.0 + il), a + 1.0, np.tanh(t) ** 2)
    logcosh = _log2cosh(t) - math.log(2.0)
    return np.exp(-(rho + il) * logcosh) * F


def _Phi(order: OrderPair, lam, t):
    # Phi_lam(t) = (2 cosh t)^(i lam - rho) 2F1((rho - i lam)/2, (alpha-beta+1-i lam)/2; 1 - i lam; cosh^-2 t)
    a, b, rho = order.alpha, order.beta, order.rho
    il = 1j * lam
    z = 1.0 / np.cosh(t) ** 2
    F, _ = hyp2f1_series(0.5 * (rho - il), 0.5 * (a - b + 1.0 - il), 1.0 - il, z)
    return np.exp((il - rho) * _log2cosh(t)) * F


def _phi_c_expansion(order: OrderPair, lam, t):
    return c_function(order, lam) * _Phi(order, lam, t) + c_function(order, -lam) * _Phi(order, -lam, t)


_DEGENERATE_RADIUS = 0.1
_CIRCLE_RADIUS = 0.3
_PRECISION_FLAG = 1e-8


def _near_degenerate(lam):
    # the expansion has cancelling poles at lam = i k, k integer
    return (np.abs(lam.real) < _DEGENERATE_RADIUS) & (np.abs(lam.imag - np.round(lam.imag)) < _DEGENERATE_RADIUS)


def _phi_expansion_regular(order: OrderPair, lam, t):
    out = np.empty(lam.shape, dtype=complex)
    deg = _near_degenerate(lam)
    reg = ~deg
    if reg.any():
        out[reg] = _phi_c_expansion(order, lam[reg], t[reg])
    if deg.any():
        # phi is entire in lam: mean value over a circle avoiding the poles
        ld, td = lam[deg], t[deg]
        m = int(8 * math.ceil((32 + 2.5 * float(td.max())) / 8))
        ring = _CIRCLE_RADIUS * np.exp(2j * math.pi * (np.arange(m) + 0.5) / m)
        L = (ld[:, None] + ring[None, :]).ravel()
        T = np.repeat(td, m)
        ring_vals = _phi_c_expansion(order, L, T).reshape(-1, m)
        mean = ring_vals.mean(axis=1)
        # ring terms grow like e^(0.3 t) while the mean does not
        lost = np.finfo(float).eps * np.abs(ring_vals).max(axis=1)
        if np.any(lost > _PRECISION_FLAG * np.maximum(np.abs(mean), 1e-300)):
            warnings.warn(
                f"jacobi_phi near lam in iZ at t = {float(td.max()):g}: relative error may reach "
                f"{float(np.max(lost / np.maximum(np.abs(mean), 1e-300))):.1e}",
                PrecisionWarning, stacklevel=4)
        out[deg] = mean
    return out


def _as_lambda(lam):
    if isinstance(lam, SpectralPoint):
        return np.asarray(lam.value)
    return np.asarray(lam, dtype=complex)


def _phi_mehler(order: OrderPair, lam, t, tol: float = 1e-12):
    """Mehler-type integral, free of cancellation when ``|lam| t`` is large.

    phi = K (sinh 2t)^(-2a) (cosh t)^(a-b) int_0^t cos(lam s) (cosh 2t - cosh 2s)^(a-1/2)
          2F1(a+b, a-b; a+1/2; (cosh t - cosh s)/(2 cosh t)) ds,
    K = 2^(a+3/2) Gamma(a+1) / (sqrt(pi) Gamma(a+1/2)).  With s = t u the
    factor (1-u)^(a-1/2) goes into a Gauss-Jacobi rule on the last panel.
    """
    a, b = order.alpha, order.beta
    e = a - 0.5
    logK = (a + 1.5) * math.log(2.0) + math.lgamma(a + 1.0) - math.lgamma(a + 0.5) - 0.5 * math.log(math.pi)
    logpre = logK - 2 * a * np.log(np.sinh(2 * t)) + (a - b) * np.log(np.cosh(t)) + (e + 1.0) * np.log(t)

    def kernel(tv, panels, n):
        # lam-independent part of the integrand at one t, weights folded in
        u, w = _composite_jacobi(panels, n, e)
        s = tv * u
        d = tv - s
        kern = (2.0 * np.sinh(tv + s) * (np.sinh(d) / d)) ** e
        ch = math.cosh(tv)
        F, _ = hyp2f1_series(a + b, a - b, a + 0.5, (ch - np.cosh(s)) / (2.0 * ch))
        return s, w * kern * F.real

    out = np.empty(lam.shape, dtype=complex)
    # group by t: the kernel is shared and the lam dependence is a matrix product
    tu, inv = np.unique(t, return_inverse=True)
    for k, tv in enumerate(tu):
        idx = np.flatnonzero(inv == k)
        lk = lam[idx]
        tv = float(tv)
        # about two oscillations per panel
        panels = int(math.ceil(float(np.max(np.abs(lk))) * tv / 12.0)) + 1
        s0, kw0 = kernel(tv, panels, 32)
        s1, kw1 = kernel(tv, panels, 48)
        c1 = np.cos(lk[:, None] * s1[None, :])
        cur = c1 @ kw1
        prev = np.cos(lk[:, None] * s0[None, :]) @ kw0
        mag = np.abs(c1) @ np.abs(kw1)
        err = np.abs(cur - prev)
        if np.any(err > tol * np.maximum(1.0, mag)):
            raise ConvergenceError("Mehler-type integral for phi did not converge", float(np.max(err)))
        out[idx] = cur
    return np.exp(logpre) * out


# regime boundaries for jacobi_phi
_SERIES_LT_MAX = 6.0
_SERIES_T_MAX = 1.0
_MEHLER_T_MAX = 2.0


def jacobi_phi(order: OrderPair, lam, t):
    """Jacobi function of the first kind ``phi_lam^{(alpha,beta)}(t)``.

    ``lam`` may be a :class:`SpectralPoint`, a complex scalar or an array;
    it broadcasts against ``t``.  Three representations cover the domain:

    * ``t <= 1`` and ``|lam| t <= 6``: the 2F1 series in ``tanh^2 t``;
    * ``t <= 2`` and ``|lam| t > 6``: a Mehler-type integral over
      ``cos(lam s)`` (the power series lose digits to cancellation here);
    * otherwise the c-function expansion
      ``c(lam) Phi_lam(t) + c(-lam) Phi_-lam(t)`` whose series runs in
      ``1/cosh^2 t``.  Near ``lam in iZ`` the two terms have cancelling
      poles, and the value is taken as the mean over a small circle in
      ``lam`` (exact for entire functions).
    """
    lam = _as_lambda(lam)
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)) or np.any(t < 0):
        raise ValueError("t must be finite and nonnegative")
    lam_b, t_b = np.broadcast_arrays(lam, t)
    shape = lam_b.shape
    lam_f = lam_b.ravel().astype(complex)
    t_f = t_b.ravel().astype(float)
    out = np.ones(lam_f.size, dtype=complex)
    pos = t_f > 0
    lt = np.abs(lam_f) * t_f
    series = pos & (t_f <= _SERIES_T_MAX) & (lt <= _SERIES_LT_MAX)
    mehler = pos & ~series & (t_f <= _MEHLER_T_MAX) & (lt > _SERIES_LT_MAX)
    expand = pos & ~series & ~mehler
    if series.any():
        out[series] = _phi_tanh_series(order, lam_f[series], t_f[series])
    if mehler.any():
        out[mehler] = _phi_mehler(order, lam_f[mehler], t_f[mehler])
    if expand.any():
        out[expand] = _phi_expansion_regular(order, lam_f[expand], t_f[expand])
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


# Taylor coefficients (in t^2) of t coth t and t tanh t
_TCOTH = (1.0, 1 / 3, -1 / 45, 2 / 945, -1 / 4725, 2 / 93555)
_TTANH = (0.0, 1.0, -1 / 3, 2 / 15, -17 / 315, 62 / 2835)


def _ode_start(order: OrderPair, E, t0):
    # Frobenius series u = sum u_k t^(2k) for t^2 u'' + t P(t) u' + E t^2 u = 0
    P = [(2 * order.alpha + 1) * c + (2 * order.beta + 1) * d for c, d in zip(_TCOTH, _TTANH)]
    u = [np.ones_like(E)]
    for k in range(1, len(P)):
        s = E * u[k - 1]
        for j in range(1, k + 1):
            s = s + P[j] * (2 * k - 2 * j) * u[k - j]
        u.append(-s / ((2 * k) * (2 * k - 1) + P[0] * 2 * k))
    val = sum(u[k] * t0 ** (2 * k) for k in range(len(u)))
    der = sum(2 * k * u[k] * t0 ** (2 * k - 1) for k in range(1, len(u)))
    return val, der


def jacobi_phi_ode(order: OrderPair, lams, ts, rtol: float = 1e-12, atol: float = 1e-14):
    """Jacobi functions from the radial eigen-equation, independent of 2F1.

    Integrates ``u'' + (Delta'/Delta) u' + (lam^2 + rho^2) u = 0`` with
    ``u(0) = 1, u'(0) = 0`` for every ``lam`` at once (DOP853); the regular
    singular point is stepped over with a Frobenius series.  Returns an
    array of shape ``(len(lams), len(ts))``.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise ValueError("t must be finite and nonnegative")
    a, b, rho = order.alpha, order.beta, order.rho
    E = lams ** 2 + rho ** 2
    t0 = min(0.01, 0.1 / math.sqrt(float(np.max(np.abs(E)))))
    out = np.empty((lams.size, ts.size), dtype=complex)
    near = ts <= t0
    if near.any():
        out[:, near] = _ode_start(order, E[:, None], ts[None, near])[0]
    far = ~near
    if far.any():
        order_idx = np.argsort(ts[far], kind="stable")
        t_eval = ts[far][order_idx]
        y0 = np.concatenate(_ode_start(order, E, t0))
        n = lams.size

        def rhs(t, y):
            u, up = y[:n], y[n:]
            p = (2 * a + 1) / math.tanh(t) + (2 * b + 1) * math.tanh(t)
            return np.concatenate([up, -p * up - E * u])

        sol = solve_ivp(rhs, (t0, float(t_eval[-1])), y0, method="DOP853",
                        rtol=rtol, atol=atol, t_eval=t_eval)
        if not sol.success:
            raise ConvergenceError(f"ODE integration failed: {sol.message}")
        cols = np.flatnonzero(far)[order_idx]
        out[:, cols] = sol.y[:n]
    return out


def delta_density(order: OrderPair, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    out = (2.0 * np.sinh(t)) ** (2 * order.alpha + 1) * (2.0 * np.cosh(t)) ** (2 * order.beta + 1)
    return out[()] if out.ndim == 0 else out
