"""Radial test functions on [0, inf).

A profile is a vectorized callable ``r -> f(r)`` that also declares

* ``support``: radius outside which it vanishes (``inf`` if none);
* ``decay_hint``: spatial decay envelope, consumed by the quadrature engine;
* ``spectral_hint(n)``: decay envelope of its radial transform in dimension
  ``n`` (Euclidean) or ``None`` when no useful envelope is known;
* ``breakpoints``: radii where the profile is not smooth.

The same objects serve the Euclidean and the hyperbolic settings.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline

from .quad import DecayHint, GridSpec

__all__ = [
    "RadialProfile",
    "Gaussian",
    "Bump",
    "BallIndicator",
    "Sampled",
    "Constant",
    "make_profile",
    "CORPUS_NAMES",
]

# Relative level below which a profile counts as numerically zero.
NEGLIGIBLE = 1e-40


class RadialProfile:
    family = "abstract"
    support = math.inf
    decay_hint: DecayHint | None = None
    breakpoints: tuple = ()

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = self._eval(r)
        return out[()] if out.ndim == 0 else out

    def _eval(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def params(self) -> dict:
        return {}

    @property
    def peak(self) -> float:
        """Upper bound for ``|f|``."""
        return 1.0

    def effective_radius(self) -> float:
        """Radius beyond which ``|f| < NEGLIGIBLE * peak``."""
        return self.support

    def spectral_hint(self, n: int) -> DecayHint | None:
        return None

    def admissible_eta(self, rho: float) -> float:
        """Largest ``|eta|`` at which the Jacobi transform is defined."""
        return rho

    def to_dict(self) -> dict:
        return {"family": self.family, **self.params}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"


class Gaussian(RadialProfile):
    """``exp(-r^2 / (2 scale^2))``."""

    family = "gaussian"

    def __init__(self, scale: float = 1.0):
        if not scale > 0:
            raise ValueError("gaussian scale must be positive")
        self.scale = float(scale)
        self.decay_hint = DecayHint("gaussian", 0.5 / self.scale ** 2)

    def _eval(self, r):
        return np.exp(-0.5 * (r / self.scale) ** 2)

    @property
    def params(self):
        return {"scale": self.scale}

    def effective_radius(self):
        return self.scale * math.sqrt(-2.0 * math.log(NEGLIGIBLE))

    def spectral_hint(self, n):
        # transform is (2 pi)^(n/2) scale^n exp(-scale^2 xi^2 / 2)
        return DecayHint("gaussian", 0.5 * self.scale ** 2)


class Bump(RadialProfile):
    """Smooth compactly supported ``exp(1 - 1/(1 - (r/R)^2))`` on ``r < R``."""

    family = "bump"

    def __init__(self, radius: float = 1.0):
        if not radius > 0:
            raise ValueError("bump radius must be positive")
        self.radius = float(radius)
        self.support = self.radius
        self.decay_hint = DecayHint("exponential", 1.0 / self.radius)
        self.breakpoints = (self.radius,)

    def _eval(self, r):
        x = r / self.radius
        out = np.zeros_like(x)
        inside = x < 1.0
        xi = x[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
        return out

    @property
    def params(self):
        return {"radius": self.radius}

    def spectral_hint(self, n):
        # faster than any power; a steep power envelope is a valid majorant
        return DecayHint("polynomial", 8.0)


class BallIndicator(RadialProfile):
    """Indicator of ``r <= R``."""

    family = "ball_indicator"

    def __init__(self, radius: float = 1.0):
        if not radius > 0:
            raise ValueError("ball radius must be positive")
        self.radius = float(radius)
        self.support = self.radius
        self.decay_hint = DecayHint("exponential", 1.0 / self.radius)
        self.breakpoints = (self.radius,)

    def _eval(self, r):
        return (r <= self.radius).astype(float)

    @property
    def params(self):
        return {"radius": self.radius}

    def spectral_hint(self, n):
        # |fhat(xi)| ~ xi^(-(n+1)/2)
        return DecayHint("polynomial", 0.5 * (n + 1))


class Sampled(RadialProfile):
    """Cubic interpolant of samples; zero outside the sample grid."""

    family = "sampled"

    def __init__(self, grid, values):
        if isinstance(grid, GridSpec):
            self.grid_spec = grid
            grid = grid.nodes()
        else:
            self.grid_spec = None
        r = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 4:
            raise ValueError("sampled profile needs matching 1-D grid and values (>= 4 points)")
        if np.any(np.diff(r) <= 0) or r[0] < 0:
            raise ValueError("sample grid must be nonnegative and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample values must be finite")
        self.r = r
        self.values = v
        self._spline = CubicSpline(r, v)
        self.support = float(r[-1])
        self.decay_hint = DecayHint("exponential", 1.0 / max(self.support, 1e-12))
        self.breakpoints = (float(r[0]), float(r[-1]))
        xs = np.linspace(r[0], r[-1], 16 * r.size)
        self._peak = float(max(np.max(np.abs(v)), np.max(np.abs(self._spline(xs)))))

    def _eval(self, r):
        out = np.zeros_like(r)
        inside = (r >= self.r[0]) & (r <= self.r[-1])
        out[inside] = self._spline(r[inside])
        return out

    @property
    def peak(self):
        return self._peak

    @property
    def params(self):
        if self.grid_spec is not None:
            return {"grid": str(self.grid_spec), "points": int(self.r.size)}
        return {"r_min": float(self.r[0]), "r_max": float(self.r[-1]), "points": int(self.r.size)}

    def spectral_hint(self, n):
        return DecayHint("polynomial", 2.0)


class Constant(RadialProfile):
    """Constant function; only meaningful for spherical means."""

    family = "constant"

    def __init__(self, value: float = 1.0):
        self.value = float(value)
        if self.value == 0.0:
            self.support = 0.0

    def _eval(self, r):
        return np.full_like(r, self.value)

    @property
    def peak(self):
        return abs(self.value)

    @property
    def params(self):
        return {"value": self.value}


CORPUS_NAMES = ("gaussian", "bump", "ball")


def make_profile(name: str, **params) -> RadialProfile:
    """Corpus lookup by name: ``gaussian``, ``bump``, ``ball``."""
    key = name.strip().lower()
    if key == "gaussian":
        return Gaussian(**params)
    if key == "bump":
        return Bump(**params)
    if key in ("ball", "ball_indicator"):
        return BallIndicator(**params)
    raise ValueError(f"unknown corpus profile {name!r}; choose from {', '.join(CORPUS_NAMES)}")
