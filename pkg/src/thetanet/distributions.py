"""Degree distributions and excitability laws, with midpoint discretization.

Degree laws are treated as continuous on the mean-field side (discretized to a
weighted grid) and sampled to integers on the network side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

DEGREE_KINDS = ("uniform-width", "shifted-beta", "degenerate")
HETEROGENEITY_KINDS = ("lorentzian", "gaussian", "uniform")


@dataclass(frozen=True)
class DegreeGrid:
    """Weighted point grid standing in for a continuous degree law.

    points are strictly increasing reals; weights are nonnegative and sum to 1
    (renormalized at construction, then required to hold within 1e-12).
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if pts.ndim != 1 or wts.shape != pts.shape or pts.size == 0:
            raise ValueError("points and weights must be matching 1-D arrays")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if np.any(wts < 0):
            raise ValueError("weights must be nonnegative")
        total = wts.sum()
        if total <= 0:
            raise ValueError("weights must have positive mass")
        wts = wts / total
        if abs(wts.sum() - 1.0) > 1e-12:
            raise ValueError("weight normalization failed")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def count(self) -> int:
        return self.points.size

    @property
    def mean(self) -> float:
        return float(self.points @ self.weights)


@dataclass(frozen=True)
class DegreeDistribution:
    """Degree law: uniform of given half-width, symmetric shifted beta, or a point mass.

    kind "uniform-width": support [mean - sigma, mean + sigma], sigma > 0.
    kind "shifted-beta": density C x^(alpha-1) (1-x)^(alpha-1) with
        x = (k - lo)/(hi - lo) on support (lo, hi), alpha > 1; mean is the midpoint.
    kind "degenerate": all mass at mean (also produced by uniform_width(mean, 0)).
    """

    kind: str
    mean: float
    sigma: float = 0.0
    alpha: float = 0.0
    support: tuple[float, float] = field(default=(0.0, 0.0))

    def __post_init__(self):
        if self.kind not in DEGREE_KINDS:
            raise ValueError(f"unknown degree law kind {self.kind!r}")
        if not math.isfinite(self.mean) or self.mean <= 0:
            raise ValueError("mean degree must be positive and finite")
        if self.kind == "uniform-width":
            if self.sigma < 0:
                raise ValueError("half-width sigma must be nonnegative")
            if self.sigma >= self.mean:
                raise ValueError("support must stay positive: sigma < mean required")
        elif self.kind == "shifted-beta":
            if self.alpha <= 1:
                raise ValueError("beta shape alpha must exceed 1")
            lo, hi = self.support
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi or lo < 0:
                raise ValueError("beta support must be a finite interval with 0 <= lo < hi")

    # --- constructors -----------------------------------------------------

    @staticmethod
    def uniform_width(mean: float, sigma: float) -> "DegreeDistribution":
        if sigma == 0:
            return DegreeDistribution.degenerate(mean)
        return DegreeDistribution("uniform-width", float(mean), sigma=float(sigma))

    @staticmethod
    def shifted_beta(alpha: float, support: tuple[float, float] = (50.0, 150.0)) -> "DegreeDistribution":
        lo, hi = float(support[0]), float(support[1])
        return DegreeDistribution("shifted-beta", 0.5 * (lo + hi), alpha=float(alpha),
                                  support=(lo, hi))

    @staticmethod
    def degenerate(mean: float) -> "DegreeDistribution":
        return DegreeDistribution("degenerate", float(mean))

    # --- law --------------------------------------------------------------

    @property
    def bounds(self) -> tuple[float, float]:
        if self.kind == "uniform-width":
            return (self.mean - self.sigma, self.mean + self.sigma)
        if self.kind == "shifted-beta":
            return self.support
        return (self.mean, self.mean)

    def _beta_norm(self) -> float:
        # Normalization over x in [0,1] by adaptive quadrature; the density over k
        # carries an extra 1/(hi - lo) from the change of variables.
        a = self.alpha
        val, err = quad(lambda x: x ** (a - 1) * (1 - x) ** (a - 1), 0.0, 1.0,
                        epsabs=1e-14, epsrel=1e-12)
        if not (val > 0 and err < 1e-10):
            raise ValueError("beta normalization quadrature failed")
        return 1.0 / val

    def density(self, x):
        """Probability density at x (zero outside the support).

        Not defined for the degenerate law (a point mass has no density).
        """
        if self.kind == "degenerate":
            raise ValueError("degenerate law has no density function")
        x = np.asarray(x, dtype=float)
        lo, hi = self.bounds
        if self.kind == "uniform-width":
            out = np.where((x >= lo) & (x <= hi), 1.0 / (hi - lo), 0.0)
            return out if out.ndim else float(out)
        a = self.alpha
        c = self._beta_norm()
        u = (x - lo) / (hi - lo)
        inside = (u >= 0) & (u <= 1)
        u = np.clip(u, 0.0, 1.0)
        out = np.where(inside, c * u ** (a - 1) * (1 - u) ** (a - 1) / (hi - lo), 0.0)
        return out if out.ndim else float(out)

    def sample(self, n: int, rng: np.random.Generator, integer: bool = False) -> np.ndarray:
        """Draw n degrees; with integer=True, round and redraw non-positive values."""
        if n < 1:
            raise ValueError("need n >= 1 samples")
        if self.kind == "degenerate":
            vals = np.full(n, self.mean)
        elif self.kind == "uniform-width":
            lo, hi = self.bounds
            vals = rng.uniform(lo, hi, n)
        else:
            lo, hi = self.support
            vals = lo + (hi - lo) * rng.beta(self.alpha, self.alpha, n)
        if not integer:
            return vals
        vals = np.rint(vals).astype(int)
        while np.any(vals <= 0):
            bad = vals <= 0
            vals[bad] = np.rint(self.sample(int(bad.sum()), rng)).astype(int)
        return vals

    def discretize(self, count: int = 100) -> DegreeGrid:
        """Midpoint-rule grid over the support with renormalized weights."""
        if self.kind == "degenerate":
            return DegreeGrid(np.array([self.mean]), np.array([1.0]))
        if count < 1:
            raise ValueError("need count >= 1 grid points")
        lo, hi = self.bounds
        h = (hi - lo) / count
        pts = lo + (np.arange(count) + 0.5) * h
        if self.kind == "uniform-width":
            wts = np.full(count, 1.0 / count)
        else:
            wts = self.density(pts)
        return DegreeGrid(pts, wts)

    # --- config round-trip --------------------------------------------------

    def to_keys(self) -> dict:
        out = {"kind": self.kind, "mean": self.mean}
        if self.kind == "uniform-width":
            out["sigma"] = self.sigma
        if self.kind == "shifted-beta":
            out["alpha"] = self.alpha
            out["lo"], out["hi"] = self.support
        return out

    @staticmethod
    def from_keys(keys: dict) -> "DegreeDistribution":
        kind = keys.get("kind")
        if kind == "uniform-width":
            return DegreeDistribution.uniform_width(float(keys["mean"]), float(keys["sigma"]))
        if kind == "shifted-beta":
            lo = float(keys.get("lo", 50.0))
            hi = float(keys.get("hi", 150.0))
            return DegreeDistribution.shifted_beta(float(keys["alpha"]), (lo, hi))
        if kind == "degenerate":
            return DegreeDistribution.degenerate(float(keys["mean"]))
        raise ValueError(f"unknown degree law kind {kind!r}")


@dataclass(frozen=True)
class HeterogeneityLaw:
    """Law of the per-neuron excitability offset (eta or injected current).

    scale is the HWHM for the Lorentzian, the standard deviation for the
    Gaussian, and the half-width for the uniform law. Only the Lorentzian
    feeds the mean-field layer; the others are sampling-only.
    """

    kind: str
    center: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in HETEROGENEITY_KINDS:
            raise ValueError(f"unknown heterogeneity kind {self.kind!r}")
        if not (self.scale > 0) or not math.isfinite(self.scale):
            raise ValueError("scale must be positive and finite")
        if not math.isfinite(self.center):
            raise ValueError("center must be finite")

    @staticmethod
    def lorentzian(center: float, hwhm: float) -> "HeterogeneityLaw":
        return HeterogeneityLaw("lorentzian", float(center), float(hwhm))

    @staticmethod
    def gaussian(center: float, sd: float) -> "HeterogeneityLaw":
        return HeterogeneityLaw("gaussian", float(center), float(sd))

    @staticmethod
    def uniform(center: float, half_width: float) -> "HeterogeneityLaw":
        return HeterogeneityLaw("uniform", float(center), float(half_width))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        c, s = self.center, self.scale
        if self.kind == "lorentzian":
            out = (s / np.pi) / ((x - c) ** 2 + s ** 2)
        elif self.kind == "gaussian":
            out = np.exp(-0.5 * ((x - c) / s) ** 2) / (s * math.sqrt(2 * math.pi))
        else:
            out = np.where(np.abs(x - c) <= s, 1.0 / (2 * s), 0.0)
        return out if out.ndim else float(out)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ValueError("need n >= 1 samples")
        c, s = self.center, self.scale
        if self.kind == "lorentzian":
            # inverse CDF of the Lorentzian
            return c + s * np.tan(np.pi * (rng.random(n) - 0.5))
        if self.kind == "gaussian":
            return rng.normal(c, s, n)
        return rng.uniform(c - s, c + s, n)

    def to_keys(self) -> dict:
        return {"kind": self.kind, "center": self.center, "scale": self.scale}

    @staticmethod
    def from_keys(keys: dict) -> "HeterogeneityLaw":
        return HeterogeneityLaw(keys["kind"], float(keys["center"]), float(keys["scale"]))


def parse_degree_spec(text: str) -> DegreeDistribution:
    """Parse compact CLI specs: uniform:MEAN:SIGMA, beta:ALPHA[:LO:HI], degenerate:MEAN."""
    parts = text.split(":")
    name = parts[0]
    try:
        if name == "uniform" and len(parts) == 3:
            return DegreeDistribution.uniform_width(float(parts[1]), float(parts[2]))
        if name == "beta" and len(parts) in (2, 4):
            support = (float(parts[2]), float(parts[3])) if len(parts) == 4 else (50.0, 150.0)
            return DegreeDistribution.shifted_beta(float(parts[1]), support)
        if name == "degenerate" and len(parts) == 2:
            return DegreeDistribution.degenerate(float(parts[1]))
    except ValueError as exc:
        raise ValueError(f"bad degree spec {text!r}: {exc}") from exc
    raise ValueError(f"bad degree spec {text!r}")


def parse_heterogeneity_spec(text: str) -> HeterogeneityLaw:
    """Parse compact CLI specs: lorentzian:CENTER:SCALE etc."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"bad heterogeneity spec {text!r}")
    try:
        return HeterogeneityLaw(parts[0], float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad heterogeneity spec {text!r}: {exc}") from exc
