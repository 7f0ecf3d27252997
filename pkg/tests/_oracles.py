"""Independent cross-checks used by the test suite.

Everything in this module is computed from scratch with numpy/scipy only; it
deliberately imports nothing from the package so that agreement between the
two routes is meaningful.  The derivations:

* Synaptic fixed points.  Per in-degree class the stationary order parameter
  solves i(b-1)^2 = (b+1)^2 (-Delta + i eta_eff), so r = (b-1)/(b+1) obeys
  r^2 = eta_eff + i Delta.  The root with Re r < 0 keeps |b| < 1, and the
  stationary firing rate collapses to Re sqrt(eta_eff + i Delta) / pi.  The
  coupling closes through the scalar s = sum_k w_k rate_k, so fixed points
  and their folds live on a one-dimensional self-consistency curve.

* Gap fixed points.  With T(k) = k * J the per-class equations reduce to a
  quadratic in phi^2 with exactly one positive root, so again everything
  closes through one scalar, here J = <k' V(k')> / <k>^2.  For a degenerate
  degree distribution the fold has the closed form eta0(phi) = pi^2 phi^2
  - V(phi)^2 with V(phi) = g/2 - Delta/(2 pi phi), maximized over phi.

* Morris-Lecar threshold.  With the gating variable slaved to its steady
  state, the fixed-point current is I0(V) = gL (V-VL) + gCa m_inf(V) (V-VCa)
  + gK w_inf(V) (V-VK); the firing threshold is the local maximum of this
  curve on the lower voltage branch (a saddle-node of the full system).
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import fixed_quad, quad
from scipy.optimize import brentq, fsolve, minimize_scalar


# --- synaptic mean field -----------------------------------------------------

def synaptic_rate(eta_eff, delta):
    """Stationary firing rate of a Lorentzian population at effective drive
    eta_eff: Re sqrt(eta_eff + i Delta) / pi."""
    return np.sqrt(np.asarray(eta_eff, dtype=complex) + 1j * delta).real / np.pi


def synaptic_self_consistency(s, eta0, delta, K, points, weights,
                              mean_degree=100.0):
    """G(s) = sum_k w_k rate_k(s) - s; zeros of G are fixed points."""
    eta_eff = eta0 + K * np.asarray(points) * s / mean_degree
    return float(weights @ synaptic_rate(eta_eff, delta)) - s


def synaptic_fixed_points(eta0, delta, K, points, weights, mean_degree=100.0,
                          s_max=3.0, scan=2000):
    """All self-consistent s values found by a sign-change scan plus brentq."""
    grid = np.linspace(0.0, s_max, scan)
    g = np.array([synaptic_self_consistency(s, eta0, delta, K, points,
                                            weights, mean_degree)
                  for s in grid])
    roots = []
    for i in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0):
        roots.append(brentq(synaptic_self_consistency, grid[i], grid[i + 1],
                            args=(eta0, delta, K, points, weights,
                                  mean_degree), xtol=1e-14))
    return np.array(roots)


def synaptic_fold(eta0_guess, s_guess, delta, K, points, weights,
                  mean_degree=100.0):
    """Solve G = 0 together with dG/ds = 0 for (s, eta0)."""
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)

    def system(x):
        s, eta0 = x
        eta_eff = eta0 + K * points * s / mean_degree
        root = np.sqrt(eta_eff.astype(complex) + 1j * delta)
        g = float(weights @ (root.real / np.pi)) - s
        drate = (K * points / mean_degree) / (2.0 * np.pi) / root
        dg = float(weights @ drate.real) - 1.0
        return [g, dg]

    s_star, eta0_star = fsolve(system, [s_guess, eta0_guess], xtol=1e-13)
    return float(eta0_star), float(s_star)


def synaptic_bistable_folds(delta, K, points, weights, mean_degree=100.0,
                            eta0_probe_left=None, eta0_probe_right=None):
    """Both edges of a bistable window in eta0.

    Just inside the window there are three fixed points s1 < s2 < s3; the
    left edge merges (s2, s3) and the right edge merges (s1, s2), which
    gives fold-specific warm starts for the 2x2 Newton solve."""

    def three_roots(eta0):
        roots = synaptic_fixed_points(eta0, delta, K, points, weights,
                                      mean_degree)
        if roots.size != 3:
            raise RuntimeError(
                f"expected 3 fixed points at eta0={eta0:g}, found {roots.size}")
        return roots

    r = three_roots(eta0_probe_left)
    left = synaptic_fold(eta0_probe_left, 0.5 * (r[1] + r[2]), delta, K,
                         points, weights, mean_degree)[0]
    r = three_roots(eta0_probe_right)
    right = synaptic_fold(eta0_probe_right, 0.5 * (r[0] + r[1]), delta, K,
                          points, weights, mean_degree)[0]
    return left, right


def uniform_midpoint_grid(mean, sigma, count=100):
    """Midpoint discretization of a uniform density on [mean-sigma, mean+sigma]."""
    if sigma == 0.0:
        return np.array([mean]), np.array([1.0])
    edges = np.linspace(mean - sigma, mean + sigma, count + 1)
    points = 0.5 * (edges[:-1] + edges[1:])
    return points, np.full(count, 1.0 / count)


# --- gap-junction mean field -------------------------------------------------

def gap_phi_of_drive(c, delta, g):
    """Positive root of pi^2 u^2 + (g^2/4 - c) u - delta^2/(4 pi^2) = 0 in
    u = phi^2, where c = eta0 + g k J is the per-class drive."""
    a = g * g / 4.0 - np.asarray(c, dtype=float)
    u = (-a + np.sqrt(a * a + delta * delta)) / (2.0 * np.pi ** 2)
    return np.sqrt(u)


def gap_voltage_of_drive(c, delta, g):
    return g / 2.0 - delta / (2.0 * np.pi * gap_phi_of_drive(c, delta, g))


def gap_coupling_out(J, eta0, delta, g, mean, sigma, quad_order=80):
    """Map J -> <k V(k)> / <k>^2 for a uniform degree density."""
    if sigma == 0.0:
        return gap_voltage_of_drive(eta0 + g * mean * J, delta, g) / mean
    lo, hi = mean - sigma, mean + sigma
    val, _ = fixed_quad(
        lambda k: k * gap_voltage_of_drive(eta0 + g * k * J, delta, g)
        / (hi - lo),
        lo, hi, n=quad_order)
    return val / mean ** 2


def gap_fold(eta0_guess, J_guess, delta, g, mean, sigma):
    """Fold of the scalar self-consistency J = gap_coupling_out(J)."""
    h = 1e-9

    def system(x):
        J, eta0 = x
        f = gap_coupling_out(J, eta0, delta, g, mean, sigma) - J
        df = (gap_coupling_out(J + h, eta0, delta, g, mean, sigma)
              - gap_coupling_out(J - h, eta0, delta, g, mean, sigma)) / (2 * h) - 1.0
        return [f, df]

    J_star, eta0_star = fsolve(system, [J_guess, eta0_guess], xtol=1e-13)
    return float(eta0_star), float(J_star)


def gap_degenerate_fold(delta, g):
    """Closed-form degenerate-degree fold: the local maximum of eta0(phi)
    = pi^2 phi^2 - V(phi)^2 with V(phi) = g/2 - delta/(2 pi phi).

    eta0(phi) rises from -inf, peaks at the fold, dips, then rises again for
    large phi, so the fold is the first sign change of the derivative."""

    def deta0(phi):
        v = g / 2.0 - delta / (2.0 * np.pi * phi)
        return 2.0 * np.pi ** 2 * phi - 2.0 * v * delta / (2.0 * np.pi * phi ** 2)

    grid = np.geomspace(1e-5, 1.0, 400)
    vals = deta0(grid)
    idx = np.flatnonzero((vals[:-1] > 0) & (vals[1:] < 0))
    if idx.size == 0:
        raise RuntimeError("no local maximum of eta0(phi) found")
    phi_star = brentq(deta0, grid[idx[0]], grid[idx[0] + 1], xtol=1e-15)
    v = g / 2.0 - delta / (2.0 * np.pi * phi_star)
    return np.pi ** 2 * phi_star ** 2 - v * v, phi_star


# --- Morris-Lecar ------------------------------------------------------------

ML = dict(C=20.0, gL=2.0, gCa=4.0, gK=8.0, VL=-60.0, VCa=120.0, VK=-80.0,
          V1=-1.2, V2=18.0, V3=12.0, V4=17.4)


def ml_fixed_point_current(v):
    """Injected current that makes voltage v a fixed point (gating slaved)."""
    m = 0.5 * (1.0 + np.tanh((v - ML["V1"]) / ML["V2"]))
    w = 0.5 * (1.0 + np.tanh((v - ML["V3"]) / ML["V4"]))
    return (ML["gL"] * (v - ML["VL"]) + ML["gCa"] * m * (v - ML["VCa"])
            + ML["gK"] * w * (v - ML["VK"]))


def ml_threshold():
    """Local maximum of the fixed-point current on the lower voltage branch."""
    res = minimize_scalar(lambda v: -ml_fixed_point_current(v),
                          bounds=(-50.0, 0.0), method="bounded",
                          options={"xatol": 1e-12})
    return -res.fun


# --- regularized voltage Fourier coefficients --------------------------------

def q_coefficient_quadrature(m, eps):
    """Fourier coefficient (1/2pi) int q(theta) e^{-i m theta} dtheta of the
    regularized voltage q = sin(theta) / (1 + cos(theta) + eps)."""

    def integrand_re(th):
        return np.sin(th) / (1.0 + np.cos(th) + eps) * np.cos(m * th)

    def integrand_im(th):
        return -np.sin(th) / (1.0 + np.cos(th) + eps) * np.sin(m * th)

    re, _ = quad(integrand_re, 0.0, 2.0 * np.pi, limit=200)
    im, _ = quad(integrand_im, 0.0, 2.0 * np.pi, limit=200)
    return (re + 1j * im) / (2.0 * np.pi)


# --- shifted symmetric beta moments ------------------------------------------

def beta_moments(alpha, support=(50.0, 150.0)):
    """Mean and variance of a symmetric Beta(alpha, alpha) scaled to support."""
    lo, hi = support
    width = hi - lo
    mean = 0.5 * (lo + hi)
    var = width ** 2 / (4.0 * (2.0 * alpha + 1.0))
    return mean, var
