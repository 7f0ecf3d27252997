"""Fixed points, pseudo-arclength branches, and bifurcation tracking.

Everything here works on real state vectors and a scalar parameter; complex
order parameters are continued through their real/imaginary parts. Jacobians
are central finite differences (no analytic derivatives required of the RHS).

Bifurcation handling is detect-then-refine: branches record eigenvalues at
every sample, detection scans test functions along the branch, and location
re-solves near the sign change (regula falsi on the eigenvalue test for Hopf,
an extended bordered system for folds). Two-parameter curves re-locate the
codim-1 point at each value of the second parameter (detect-and-step).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import math

import numpy as np

from .errors import NumericalError

HOPF_IMAG_FLOOR = 1e-4
DEFAULT_FD_REL = 1e-6
DEFAULT_NEWTON_TOL = 1e-10
DEFAULT_MAX_NEWTON = 50


def fd_jacobian(f, x: np.ndarray, rel: float = DEFAULT_FD_REL) -> np.ndarray:
    """Central finite-difference Jacobian with per-component relative steps."""
    x = np.asarray(x, dtype=float)
    n = x.size
    f0 = np.atleast_1d(np.asarray(f(x), dtype=float))
    jac = np.empty((f0.size, n))
    for j in range(n):
        h = rel * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (np.asarray(f(xp)) - np.asarray(f(xm))) / (2.0 * h)
    return jac


def newton_solve(f, x0: np.ndarray, tol: float = DEFAULT_NEWTON_TOL,
                 max_iter: int = DEFAULT_MAX_NEWTON, fd_rel: float = DEFAULT_FD_REL,
                 max_halvings: int = 10) -> np.ndarray:
    """Damped Newton iteration driving the max-norm of f below tol.

    Steps are halved until the residual norm decreases; non-convergence raises
    with the residual history attached to the message.
    """
    x = np.array(x0, dtype=float)
    history = []
    r = np.atleast_1d(np.asarray(f(x), dtype=float))
    norm = float(np.max(np.abs(r)))
    history.append(norm)
    for _ in range(max_iter):
        if norm < tol:
            return x
        jac = fd_jacobian(f, x, rel=fd_rel)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        lam = 1.0
        for _ in range(max_halvings):
            x_new = x + lam * step
            r_new = np.atleast_1d(np.asarray(f(x_new), dtype=float))
            norm_new = float(np.max(np.abs(r_new)))
            if np.isfinite(norm_new) and norm_new < norm:
                break
            lam *= 0.5
        else:
            history.append(norm)
            raise NumericalError(
                "newton: damping failed to reduce the residual; "
                f"history {_fmt_history(history)}")
        x, r, norm = x_new, r_new, norm_new
        history.append(norm)
    if norm < tol:
        return x
    raise NumericalError(
        f"newton: no convergence in {max_iter} iterations; "
        f"history {_fmt_history(history)}")


def _fmt_history(history) -> str:
    shown = history if len(history) <= 8 else history[:3] + ["..."] + history[-4:]
    return "[" + ", ".join(x if isinstance(x, str) else f"{x:.3e}" for x in shown) + "]"


def find_fixed_point(rhs, y0: np.ndarray, param: float | None = None,
                     tol: float = DEFAULT_NEWTON_TOL, fd_rel: float = DEFAULT_FD_REL,
                     max_iter: int = DEFAULT_MAX_NEWTON) -> np.ndarray:
    """Solve rhs(y) = 0 (or rhs(y, param) = 0) from the given initial state."""
    f = rhs if param is None else (lambda y: rhs(y, param))
    return newton_solve(f, y0, tol=tol, max_iter=max_iter, fd_rel=fd_rel)


def eigenvalues_at(rhs, y: np.ndarray, param: float | None = None,
                   fd_rel: float = DEFAULT_FD_REL) -> np.ndarray:
    """Jacobian eigenvalues at a state, sorted by descending real part."""
    f = rhs if param is None else (lambda x: rhs(x, param))
    eigs = np.linalg.eigvals(fd_jacobian(f, np.asarray(y, dtype=float), rel=fd_rel))
    return eigs[np.argsort(-eigs.real)]


def hopf_test(eigenvalues: np.ndarray, imag_floor: float = HOPF_IMAG_FLOOR) -> float:
    """Max real part over genuinely complex eigenvalues; nan if none exist."""
    complex_part = eigenvalues[np.abs(eigenvalues.imag) > imag_floor]
    return float(np.max(complex_part.real)) if complex_part.size else float("nan")


def leading_real_eigenvalue(eigenvalues: np.ndarray,
                            imag_floor: float = HOPF_IMAG_FLOOR) -> float:
    """Max real part over (numerically) real eigenvalues; nan if none exist."""
    real_part = eigenvalues[np.abs(eigenvalues.imag) <= imag_floor]
    return float(np.max(real_part.real)) if real_part.size else float("nan")


@dataclass(frozen=True)
class BranchPoint:
    param: float
    state: np.ndarray
    eigenvalues: np.ndarray
    stable: bool


@dataclass(frozen=True)
class BifurcationPoint:
    kind: str                      # "hopf" | "saddle-node"
    param: float
    state: np.ndarray
    eigenvalues: np.ndarray        # critical eigenvalue(s)
    param2: float | None = None

    @property
    def frequency(self) -> float:
        return float(np.max(np.abs(self.eigenvalues.imag)))


@dataclass
class Branch:
    parameter: str
    points: list = field(default_factory=list)
    step_history: list = field(default_factory=list)
    status: str = "running"

    def __len__(self) -> int:
        return len(self.points)

    @property
    def params(self) -> np.ndarray:
        return np.array([pt.param for pt in self.points])

    @property
    def states(self) -> np.ndarray:
        return np.array([pt.state for pt in self.points])

    def hopf_values(self, imag_floor: float = HOPF_IMAG_FLOOR) -> np.ndarray:
        return np.array([hopf_test(pt.eigenvalues, imag_floor) for pt in self.points])


def _branch_point(rhs, y: np.ndarray, p: float, fd_rel: float) -> BranchPoint:
    eigs = eigenvalues_at(rhs, y, p, fd_rel=fd_rel)
    return BranchPoint(float(p), y.copy(), eigs, bool(eigs.real.max() < 0))


def continue_branch(rhs, y0: np.ndarray, p0: float, p_range: tuple,
                    parameter: str = "p", direction: int = -1,
                    ds0: float = 0.1, ds_min: float = 1e-4, ds_max: float = 2.0,
                    grow: float = 1.3, shrink: float = 0.5, max_steps: int = 2000,
                    newton_tol: float = DEFAULT_NEWTON_TOL,
                    max_newton: int = DEFAULT_MAX_NEWTON,
                    fd_rel: float = DEFAULT_FD_REL) -> Branch:
    """Trace a fixed-point branch of rhs(y, p) by pseudo-arclength stepping.

    The predictor is the secant through the last two samples; the corrector is
    damped Newton on the bordered system (rhs = 0 plus the hyperplane through
    the predicted point orthogonal to the secant), so folds are traversed. The
    trace stops when p leaves p_range (the end point is re-solved at the
    boundary), when max_steps is reached, or when the step underflows ds_min.
    """
    lo, hi = float(min(p_range)), float(max(p_range))
    if not lo <= p0 <= hi:
        raise ValueError("starting parameter outside the continuation range")
    branch = Branch(parameter=parameter)

    y = find_fixed_point(rhs, y0, p0, tol=newton_tol, fd_rel=fd_rel, max_iter=max_newton)
    branch.points.append(_branch_point(rhs, y, p0, fd_rel))

    # second sample by a natural-parameter step to start the secant
    ds = float(ds0)
    p1 = float(np.clip(p0 + direction * min(ds, ds_max), lo, hi))
    if p1 == p0:
        branch.status = "completed-range"
        return branch
    y1 = find_fixed_point(rhs, y, p1, tol=newton_tol, fd_rel=fd_rel, max_iter=max_newton)
    branch.points.append(_branch_point(rhs, y1, p1, fd_rel))
    branch.step_history.append(abs(p1 - p0))

    z_prev = np.concatenate([y, [p0]])
    z = np.concatenate([y1, [p1]])
    for _ in range(max_steps):
        tangent = z - z_prev
        tangent /= np.linalg.norm(tangent)
        accepted = False
        while not accepted:
            z_pred = z + ds * tangent

            def bordered(zz):
                return np.concatenate([
                    np.asarray(rhs(zz[:-1], zz[-1])),
                    [tangent @ (zz - z_pred)],
                ])

            try:
                z_new = newton_solve(bordered, z_pred, tol=newton_tol,
                                     max_iter=max_newton, fd_rel=fd_rel)
                accepted = True
            except NumericalError:
                ds *= shrink
                if ds < ds_min:
                    branch.status = f"step-underflow: corrector failed below ds={ds_min:g}"
                    return branch
        p_new = float(z_new[-1])
        if p_new < lo or p_new > hi:
            p_end = lo if p_new < lo else hi
            try:
                y_end = find_fixed_point(rhs, z_new[:-1], p_end, tol=newton_tol,
                                         fd_rel=fd_rel, max_iter=max_newton)
            except NumericalError:
                branch.status = f"completed-range (endpoint solve failed at {p_end:g})"
                return branch
            z_end = np.concatenate([y_end, [p_end]])
            if np.linalg.norm(z_end - z) >= ds_min:
                branch.points.append(_branch_point(rhs, y_end, p_end, fd_rel))
                branch.step_history.append(float(np.linalg.norm(z_end - z)))
            branch.status = "completed-range"
            return branch
        branch.points.append(_branch_point(rhs, z_new[:-1], p_new, fd_rel))
        branch.step_history.append(float(np.linalg.norm(z_new - z)))
        z_prev, z = z, z_new
        ds = min(ds * grow, ds_max)
    branch.status = "max-steps"
    return branch


def detect_bifurcations(branch: Branch,
                        imag_floor: float = HOPF_IMAG_FLOOR) -> list:
    """Scan a branch for candidate segments: (sample index, kind)."""
    out = []
    hv = branch.hopf_values(imag_floor)
    p = branch.params
    for i in range(len(branch) - 1):
        if np.isfinite(hv[i]) and np.isfinite(hv[i + 1]) and hv[i] * hv[i + 1] < 0:
            out.append((i, "hopf"))
    for i in range(1, len(branch) - 1):
        if (p[i + 1] - p[i]) * (p[i] - p[i - 1]) < 0:
            out.append((i, "saddle-node"))
    return sorted(out)


def locate_bifurcation(rhs, branch: Branch, index: int, kind: str,
                       tol: float = 1e-6, newton_tol: float = DEFAULT_NEWTON_TOL,
                       fd_rel: float = DEFAULT_FD_REL,
                       imag_floor: float = HOPF_IMAG_FLOOR) -> BifurcationPoint:
    """Refine a detected candidate on segment [index, index+1] of a branch."""
    if kind == "hopf":
        a, b = branch.points[index], branch.points[index + 1]
        return _locate_hopf(rhs, a.param, a.state, b.param, b.state, tol,
                            newton_tol, fd_rel, imag_floor)
    if kind == "saddle-node":
        pt = branch.points[index]
        return _locate_fold(rhs, pt.state, pt.param, tol, newton_tol, fd_rel,
                            imag_floor)
    raise ValueError(f"unknown bifurcation kind {kind!r}")


def find_bifurcations(rhs, branch: Branch, tol: float = 1e-6,
                      newton_tol: float = DEFAULT_NEWTON_TOL,
                      fd_rel: float = DEFAULT_FD_REL,
                      imag_floor: float = HOPF_IMAG_FLOOR) -> list:
    """Detect and refine every bifurcation candidate along a branch."""
    return [locate_bifurcation(rhs, branch, i, kind, tol=tol,
                               newton_tol=newton_tol, fd_rel=fd_rel,
                               imag_floor=imag_floor)
            for i, kind in detect_bifurcations(branch, imag_floor)]


def _solve_and_test(rhs, p, y_guess, newton_tol, fd_rel, imag_floor):
    y = find_fixed_point(rhs, y_guess, p, tol=newton_tol, fd_rel=fd_rel)
    eigs = eigenvalues_at(rhs, y, p, fd_rel=fd_rel)
    h = hopf_test(eigs, imag_floor)
    if not np.isfinite(h):
        raise NumericalError(f"no complex eigenvalue pair at p={p:g}")
    return y, eigs, h


def _locate_hopf(rhs, p_lo, y_lo, p_hi, y_hi, tol, newton_tol, fd_rel, imag_floor):
    """Regula falsi (Illinois) on the Hopf test function over [p_lo, p_hi].

    Fixed points at trial parameters are re-solved by Newton, warm-started
    from linear interpolation between the bracket states.
    """
    if p_lo > p_hi:
        p_lo, y_lo, p_hi, y_hi = p_hi, y_hi, p_lo, y_lo
    y_a, _, h_a = _solve_and_test(rhs, p_lo, y_lo, newton_tol, fd_rel, imag_floor)
    y_b, _, h_b = _solve_and_test(rhs, p_hi, y_hi, newton_tol, fd_rel, imag_floor)
    if h_a * h_b > 0:
        raise NumericalError(
            f"hopf test has no sign change on [{p_lo:g}, {p_hi:g}]")
    a, b = float(p_lo), float(p_hi)
    last_side = 0
    y_mid = y_a
    for _ in range(200):
        if abs(b - a) < tol:
            break
        p_mid = (a * h_b - b * h_a) / (h_b - h_a)
        if not a < p_mid < b:
            p_mid = 0.5 * (a + b)
        frac = (p_mid - a) / (b - a)
        y_guess = (1 - frac) * y_a + frac * y_b
        y_mid, eigs_mid, h_mid = _solve_and_test(rhs, p_mid, y_guess,
                                                 newton_tol, fd_rel, imag_floor)
        if h_mid == 0.0:
            a = b = p_mid
            break
        if h_a * h_mid < 0:
            b, y_b, h_b = p_mid, y_mid, h_mid
            if last_side == -1:
                h_a *= 0.5
            last_side = -1
        else:
            a, y_a, h_a = p_mid, y_mid, h_mid
            if last_side == +1:
                h_b *= 0.5
            last_side = +1
    else:
        raise NumericalError("hopf refinement did not reach tolerance")
    p_star = 0.5 * (a + b)
    y_star = find_fixed_point(rhs, y_mid, p_star, tol=newton_tol, fd_rel=fd_rel)
    eigs = eigenvalues_at(rhs, y_star, p_star, fd_rel=fd_rel)
    complex_part = eigs[np.abs(eigs.imag) > imag_floor]
    lead = complex_part[np.argmax(complex_part.real)]
    critical = np.array([lead, np.conj(lead)])
    return BifurcationPoint("hopf", float(p_star), y_star, critical)


def _fold_seed_vector(rhs, y, p, fd_rel, imag_floor):
    f = lambda x: rhs(x, p)
    jac = fd_jacobian(f, y, rel=fd_rel)
    eigvals, eigvecs = np.linalg.eig(jac)
    real_idx = np.where(np.abs(eigvals.imag) <= imag_floor)[0]
    cand = real_idx if real_idx.size else np.arange(eigvals.size)
    i = cand[np.argmin(np.abs(eigvals[cand]))]
    v = np.real(eigvecs[:, i])
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise NumericalError("degenerate null-vector seed for fold refinement")
    return v / nrm


def _locate_fold(rhs, y_seed, p_seed, tol, newton_tol, fd_rel, imag_floor):
    """Extended system [f; J v; c.v - 1] = 0 pinning a fold and its null vector.

    J v is evaluated by a directional finite difference, so only RHS calls are
    needed. c is the initial null-vector guess, fixing the scale of v.
    """
    y_seed = np.asarray(y_seed, dtype=float)
    n = y_seed.size
    c = _fold_seed_vector(rhs, y_seed, p_seed, fd_rel, imag_floor)

    def extended(zz):
        y, v, p = zz[:n], zz[n:2 * n], zz[-1]
        h = fd_rel * max(1.0, float(np.linalg.norm(y)))
        jv = (np.asarray(rhs(y + h * v, p)) - np.asarray(rhs(y - h * v, p))) / (2.0 * h)
        return np.concatenate([np.asarray(rhs(y, p)), jv, [c @ v - 1.0]])

    z0 = np.concatenate([y_seed, c, [p_seed]])
    z = newton_solve(extended, z0, tol=max(newton_tol, tol * 1e-2), max_iter=80,
                     fd_rel=fd_rel)
    y_star, p_star = z[:n], float(z[-1])
    eigs = eigenvalues_at(rhs, y_star, p_star, fd_rel=fd_rel)
    real_part = eigs[np.abs(eigs.imag) <= imag_floor]
    if real_part.size == 0:
        raise NumericalError("fold refinement lost its real eigenvalue")
    lam = real_part[np.argmin(np.abs(real_part))]
    return BifurcationPoint("saddle-node", p_star, y_star, np.array([lam]))


@dataclass
class Codim1Curve:
    kind: str
    points: list = field(default_factory=list)
    status: str = "completed"

    def __len__(self) -> int:
        return len(self.points)

    @property
    def params(self) -> np.ndarray:
        return np.array([pt.param for pt in self.points])

    @property
    def params2(self) -> np.ndarray:
        return np.array([pt.param2 for pt in self.points])


def trace_codim1_curve(rhs2, kind: str, y0: np.ndarray, p0: float,
                       q_values, bracket: float = 0.5, tol: float = 1e-6,
                       newton_tol: float = DEFAULT_NEWTON_TOL,
                       fd_rel: float = DEFAULT_FD_REL,
                       imag_floor: float = HOPF_IMAG_FLOOR,
                       expand: int = 6) -> Codim1Curve:
    """Track a Hopf or saddle-node point of rhs2(y, p, q) across q_values.

    Detect-and-step: at each q the codim-1 point is re-located in p, warm
    started from the previous point. Hopf points are re-bracketed (the bracket
    doubles up to `expand` times if the sign change escapes) and refined by
    regula falsi; folds re-converge through the extended bordered system. If a
    step fails the curve is returned truncated, with the reason in status.
    """
    if kind not in ("hopf", "saddle-node"):
        raise ValueError(f"unknown bifurcation kind {kind!r}")
    curve = Codim1Curve(kind=kind)
    y_prev, p_prev = np.asarray(y0, dtype=float), float(p0)
    for q in q_values:
        rhs_q = lambda y, p: rhs2(y, p, q)
        try:
            if kind == "hopf":
                point = _relocate_hopf(rhs_q, y_prev, p_prev, bracket, tol,
                                       newton_tol, fd_rel, imag_floor, expand)
            else:
                point = _locate_fold(rhs_q, y_prev, p_prev, tol, newton_tol,
                                     fd_rel, imag_floor)
        except (NumericalError, ValueError) as exc:
            # ValueError covers probes that left the model's parameter
            # domain (e.g. a width bracket dipping below zero)
            curve.status = f"truncated at q={q:g}: {exc}"
            break
        point = BifurcationPoint(point.kind, point.param, point.state,
                                 point.eigenvalues, param2=float(q))
        curve.points.append(point)
        y_prev, p_prev = point.state, point.param
    if not curve.points:
        raise NumericalError(f"codim-1 trace found no points: {curve.status}")
    return curve


def _relocate_hopf(rhs, y_prev, p_prev, bracket, tol, newton_tol, fd_rel,
                   imag_floor, expand):
    y_c, _, h_c = _solve_and_test(rhs, p_prev, y_prev, newton_tol, fd_rel,
                                  imag_floor)
    if h_c == 0.0:
        return _locate_hopf(rhs, p_prev, y_c, p_prev, y_c, tol, newton_tol,
                            fd_rel, imag_floor)
    # Probe each side of p_prev on its own so a domain wall on one side
    # (e.g. a width that must stay positive) cannot stall the other.  A
    # failed probe marks a wall; later offsets bisect between the largest
    # good offset and the wall instead of blindly halving.
    for direction in (1.0, -1.0):
        y_t = y_c
        off = bracket
        good = 0.0
        wall = math.inf
        for _ in range(3 * expand):
            p_t = p_prev + direction * off
            try:
                y_t, _, h_t = _solve_and_test(rhs, p_t, y_t, newton_tol,
                                              fd_rel, imag_floor)
            except (NumericalError, ValueError):
                wall = off
            else:
                if h_t * h_c <= 0:
                    return _locate_hopf(rhs, p_prev, y_c, p_t, y_t, tol,
                                        newton_tol, fd_rel, imag_floor)
                good = off
            off = off * 2.0 if wall == math.inf else 0.5 * (good + wall)
            if wall - good < tol or off > bracket * 2.0 ** expand:
                break
    raise NumericalError(
        f"no hopf bracket around p={p_prev:g} within half-width "
        f"{bracket * 2.0 ** (expand - 1):g}")
