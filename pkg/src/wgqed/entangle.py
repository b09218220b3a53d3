"""Concurrence computation and sudden-death / revival event detection."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import SIGMA_Y, check_density_matrix, tensor
from .dynamics import Trajectory, XState, evolve_xstate
from .model import WaveguideParams, derive_rates

#: floating-point noise floor below which concurrence is clamped to zero
NEG_CLAMP = -1e-9

_YY = tensor(SIGMA_Y, SIGMA_Y)


class NonMonotoneError(RuntimeError):
    """ESD predicate is not monotone over the bisection bracket."""


@dataclass
class EsdReport:
    """Zero crossings of the concurrence along a trajectory."""

    death_times: list[float] = field(default_factory=list)
    revival_times: list[float] = field(default_factory=list)
    final_concurrence: float = 0.0


def x_branches(x: XState) -> tuple[float, float]:
    """The two competing branches of the X-state concurrence formula."""
    f = abs(x.z) - np.sqrt(max(x.a, 0.0) * max(x.d, 0.0))
    g = abs(x.w) - np.sqrt(max(x.b, 0.0) * max(x.c, 0.0))
    return float(f), float(g)


def entanglement_margin(x: XState) -> float:
    """2*max(F, G) without the zero clamp.

    Strictly negative over an interval iff the concurrence is exactly zero
    there, which makes sudden death decidable at finite times even when
    the clamped concurrence merely decays asymptotically.
    """
    f, g = x_branches(x)
    return 2.0 * max(f, g)


def concurrence_x(x: XState, tol: float = 1e-8) -> float:
    """Closed-form concurrence of an X-shape state, in [0, 1].

    ``tol`` is slightly looser than the structural default so samples at
    solver accuracy, not machine precision, still validate.
    """
    x.validate(tol=tol)
    c = entanglement_margin(x)
    if c < NEG_CLAMP:
        c = 0.0
    return float(min(max(c, 0.0), 1.0))


def concurrence_wootters(rho: np.ndarray) -> float:
    """General two-qubit concurrence via the spin-flipped spectrum."""
    rho = check_density_matrix(rho)
    if rho.shape[0] != 4:
        raise ValueError("concurrence is defined for 4x4 density matrices")
    r = rho @ _YY @ rho.conj() @ _YY
    vals = np.sort(np.linalg.eigvals(r).real)[::-1]
    roots = np.sqrt(np.clip(vals, 0.0, None))
    c = roots[0] - roots[1] - roots[2] - roots[3]
    return float(min(max(c, 0.0), 1.0))


def pw_concurrence_closed(f: float) -> float:
    """Closed-form concurrence of the pseudo-Werner family."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"f must be in [0, 1], got {f}")
    big_f = np.sqrt(3.0) * (2 * f - np.sqrt(2 * f * (1 - f))) / 8.0
    big_g = -np.sqrt(3 * f * (1 + f) / 32.0)
    return float(2.0 * max(0.0, big_f, big_g))


def trajectory_concurrences(traj: Trajectory) -> np.ndarray:
    return np.array([concurrence_x(x) for x in traj.xstates()])


def detect_events(traj: Trajectory, eps: float = 1e-6, hold: int = 5) -> EsdReport:
    """Locate deaths (C drops to <= eps for >= hold samples) and revivals.

    Event times are refined by linear interpolation of C between the
    bracketing samples.
    """
    if len(traj.times) < 2:
        raise ValueError("trajectory needs at least 2 samples")
    t = np.asarray(traj.times)
    c = trajectory_concurrences(traj)
    report = EsdReport(final_concurrence=float(c[-1]))
    dead = c <= eps
    alive_seen = bool(not dead[0])
    in_death = False
    n = len(c)
    i = 1
    while i < n:
        if not in_death:
            if alive_seen and dead[i] and not dead[i - 1]:
                if np.all(dead[i:min(i + hold, n)]) and n - i >= hold:
                    report.death_times.append(_cross_time(t, c, i - 1, eps))
                    in_death = True
            alive_seen = alive_seen or not dead[i]
        else:
            if not dead[i]:
                report.revival_times.append(_cross_time(t, c, i - 1, eps))
                in_death = False
        i += 1
    return report


def _cross_time(t, c, i, eps):
    """Linear interpolation of the eps crossing between samples i and i+1."""
    c0, c1 = c[i], c[i + 1]
    if c1 == c0:
        return float(t[i + 1])
    frac = (c0 - eps) / (c0 - c1)
    frac = min(max(frac, 0.0), 1.0)
    return float(t[i] + frac * (t[i + 1] - t[i]))


def esd_threshold(lambda_ratio: float, p: WaveguideParams, state_family: str,
                  tol: float = 0.005, t_max: float | None = None,
                  rtol: float = 1e-9, samples: int = 1500) -> float:
    """Boundary fidelity below which the trajectory exhibits sudden death.

    Bisection over f with the integrated trajectory as oracle; the ESD
    predicate uses the unclamped margin (see :func:`entanglement_margin`).
    Monotonicity over the bracket is verified on a coarse grid first.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    from .states import pw_xstate, werner_xstate

    makers = {"werner": (werner_xstate, 0.25), "pw": (pw_xstate, 1.0 / 3.0)}
    if state_family not in makers:
        raise ValueError(f"unknown state family {state_family!r}")
    make, lo = makers[state_family]
    hi = 1.0

    pr = replace(p, lambda_ratio=lambda_ratio)
    r = derive_rates(pr)
    if t_max is None:
        t_max = 6.0 / min(r.gamma_a, r.gamma_b)
    dt = t_max / samples

    def has_esd(f: float) -> bool:
        traj = evolve_xstate(make(f), r, pr, t_max, dt, rtol=rtol)
        margins = [entanglement_margin(x) for x in traj.xstates()]
        return min(margins) < -1e-8

    grid = np.linspace(lo, hi, 9)
    flags = [has_esd(f) for f in grid]
    transitions = sum(1 for i in range(len(flags) - 1) if flags[i] != flags[i + 1])
    if transitions > 1 or (transitions == 1 and not flags[0]):
        raise NonMonotoneError(f"ESD predicate not monotone on [{lo}, {hi}]: {flags}")
    if all(flags):
        return hi
    if not any(flags):
        return lo
    k = flags.index(False)
    f_lo, f_hi = float(grid[k - 1]), float(grid[k])
    while f_hi - f_lo > tol:
        mid = 0.5 * (f_lo + f_hi)
        if has_esd(mid):
            f_lo = mid
        else:
            f_hi = mid
    return 0.5 * (f_lo + f_hi)
