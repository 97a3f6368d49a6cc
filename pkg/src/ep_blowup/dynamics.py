"""ODE layer along a single characteristic of the radial d=4 system.

Along ``dr/dt = F r`` the scaled fields obey

    dF/dt = -F**2 - G,          dG/dt = F (1 - 4 G),

the gradient variables ``u = div V - 4F``, ``v = div E - 4G`` obey a
quadratic (Riccati) system, and its projective linearisation ``(q, p1, p2)``
is linear with periodic coefficients.  Gradients blow up exactly when
``q`` reaches zero.

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .exceptions import InadmissibleDatumError, IntegrationError

TWO_PI = 2.0 * math.pi

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-10
DEFAULT_GUARD = 0.1
DEFAULT_MARGIN = 1e-6
DEFAULT_EXPLOSION = 1e8
DEFAULT_Q_FLOOR = 0.1
LONG_RUN_MAX_STEP = 2.0 * math.pi / 128

# 8th-order Dormand-Prince with 7th-order dense output
_METHOD = "DOP853"

SMOOTH = "Smooth"
BLOWUP = "BlowUp"
MARGINAL = "Marginal"

SERIES_COLUMNS = ("t", "F", "G", "r", "u", "v", "q", "p1", "p2", "n")


@dataclass(frozen=True)
class InitialDatum:
    """State of one characteristic at t=0.

    ``F0``/``G0`` are V0(r0)/r0 and E0(r0)/r0, ``u0``/``v0`` the gradient
    variables div V0 - 4 F0 and div E0 - 4 G0.  ``r0`` only enters the
    radius column; classification depends on the four scaled values.
    """

    F0: float
    G0: float
    u0: float = 0.0
    v0: float = 0.0
    r0: float = 1.0

    def __post_init__(self):
        for name in ("F0", "G0", "u0", "v0", "r0"):
            object.__setattr__(self, name, float(getattr(self, name)))
        vals = (self.F0, self.G0, self.u0, self.v0, self.r0)
        if not all(math.isfinite(x) for x in vals):
            raise InadmissibleDatumError(f"non-finite initial datum {vals}")
        if not self.G0 < 0.25:
            raise InadmissibleDatumError(f"G0={self.G0!r} must be < 1/4")
        if not self.density > 0.0:
            raise InadmissibleDatumError(
                f"initial density 1 - (v0 + 4 G0) = {self.density!r} must be > 0")
        if self.r0 < 0.0:
            raise InadmissibleDatumError(f"r0={self.r0!r} must be >= 0")

    @property
    def density(self) -> float:
        return 1.0 - (self.v0 + 4.0 * self.G0)

    @property
    def is_harmonic(self) -> bool:
        """True on the equilibrium characteristic F0 = G0 = 0."""
        return self.F0 == 0.0 and self.G0 == 0.0

    def as_tuple(self):
        return (self.F0, self.G0, self.u0, self.v0)


@dataclass(frozen=True)
class Verdict:
    """Classification of one characteristic.

    ``kind`` is one of ``"Smooth"``, ``"BlowUp"``, ``"Marginal"``.
    ``q_star`` is the minimum of q over one period (NaN when the method
    cannot provide it), ``t_star`` the first zero of q for blow-up.
    """

    kind: str
    q_star: float
    t_star: Optional[float] = None
    method: str = "oracle"

    def to_dict(self):
        return {"kind": self.kind, "q_star": self.q_star,
                "t_star": self.t_star, "method": self.method}


def verdict_kind(q_star, margin=DEFAULT_MARGIN):
    if abs(q_star) <= margin:
        return MARGINAL
    return SMOOTH if q_star > 0.0 else BLOWUP


# --------------------------------------------------------------------------
# right-hand sides


def rhs_characteristic(F, G, r):
    """Return ``(dF, dG, dr)`` for the coefficient system and the characteristic."""
    return -F * F - G, F - 4.0 * F * G, F * r


def rhs_gradient(F, G, u, v):
    """Return ``(du, dv)`` for the Riccati system of the gradient variables."""
    du = -u * u - 2.0 * F * u - v
    dv = -u * v + (1.0 - 4.0 * G) * u - 4.0 * F * v
    return du, dv


def rhs_linearized(F, G, q, p1, p2):
    """Return ``(dq, dp1, dp2)`` for the linear system equivalent to the Riccati one."""
    return p1, -2.0 * F * p1 - p2, (1.0 - 4.0 * G) * p1 - 4.0 * F * p2


def _rhs_full(t, y):
    F, G, r, u, v, q, p1, p2 = y
    dF, dG, dr = rhs_characteristic(F, G, r)
    du, dv = rhs_gradient(F, G, u, v)
    dq, dp1, dp2 = rhs_linearized(F, G, q, p1, p2)
    return [dF, dG, dr, du, dv, dq, dp1, dp2]


def _rhs_linear_only(t, y):
    F, G, r, q, p1, p2 = y
    dF, dG, dr = rhs_characteristic(F, G, r)
    dq, dp1, dp2 = rhs_linearized(F, G, q, p1, p2)
    return [dF, dG, dr, dq, dp1, dp2]


def _rhs_oracle(t, y):
    F, G, q, p1, p2 = y
    return [-F * F - G, F - 4.0 * F * G,
            p1, -2.0 * F * p1 - p2, (1.0 - 4.0 * G) * p1 - 4.0 * F * p2]


def _rhs_riccati(t, y):
    F, G, u, v = y
    return [-F * F - G, F - 4.0 * F * G,
            -u * u - 2.0 * F * u - v, -u * v + (1.0 - 4.0 * G) * u - 4.0 * F * v]


def _rhs_period(t, y):
    F, G, _ = y
    return [-F * F - G, F - 4.0 * F * G, F]


# --------------------------------------------------------------------------
# first integrals


def _m0(G0):
    if not G0 < 0.25:
        raise InadmissibleDatumError(f"G0={G0!r} must be < 1/4")
    return math.sqrt(1.0 - 4.0 * G0)


def first_integral(F, G):
    """C4 evaluated at an arbitrary state; constant along trajectories."""
    M = np.sqrt(1.0 - 4.0 * np.asarray(G, dtype=float))
    return (1.0 - 2.0 * G + 2.0 * np.asarray(F) ** 2) / (2.0 * M)


def conserved_quantities(F0, G0, r0):
    """Return ``(M0, C4, K)`` with ``M0 = sqrt(1-4 G0)`` and ``K = r0 sqrt(M0)``."""
    M0 = _m0(G0)
    C4 = (1.0 - 2.0 * G0 + 2.0 * F0 * F0) / (2.0 * M0)
    K = r0 * math.sqrt(M0)
    return M0, C4, K


def envelope_radius(M0, F0):
    """``sqrt(4 C4**2 - 1)`` without cancellation near C4 = 1/2.

    ``4 C4^2 - 1 = ((1 - M0)^2 + 4 F0^2) ((1 + M0)^2 + 4 F0^2) / (4 M0^2)``.
    """
    f2 = 4.0 * F0 * F0
    return math.sqrt(((1.0 - M0) ** 2 + f2) * ((1.0 + M0) ** 2 + f2)) / (2.0 * M0)


def envelope(F0, G0):
    """Extreme values ``(M_minus, M_plus)`` of M = sqrt(1-4G) over a period.

    The two roots of ``M**2 - 4 C4 M + 1 = 0``; their product is one.
    """
    M0, C4, _ = conserved_quantities(F0, G0, 0.0)
    M_plus = 2.0 * C4 + envelope_radius(M0, F0)
    # reciprocal avoids cancellation in 2 C4 - radius
    return 1.0 / M_plus, M_plus


# --------------------------------------------------------------------------
# exact solution on the equilibrium characteristic


def harmonic_solution(u0, v0, t):
    """Exact ``(q, p1, p2)`` at F = G = 0, where the linear system is harmonic."""
    t = np.asarray(t, dtype=float)
    c, s = np.cos(t), np.sin(t)
    q = (1.0 - v0) + u0 * s + v0 * c
    p1 = u0 * c - v0 * s
    p2 = u0 * s + v0 * c
    return q, p1, p2


def harmonic_q_star(u0, v0):
    """Minimum of q over a period on the equilibrium characteristic."""
    return 1.0 - v0 - math.hypot(u0, v0)


# --------------------------------------------------------------------------
# integration


@dataclass
class TimeSeries:
    """Sampled trajectory of one characteristic.

    Arrays share the length of ``t``.  ``events`` holds ``"q_zero"`` (list of
    downward zero crossings of q) and ``"blowup"`` (time at which |(u, v)|
    exceeded the explosion threshold, or None).
    """

    t: np.ndarray
    F: np.ndarray
    G: np.ndarray
    r: np.ndarray
    u: np.ndarray
    v: np.ndarray
    q: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    datum: InitialDatum
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    horizon: float = TWO_PI
    events: dict = field(default_factory=dict)

    @property
    def n(self):
        return 1.0 - self.v - 4.0 * self.G

    @property
    def M(self):
        return np.sqrt(1.0 - 4.0 * self.G)

    def column(self, name):
        return getattr(self, name)

    def metadata(self):
        d = self.datum
        return {
            "datum": {"F0": d.F0, "G0": d.G0, "u0": d.u0, "v0": d.v0, "r0": d.r0},
            "rtol": self.rtol,
            "atol": self.atol,
            "horizon": self.horizon,
            "method": _METHOD,
            "n_samples": int(len(self.t)),
            "events": self.events,
        }

    def to_csv(self, path):
        """Write ``t,F,G,r,u,v,q,p1,p2,n`` with 17 significant digits plus a JSON sidecar."""
        path = Path(path)
        cols = [self.column(c) for c in SERIES_COLUMNS]
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SERIES_COLUMNS)
            for row in zip(*cols):
                w.writerow([format(float(x), ".17g") for x in row])
        sidecar = path.with_suffix(path.suffix + ".json")
        sidecar.write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")
        return sidecar


def read_series_csv(path):
    """Read a CSV written by :meth:`TimeSeries.to_csv`; returns ``(columns, metadata)``."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(x) for x in row] for row in body]) if body else np.empty((0, len(header)))
    cols = {name: data[:, i] for i, name in enumerate(header)}
    meta_path = path.with_suffix(path.suffix + ".json")
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    return cols, meta


def _check_solution(sol, what):
    if sol.status == -1:
        raise IntegrationError(f"{what}: {sol.message}",
                               last_t=float(sol.t[-1]), last_state=sol.y[:, -1].copy())


def _q_zero_event(index):
    def event(t, y):
        return y[index]
    event.direction = -1.0
    return event


def integrate_characteristic(datum, horizon=TWO_PI, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                             explosion=DEFAULT_EXPLOSION, max_step=np.inf):
    """Integrate (F, G, r, u, v, q, p1, p2) from t=0 to ``horizon``.

    Stops early once ``hypot(u, v)`` exceeds ``explosion``.  Zero crossings
    of q are localised on the dense output; if the run stopped at blow-up the
    linear subsystem is continued from the last state to locate the zero.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    d = datum
    y0 = [d.F0, d.G0, d.r0, d.u0, d.v0, 1.0, d.u0, d.v0]

    def blow(t, y):
        return math.hypot(y[3], y[4]) - explosion
    blow.terminal = True
    blow.direction = 1.0

    sol = solve_ivp(_rhs_full, (0.0, horizon), y0, method=_METHOD, rtol=rtol, atol=atol,
                    events=[_q_zero_event(5), blow], max_step=max_step)
    _check_solution(sol, "integrate_characteristic")
    q_zero = [float(x) for x in sol.t_events[0]]
    blowup = float(sol.t_events[1][0]) if len(sol.t_events[1]) else None

    if blowup is not None and not q_zero:
        # q is O(1/explosion) here; follow the linear part just past its zero
        F, G, r, _, _, q, p1, p2 = sol.y[:, -1]
        tail = solve_ivp(_rhs_linear_only, (blowup, horizon), [F, G, r, q, p1, p2],
                         method=_METHOD, rtol=rtol, atol=atol,
                         events=_terminal(_q_zero_event(3)))
        _check_solution(tail, "integrate_characteristic (tail)")
        q_zero = [float(x) for x in tail.t_events[0]]

    Y = sol.y
    return TimeSeries(t=sol.t.copy(), F=Y[0], G=Y[1], r=Y[2], u=Y[3], v=Y[4], q=Y[5],
                      p1=Y[6], p2=Y[7], datum=datum, rtol=rtol, atol=atol, horizon=horizon,
                      events={"q_zero": q_zero, "blowup": blowup})


def _terminal(ev):
    ev.terminal = True
    return ev


def density_along(series):
    """Pairs ``(t, n)`` with the density n = 1 - v - 4 G."""
    return np.column_stack([series.t, series.n])


@dataclass(frozen=True)
class LinearRun:
    """Result of integrating the linear system over one period plus guard."""

    q_min: float
    t_min: float
    q_zero: tuple
    t: np.ndarray
    F: np.ndarray
    G: np.ndarray
    q: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    sol: object = None


def integrate_linear(datum, horizon=TWO_PI + DEFAULT_GUARD, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                     dense=False):
    """Integrate (F, G, q, p1, p2); q extrema are located as zeros of p1.

    With ``dense`` the continuous extension is kept in ``.sol``.
    """
    d = datum
    y0 = [d.F0, d.G0, 1.0, d.u0, d.v0]

    def extremum(t, y):
        return y[3]

    sol = solve_ivp(_rhs_oracle, (0.0, horizon), y0, method=_METHOD, rtol=rtol, atol=atol,
                    events=[_q_zero_event(2), extremum], dense_output=dense)
    _check_solution(sol, "integrate_linear")
    q_cand = [sol.y[2]]
    t_cand = [sol.t]
    if len(sol.t_events[1]):
        q_cand.append(sol.y_events[1][:, 2])
        t_cand.append(sol.t_events[1])
    qs = np.concatenate(q_cand)
    ts = np.concatenate(t_cand)
    k = int(np.argmin(qs))
    q_min, t_min = float(qs[k]), float(ts[k])
    q_zero = [float(x) for x in sol.t_events[0]]
    if q_min < 0.0 and not (q_zero and q_zero[0] <= t_min):
        # a shallow dip can fall inside one step, so the sign-change event never fires
        dense_sol = sol.sol
        if dense_sol is None:
            dense_sol = solve_ivp(_rhs_oracle, (0.0, horizon), y0, method=_METHOD, rtol=rtol,
                                  atol=atol, dense_output=True).sol
        t_lo = float(sol.t[sol.t < t_min][-1])
        q_zero.insert(0, brentq(lambda t: dense_sol(t)[2], t_lo, t_min, xtol=1e-14))
    Y = sol.y
    return LinearRun(q_min=q_min, t_min=t_min, q_zero=tuple(q_zero),
                     t=sol.t, F=Y[0], G=Y[1], q=Y[2], p1=Y[3], p2=Y[4], sol=sol.sol)


def oracle_classify(datum, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, guard=DEFAULT_GUARD,
                    margin=DEFAULT_MARGIN):
    """Classify by integrating the linear system over [0, 2 pi + guard]."""
    run = integrate_linear(datum, TWO_PI + guard, rtol, atol)
    kind = verdict_kind(run.q_min, margin)
    t_star = None
    if kind == BLOWUP:
        t_star = run.q_zero[0] if run.q_zero else run.t_min
    return Verdict(kind, run.q_min, t_star, "oracle")


def integrate_riccati(datum, horizon=TWO_PI + DEFAULT_GUARD, rtol=DEFAULT_RTOL,
                      atol=DEFAULT_ATOL, explosion=DEFAULT_EXPLOSION, dense=False):
    """Integrate (F, G, u, v) directly, stopping once hypot(u, v) > ``explosion``."""
    d = datum

    def blow(t, y):
        return math.hypot(y[2], y[3]) - explosion
    blow.terminal = True
    blow.direction = 1.0

    sol = solve_ivp(_rhs_riccati, (0.0, horizon), [d.F0, d.G0, d.u0, d.v0],
                    method=_METHOD, rtol=rtol, atol=atol, events=blow, dense_output=dense)
    _check_solution(sol, "integrate_riccati")
    return sol


def riccati_classify(datum, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, guard=DEFAULT_GUARD,
                     explosion=DEFAULT_EXPLOSION):
    """Second oracle: integrate (F, G, u, v) directly and watch for explosion.

    Returns BlowUp with the explosion time, or Smooth with ``q_star`` NaN
    (this route has no access to q).
    """
    sol = integrate_riccati(datum, TWO_PI + guard, rtol, atol, explosion)
    if len(sol.t_events[0]):
        return Verdict(BLOWUP, math.nan, float(sol.t_events[0][0]), "riccati")
    return Verdict(SMOOTH, math.nan, None, "riccati")


def _rhs_coefficients(t, y):
    return list(rhs_characteristic(*y))


def integrate_coefficients(F0, G0, r0=1.0, horizon=TWO_PI, rtol=DEFAULT_RTOL,
                           atol=DEFAULT_ATOL, dense=False, max_step=LONG_RUN_MAX_STEP):
    """Integrate (F, G, r) alone; returns the scipy solution object.

    The step cap keeps global error of the first integrals near 1e-9 over
    ten periods; without it the drift reaches a few 1e-8 at tolerance 1e-10.
    """
    _m0(G0)
    sol = solve_ivp(_rhs_coefficients, (0.0, horizon), [F0, G0, r0], method=_METHOD,
                    rtol=rtol, atol=atol, dense_output=dense, max_step=max_step)
    _check_solution(sol, "integrate_coefficients")
    return sol


@dataclass(frozen=True)
class PeriodMeasurement:
    period: float
    integral_F: float
    return_error: float


def measure_period(F0, G0, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, match_tol=1e-6):
    """Measure the period of (F, G) by a return-map event.

    The crossing coordinate is whichever of F, G moves faster at t=0; a
    crossing counts as a return when it has the initial direction and the
    other coordinate matches its initial value within ``match_tol``.
    Also returns the integral of F over the measured period.
    """
    if F0 == 0.0 and G0 == 0.0:
        raise ValueError("(F0, G0) = (0, 0) is an equilibrium; no period")
    _m0(G0)
    dF0, dG0, _ = rhs_characteristic(F0, G0, 0.0)
    idx, other = (0, 1) if abs(dF0) >= abs(dG0) else (1, 0)
    start = (F0, G0)
    slope = (dF0, dG0)[idx]

    def cross(t, y):
        return y[idx] - start[idx]
    cross.direction = math.copysign(1.0, slope)

    sol = solve_ivp(_rhs_period, (0.0, 1.5 * TWO_PI), [F0, G0, 0.0], method=_METHOD,
                    rtol=rtol, atol=atol, events=cross)
    _check_solution(sol, "measure_period")
    scale = max(1.0, abs(F0), abs(G0))
    for t, y in zip(sol.t_events[0], sol.y_events[0]):
        err = abs(y[other] - start[other])
        if t > 1e-3 and err <= match_tol * scale:
            return PeriodMeasurement(float(t), float(y[2]), float(err))
    raise IntegrationError("no return to the initial state within 1.5 periods",
                           last_t=float(sol.t[-1]), last_state=sol.y[:, -1].copy())
