"""Closed-form blow-up criterion for the d=4 characteristic system.

With ``M = sqrt(1 - 4G)`` the orbit of (F, G) is the curve
``F = sigma W(M) / 2`` with ``W(M) = sqrt(4 C4 M - 1 - M**2)`` and
``sigma = sign F``.  Written as functions of M, the linear variables
integrate in closed form:

    P(M) = -[C2 (2 C4 - M) - sigma C3 W] / sqrt(M)
    R(M) = -[sigma C2 (2 C4 + M) W + C3 (1 - M**2)] / (2 sqrt(M))
    q(M) = C1 + [sigma C2 W - C3 M] / M0**1.5

where ``P = p1 (M0/M)**1.5`` solves ``P'' + (1 - 3G) P = 0`` and ``R = P'``.
The constants come from a 2x2 linear solve at ``M = M0``.  The minimum of
q over a period is attained where ``P = 0`` or at an envelope endpoint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from . import dynamics
from .dynamics import (BLOWUP, DEFAULT_MARGIN, MARGINAL, SMOOTH, InitialDatum, Verdict,
                       conserved_quantities, envelope, envelope_radius, harmonic_q_star,
                       verdict_kind)
from .exceptions import DegenerateDatumError, InadmissibleDatumError, OutOfEnvelopeError

DET_FLOOR = 1e-14
_ENVELOPE_SLACK = 1e-10
_CANDIDATE_TOL = 1e-9


@dataclass(frozen=True)
class CriterionConstants:
    M0: float
    C4: float
    K1: float
    M_minus: float
    M_plus: float
    sigma0: int
    P0: float
    R0: float
    C1: float
    C2: float
    C3: float
    lam: Optional[float]
    det: float
    F0: float = 0.0
    extremum_candidates: tuple = field(default=())

    def to_dict(self):
        return {
            "M0": self.M0, "C4": self.C4, "K1": self.K1,
            "M_minus": self.M_minus, "M_plus": self.M_plus, "sigma0": self.sigma0,
            "P0": self.P0, "R0": self.R0, "C1": self.C1, "C2": self.C2, "C3": self.C3,
            "lambda": self.lam, "det": self.det,
            "extremum_candidates": [list(c) for c in self.extremum_candidates],
        }


def _sign(x):
    return (x > 0) - (x < 0)


def w_of_m(C4, M):
    """``sqrt(4 C4 M - 1 - M**2)``; round-off negatives near the envelope clip to 0."""
    M = np.asarray(M, dtype=float)
    arg = 4.0 * C4 * M - 1.0 - M * M
    slack = _ENVELOPE_SLACK * np.maximum(1.0, 4.0 * C4 * M)
    if np.any(arg < -slack):
        raise OutOfEnvelopeError(f"M outside the envelope (4 C4 M - 1 - M^2 = {np.min(arg)!r})")
    out = np.sqrt(np.maximum(arg, 0.0))
    return float(out) if out.ndim == 0 else out


def _w(consts, M):
    """W(M) in the cancellation-free form ``(M - M0)(1 - M M0)/M0 + 4 F0^2 M / M0``.

    Same value as :func:`w_of_m`, but exact at M = M0 (W = 2|F0|) even when
    F0**2 is below the resolution of C4.
    """
    c = consts
    M = np.asarray(M, dtype=float)
    arg = ((M - c.M0) * (1.0 - M * c.M0) + 4.0 * c.F0 * c.F0 * M) / c.M0
    slack = _ENVELOPE_SLACK * np.maximum(1.0, 4.0 * c.C4 * M)
    if np.any(arg < -slack):
        raise OutOfEnvelopeError(f"M outside the envelope (W^2 = {np.min(arg)!r})")
    out = np.sqrt(np.maximum(arg, 0.0))
    return float(out) if out.ndim == 0 else out


def endpoint_values(datum):
    """Initial values ``(P0, R0)`` of the undamped variable and its time derivative.

    ``R0 = F0 u0 - v0`` follows from ``dp1/dt(0) = -2 F0 u0 - v0`` and
    ``P = p1 exp(3 int F)``.
    """
    return datum.u0, datum.F0 * datum.u0 - datum.v0


def _endpoint_system(M0, C4, sigma, W0):
    """Matrix A with ``A @ (C2, C3) = (P(M0), R(M0))``."""
    s = math.sqrt(M0)
    return np.array([
        [-(2.0 * C4 - M0) / s, sigma * W0 / s],
        [-sigma * (2.0 * C4 + M0) * W0 / (2.0 * s), -(1.0 - M0 * M0) / (2.0 * s)],
    ])


def y_term(C2, C3, C4, K1, M, sigma):
    """The M-dependent part of q: ``[sigma C2 W(M) - C3 M] / K1**3``."""
    return (sigma * C2 * w_of_m(C4, M) - C3 * np.asarray(M)) / K1 ** 3


def criterion_constants(datum, R0=None):
    """Solve for the closed-form constants of a non-degenerate datum.

    ``R0`` overrides the endpoint value (used to evaluate alternative
    conventions in the verification report).
    """
    if datum.is_harmonic:
        raise DegenerateDatumError("F0 = G0 = 0: the M-parametrisation is singular")
    F0, G0 = datum.F0, datum.G0
    M0, C4, _ = conserved_quantities(F0, G0, 0.0)
    M_minus, M_plus = envelope(F0, G0)
    sigma0 = _sign(F0)
    # W(M0) = 2|F0| exactly from the first integral
    W0 = 2.0 * abs(F0)
    P0, R0_ = endpoint_values(datum)
    if R0 is not None:
        R0_ = R0
    A = _endpoint_system(M0, C4, sigma0, W0)
    det = float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    if abs(det) < DET_FLOOR:
        raise DegenerateDatumError(f"endpoint determinant {det!r} below {DET_FLOOR}")
    C2, C3 = np.linalg.solve(A, [P0, R0_])
    C2, C3 = float(C2), float(C3)
    K1 = math.sqrt(M0)
    C1 = 1.0 - (sigma0 * C2 * W0 - C3 * M0) / K1 ** 3
    lam = C3 / math.hypot(C2, C3) if (C2 != 0.0 or C3 != 0.0) else None
    consts = CriterionConstants(M0=M0, C4=C4, K1=K1, M_minus=M_minus, M_plus=M_plus,
                                sigma0=sigma0, P0=P0, R0=R0_, C1=C1, C2=C2, C3=C3,
                                lam=lam, det=det, F0=F0)
    return _with_candidates(consts)


def _with_candidates(consts):
    return CriterionConstants(**{**consts.__dict__,
                                 "extremum_candidates": tuple(extremum_candidates(consts))})


def closed_forms(consts, M, sigma, F=None):
    """Return ``(q, P, R)`` at envelope point(s) ``M`` on branch ``sigma``.

    On the orbit W(M) = 2|F|.  Passing the field ``F`` uses ``sigma W = 2 F``
    directly (``sigma`` is then ignored), which avoids the square-root
    conditioning of W(M) next to the envelope ends when evaluating along an
    integrated trajectory.
    """
    c = consts
    M = np.asarray(M, dtype=float)
    sW = sigma * _w(c, M) if F is None else 2.0 * np.asarray(F, dtype=float)
    sM = np.sqrt(M)
    P = -(c.C2 * (2.0 * c.C4 - M) - c.C3 * sW) / sM
    R = -(c.C2 * (2.0 * c.C4 + M) * sW + c.C3 * (1.0 - M * M)) / (2.0 * sM)
    q = c.C1 + (c.C2 * sW - c.C3 * M) / c.K1 ** 3
    if M.ndim == 0:
        return float(q), float(P), float(R)
    return q, P, R


def extremum_candidates(consts):
    """Points ``(sigma, M)`` where q can attain its extrema.

    Interior points solve ``C2 (2 C4 - M) = sigma C3 W(M)``; the two
    envelope endpoints are always appended (W = 0 there, so q does not
    depend on sigma; they are tagged sigma = +1).
    """
    c = consts
    endpoints = [(1, c.M_minus), (1, c.M_plus)]
    if c.C2 == 0.0 or c.lam is None:
        return endpoints
    disc = envelope_radius(c.M0, c.F0)
    scale = abs(c.C2) + abs(c.C3)
    out = []
    for s in (1.0, -1.0):
        M = 2.0 * c.C4 + s * abs(c.lam) * disc
        M = min(max(M, c.M_minus), c.M_plus)
        W = _w(c, M)
        for sigma in (1, -1):
            resid = c.C2 * (2.0 * c.C4 - M) - sigma * c.C3 * W
            if abs(resid) <= _CANDIDATE_TOL * scale * max(1.0, M):
                out.append((sigma, M))
    return out + endpoints


def q_star(datum):
    """Minimum of q over one period, from the closed forms."""
    return _q_star_and_method(datum)[0]


def _q_star_and_method(datum):
    if datum.is_harmonic:
        return harmonic_q_star(datum.u0, datum.v0), "closed-form"
    if datum.u0 == 0.0 and datum.v0 == 0.0:
        return 1.0, "closed-form"
    try:
        c = criterion_constants(datum)
    except DegenerateDatumError:
        # within round-off of the equilibrium; defer to integration
        return dynamics.integrate_linear(datum).q_min, "oracle"
    return min(closed_forms(c, M, s)[0] for s, M in c.extremum_candidates), "closed-form"


def classify(datum, margin=DEFAULT_MARGIN, with_time=True):
    """Smooth iff q_star > margin, BlowUp iff q_star < -margin, else Marginal.

    For BlowUp the first zero of q is taken from the linear-system oracle
    when ``with_time`` is set.
    """
    qs, method = _q_star_and_method(datum)
    kind = verdict_kind(qs, margin)
    t_star = None
    if kind == BLOWUP and with_time:
        run = dynamics.integrate_linear(datum)
        t_star = run.q_zero[0] if run.q_zero else run.t_min
    return Verdict(kind, qs, t_star, method)


# --------------------------------------------------------------------------
# special cases


class ZeroVelocityResult(NamedTuple):
    verdict: str
    resolved_margin: float
    printed_margin: float


def criterion_zero_velocity(G0, divE0):
    """Zero initial velocity: smooth iff ``v0 < M0**2 / 2``.

    ``printed_margin = v0 + M0**2/2`` is the opposite-direction inequality
    ``div E0 > 6 G0 - 1/2``, reported for comparison only.
    """
    if not G0 < 0.25:
        raise InadmissibleDatumError(f"G0={G0!r} must be < 1/4")
    v0 = divE0 - 4.0 * G0
    M0sq = 1.0 - 4.0 * G0
    resolved = 0.5 * M0sq - v0
    printed = v0 + 0.5 * M0sq
    return ZeroVelocityResult(SMOOTH if resolved > 0 else BLOWUP, resolved, printed)


class ZeroFieldResult(NamedTuple):
    verdict: str
    margin: float
    printed_margin: float


def criterion_zero_field(F0, divV0):
    """Zero initial field: smooth iff ``|u0| < 1`` with ``u0 = div V0 - 4 F0``.

    With G0 = v0 = 0 the constants give ``C1 - 2 C4 C3 = 1`` and
    ``sqrt(4 C4^2 - 1) hypot(C2, C3) = |u0|`` for every F0, so the minimum
    of q is ``1 - |u0|``.  ``printed_margin`` is
    ``min_pm 1 - (F0 pm (F0^2-1)/sqrt(F0^2+1)) u0``, which coincides only at
    F0 = 0 and is reported for comparison.
    """
    u0 = divV0 - 4.0 * F0
    margin = 1.0 - abs(u0)
    k = (F0 * F0 - 1.0) / math.sqrt(F0 * F0 + 1.0)
    printed = min(1.0 - (F0 + k) * u0, 1.0 - (F0 - k) * u0)
    return ZeroFieldResult(SMOOTH if margin > 0 else BLOWUP, margin, printed)


def q_star_circle(consts):
    """Minimum of q from the circle form of the orbit.

    ``(M - 2 C4, sigma W)`` runs over a circle of radius ``sqrt(4 C4^2 - 1)``,
    so ``min q = C1 - 2 C4 C3 / K1^3 - sqrt(4 C4^2 - 1) hypot(C2, C3) / K1^3``.
    """
    c = consts
    D = envelope_radius(c.M0, c.F0)
    return c.C1 - (2.0 * c.C4 * c.C3 + D * math.hypot(c.C2, c.C3)) / c.K1 ** 3


def criterion_d1(dV0, dE0, n0=1.0):
    """One-dimensional criterion: smooth iff ``dV0**2 + 2 dE0 - n0 < 0``."""
    if not n0 > 0:
        raise ValueError(f"n0={n0!r} must be positive")
    return SMOOTH if dV0 * dV0 + 2.0 * dE0 - n0 < 0 else BLOWUP


def sabatini_isochronous(d):
    """Isochronicity test for ``y'' + (2+d) y y' + y + d y**3 = 0``.

    With f(y) = (2+d) y and g(y) = y + d y**3 the function
    ``(int_0^y s f(s) ds)**2 - y**3 (g(y) - g'(0) y)`` equals
    ``((2+d)**2/9 - d) y**6``.  Returns the exact coefficient and whether it
    vanishes.
    """
    d = Fraction(d)
    if d <= 0:
        raise ValueError(f"dimension d={d} must be positive")
    coeff = (2 + d) ** 2 / Fraction(9) - d
    return coeff, coeff == 0


def critical_line_zero_velocity():
    """Frontier ``div E0 = 2 G0 + 1/2`` of the zero-velocity plane as (slope, intercept)."""
    return 2.0, 0.5


__all__ = [
    "CriterionConstants", "endpoint_values", "criterion_constants", "closed_forms",
    "extremum_candidates", "q_star", "classify", "criterion_zero_velocity",
    "criterion_zero_field", "criterion_d1", "q_star_circle", "sabatini_isochronous", "w_of_m",
    "ZeroVelocityResult", "ZeroFieldResult", "SMOOTH", "BLOWUP", "MARGINAL", "InitialDatum",
]
