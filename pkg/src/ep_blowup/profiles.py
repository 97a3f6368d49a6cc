"""Radial initial data V0(r) = F0(r) r, E0(r) = G0(r) r and their characteristic data.

In d=4, ``div(F(r) r) = 4 F + r F'``, so the gradient variables are
``u0 = r F0'(r)`` and ``v0 = r G0'(r)``.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Callable, NamedTuple, Optional

import numpy as np

from .dynamics import InitialDatum
from .exceptions import InadmissibleDatumError


class GaussianPulse:
    """``E0 = a r exp(-r^2/2)``, ``V0 = 0``; requires ``0 < a < 1/4``."""

    r_max = math.inf

    def __init__(self, a):
        a = float(a)
        if not 0.0 < a < 0.25:
            raise InadmissibleDatumError(f"Gaussian amplitude a={a!r} must lie in (0, 1/4)")
        self.a = a

    def __repr__(self):
        return f"GaussianPulse(a={self.a!r})"

    def scaled(self, r):
        g = self.a * math.exp(-0.5 * r * r)
        return 0.0, g, 0.0, -r * r * g


class AnalyticPair:
    """Profile given by callables ``F0(r)``, ``G0(r)`` and their derivatives."""

    def __init__(self, F0: Callable, G0: Callable, dF0: Callable, dG0: Callable,
                 r_max=math.inf):
        self.F0, self.G0, self.dF0, self.dG0 = F0, G0, dF0, dG0
        self.r_max = r_max

    @classmethod
    def zero(cls):
        z = lambda r: 0.0  # noqa: E731
        return cls(z, z, z, z)

    @classmethod
    def linear_velocity(cls, c):
        """``V0 = c r``, ``E0 = 0``."""
        return cls(lambda r: c, lambda r: 0.0, lambda r: 0.0, lambda r: 0.0)

    def scaled(self, r):
        return self.F0(r), self.G0(r), r * self.dF0(r), r * self.dG0(r)


def fd_weights(x, x0, order):
    """Finite-difference weights on nodes ``x`` for the derivative of ``order`` at ``x0``.

    Exact for polynomials of degree ``len(x) - 1``.
    """
    x = np.asarray(x, dtype=float) - x0
    n = len(x)
    V = np.vander(x, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


class Tabulated:
    """Sampled ``(r, V0, E0)`` with finite-difference derivatives.

    Values and first derivatives at any r0 in range use the 5 nearest
    samples (4th order or better), falling back to 3 when fewer exist.
    """

    def __init__(self, r, V0, E0):
        r = np.asarray(r, dtype=float)
        V0 = np.asarray(V0, dtype=float)
        E0 = np.asarray(E0, dtype=float)
        if r.ndim != 1 or r.shape != V0.shape or r.shape != E0.shape:
            raise ValueError("r, V0, E0 must be 1-D arrays of equal length")
        if len(r) < 3:
            raise ValueError("need at least 3 samples for finite differences")
        if r[0] < 0 or np.any(np.diff(r) <= 0):
            raise ValueError("sample radii must be non-negative and strictly increasing")
        if not (np.all(np.isfinite(V0)) and np.all(np.isfinite(E0))):
            raise ValueError("non-finite profile samples")
        self.r, self.V0, self.E0 = r, V0, E0
        self.r_min, self.r_max = float(r[0]), float(r[-1])

    @classmethod
    def from_csv(cls, path):
        """Read a CSV with header ``r,V0,E0``."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["r", "V0", "E0"]:
                raise ValueError(f"{path}: expected header r,V0,E0, got {reader.fieldnames}")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                try:
                    rows.append([float(row["r"]), float(row["V0"]), float(row["E0"])])
                except (TypeError, ValueError) as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
        a = np.array(rows)
        return cls(a[:, 0], a[:, 1], a[:, 2])

    def _stencil(self, r0):
        n = len(self.r)
        width = 5 if n >= 5 else 3
        i = int(np.searchsorted(self.r, r0))
        lo = min(max(i - width // 2, 0), n - width)
        return slice(lo, lo + width)

    def _value_and_slope(self, y, r0):
        sl = self._stencil(r0)
        x = self.r[sl]
        return float(fd_weights(x, r0, 0) @ y[sl]), float(fd_weights(x, r0, 1) @ y[sl])

    def scaled(self, r):
        V, dV = self._value_and_slope(self.V0, r)
        E, dE = self._value_and_slope(self.E0, r)
        if r == 0.0:
            return dV, dE, 0.0, 0.0
        F, G = V / r, E / r
        # r F' = V' - V/r
        return F, G, dV - F, dE - G


def datum_at(profile, r0):
    """Characteristic initial datum of ``profile`` at radius ``r0``."""
    r0 = float(r0)
    lo = getattr(profile, "r_min", 0.0)
    if not (lo <= r0 <= profile.r_max) or r0 < 0:
        raise ValueError(f"r0={r0!r} outside the profile domain [{lo}, {profile.r_max}]")
    F0, G0, u0, v0 = profile.scaled(r0)
    if not all(math.isfinite(x) for x in (F0, G0, u0, v0)):
        raise ValueError(f"non-finite profile limit at r0={r0!r}")
    return InitialDatum(F0, G0, u0, v0, r0)


class ValidationReport(NamedTuple):
    ok: bool
    r0: Optional[float] = None
    reason: Optional[str] = None


def validate_profile(profile, grid):
    """Check G0 < 1/4 and positive initial density at each grid radius."""
    for r0 in grid:
        F0, G0, u0, v0 = profile.scaled(float(r0))
        if not G0 < 0.25:
            return ValidationReport(False, float(r0), f"G0={G0!r} >= 1/4")
        n = 1.0 - (v0 + 4.0 * G0)
        if not n > 0.0:
            return ValidationReport(False, float(r0), f"initial density {n!r} <= 0")
    return ValidationReport(True)


def radial_grid(r_max, step, r_min=0.0):
    """Inclusive uniform grid ``r_min, r_min + step, ..., r_max``."""
    if not step > 0 or not r_max >= r_min:
        raise ValueError("need step > 0 and r_max >= r_min")
    n = int(math.floor((r_max - r_min) / step + 1e-9)) + 1
    return r_min + step * np.arange(n)


def critical_background(C, r):
    """Field profile ``G0*(r) = 1/4 - C r^2``, the solution of ``r G' = 2 G - 1/2``.

    This is where ``v0 + M0^2/2`` (the printed zero-velocity margin) vanishes
    identically.  The resolved margin ``M0^2/2 - v0`` instead vanishes on
    ``1/4 + C / r^2``, which is singular at the origin.
    """
    if not C > 0:
        raise ValueError(f"C={C!r} must be positive")
    return 0.25 - C * np.asarray(r, dtype=float) ** 2
