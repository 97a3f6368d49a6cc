"""Parameter sweeps: radial profile scans and two-parameter plane scans.

Cells are independent; work is split into contiguous row chunks and
results are written back by index, so output does not depend on the
number of workers.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import criterion, dynamics
from .dynamics import BLOWUP, DEFAULT_MARGIN, MARGINAL, SMOOTH, InitialDatum
from .exceptions import InadmissibleDatumError
from .profiles import datum_at, validate_profile

INADMISSIBLE = "Inadmissible"
CLASSES = (SMOOTH, BLOWUP, MARGINAL, INADMISSIBLE)

METHODS = ("closed-form", "oracle", "both")

PLANES = {
    "zero-velocity": ("G0", "divE0"),
    "zero-field": ("F0", "divV0"),
}

# default axis ranges (the published figure does not state them)
FIGURE_DEFAULTS = {
    "fig1-left": ("zero-velocity", (-1.0, 0.24), (-2.0, 2.0), 100),
    "fig1-right": ("zero-field", (-2.0, 2.0), (-2.0, 2.0), 100),
}


def plane_datum(plane, x, y, r0=1.0):
    """Pointwise datum for a cell of a zero-velocity or zero-field plane."""
    if plane == "zero-velocity":
        return InitialDatum(0.0, x, 0.0, y - 4.0 * x, r0)
    if plane == "zero-field":
        return InitialDatum(x, 0.0, y - 4.0 * x, 0.0, r0)
    raise ValueError(f"unknown plane {plane!r}")


@dataclass(frozen=True)
class CellResult:
    q_star: float
    verdict: str
    t_star: Optional[float] = None
    closed_verdict: Optional[str] = None
    oracle_verdict: Optional[str] = None

    @property
    def disagrees(self):
        v = (self.closed_verdict, self.oracle_verdict)
        return None not in v and MARGINAL not in v and v[0] != v[1]


def classify_datum(datum, method="closed-form", margin=DEFAULT_MARGIN, with_time=True):
    """Classify one datum by the closed form, the oracle, or both.

    With ``both`` the oracle verdict is reported and the closed-form one
    kept alongside for disagreement bookkeeping.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    closed = oracle = None
    if method in ("closed-form", "both"):
        closed = criterion.classify(datum, margin, with_time=with_time and method == "closed-form")
    if method in ("oracle", "both"):
        oracle = dynamics.oracle_classify(datum, margin=margin)
    main = oracle if oracle is not None else closed
    return CellResult(main.q_star, main.kind, main.t_star,
                      closed.kind if closed else None, oracle.kind if oracle else None)


def _parallel_rows(fn, n_rows, workers):
    if workers <= 1 or n_rows <= 1:
        return [fn(i) for i in range(n_rows)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_rows)))


def cell_centers(lo, hi, n):
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise ValueError(f"bad axis bounds ({lo}, {hi})")
    if n < 2:
        raise ValueError("resolution must be at least 2")
    h = (hi - lo) / n
    return lo + h * (np.arange(n) + 0.5)


@dataclass(frozen=True)
class ScanRequest:
    plane: str
    x_bounds: tuple
    y_bounds: tuple
    resolution: object = 100
    method: str = "closed-form"
    margin: float = DEFAULT_MARGIN
    r0: float = 1.0

    def __post_init__(self):
        if self.plane not in PLANES:
            raise ValueError(f"plane must be one of {sorted(PLANES)}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.plane == "zero-velocity" and not self.x_bounds[1] < 0.25:
            raise ValueError("zero-velocity plane needs G0 upper bound < 1/4")
        nx, ny = self.shape
        cell_centers(*self.x_bounds, nx)
        cell_centers(*self.y_bounds, ny)

    @property
    def shape(self):
        res = self.resolution
        return (res, res) if isinstance(res, int) else tuple(res)


@dataclass
class ScanResult:
    request: ScanRequest
    x: np.ndarray
    y: np.ndarray
    q_star: np.ndarray  # shape (nx, ny)
    verdict: np.ndarray  # object array of class names
    t_star: np.ndarray
    closed_verdict: Optional[np.ndarray] = None
    oracle_verdict: Optional[np.ndarray] = None
    disagreements: list = field(default_factory=list)

    @property
    def axis_names(self):
        return PLANES[self.request.plane]

    def counts(self):
        flat = list(self.verdict.ravel())
        return {c: flat.count(c) for c in CLASSES}

    def worst(self):
        q = np.where(np.isnan(self.q_star), np.inf, self.q_star)
        i, j = np.unravel_index(int(np.argmin(q)), q.shape)
        return {"x": float(self.x[i]), "y": float(self.y[j]), "q_star": float(self.q_star[i, j])}

    def disagreement_fraction(self):
        if self.closed_verdict is None or self.oracle_verdict is None:
            return None
        ok = [(c, o) for c, o in zip(self.closed_verdict.ravel(), self.oracle_verdict.ravel())
              if c not in (MARGINAL, INADMISSIBLE) and o not in (MARGINAL, INADMISSIBLE)]
        if not ok:
            return 0.0
        return sum(c != o for c, o in ok) / len(ok)

    def rows(self):
        """Cells in row-major order: x outer, y inner."""
        for i, x in enumerate(self.x):
            for j, y in enumerate(self.y):
                yield x, y, self.q_star[i, j], self.verdict[i, j], self.t_star[i, j]

    def to_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([*self.axis_names, "q_star", "verdict", "t_star"])
            for x, y, q, v, t in self.rows():
                w.writerow([_fmt(x), _fmt(y), _fmt(q), v, "" if math.isnan(t) else _fmt(t)])

    def summary(self):
        out = {
            "plane": self.request.plane,
            "axes": list(self.axis_names),
            "x_bounds": list(self.request.x_bounds),
            "y_bounds": list(self.request.y_bounds),
            "shape": list(self.request.shape),
            "method": self.request.method,
            "margin": self.request.margin,
            "counts": self.counts(),
            "worst": self.worst(),
            "disagreements": [[_fmt(self.x[i]), _fmt(self.y[j])] for i, j in self.disagreements],
            "disagreement_fraction": self.disagreement_fraction(),
        }
        try:
            out["frontier"] = fit_frontier(self).to_dict()
        except ValueError as exc:
            out["frontier"] = {"error": str(exc)}
        return out

    def write_summary(self, path):
        Path(path).write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")


def _fmt(x):
    return format(float(x), ".17g")


def scan_plane(request, workers=1, with_time=None):
    """Classify every cell centre of the requested plane."""
    req = request
    nx, ny = req.shape
    xs = cell_centers(*req.x_bounds, nx)
    ys = cell_centers(*req.y_bounds, ny)
    if with_time is None:
        with_time = req.method != "closed-form"

    def row(i):
        out = []
        for y in ys:
            try:
                d = plane_datum(req.plane, float(xs[i]), float(y), req.r0)
            except InadmissibleDatumError:
                out.append(CellResult(math.nan, INADMISSIBLE, None, INADMISSIBLE, INADMISSIBLE))
                continue
            out.append(classify_datum(d, req.method, req.margin, with_time))
        return out

    rows = _parallel_rows(row, nx, workers)
    q = np.array([[c.q_star for c in r] for r in rows], dtype=float)
    v = np.array([[c.verdict for c in r] for r in rows], dtype=object)
    t = np.array([[math.nan if c.t_star is None else c.t_star for c in r] for r in rows])
    closed = oracle = None
    if req.method == "both":
        closed = np.array([[c.closed_verdict for c in r] for r in rows], dtype=object)
        oracle = np.array([[c.oracle_verdict for c in r] for r in rows], dtype=object)
    dis = [(i, j) for i, r in enumerate(rows) for j, c in enumerate(r) if c.disagrees]
    return ScanResult(req, xs, ys, q, v, t, closed, oracle, dis)


def figure_request(which, method="closed-form", resolution=None):
    plane, xb, yb, res = FIGURE_DEFAULTS[which]
    return ScanRequest(plane, xb, yb, resolution or res, method)


@dataclass(frozen=True)
class FrontierFit:
    slope: float
    intercept: float
    max_residual_cells: float
    n_points: int
    points: tuple

    def to_dict(self):
        return {"slope": self.slope, "intercept": self.intercept,
                "max_residual_cells": self.max_residual_cells, "n_points": self.n_points}


def frontier_points(result):
    """Midpoints between vertically adjacent Smooth/BlowUp cells, per x column."""
    pts = []
    for i, x in enumerate(result.x):
        col = result.verdict[i]
        for j in range(len(col) - 1):
            if {col[j], col[j + 1]} == {SMOOTH, BLOWUP}:
                pts.append((float(x), 0.5 * float(result.y[j] + result.y[j + 1])))
    return pts


def fit_frontier(result):
    """Least-squares line through the Smooth/BlowUp boundary.

    The residual is the largest perpendicular distance of a boundary point
    from the line, measured in grid-cell units.
    """
    counts = result.counts()
    if counts[SMOOTH] == 0 or counts[BLOWUP] == 0:
        raise ValueError("frontier fit needs both Smooth and BlowUp cells")
    pts = frontier_points(result)
    if len(pts) < 2:
        raise ValueError("fewer than two boundary points")
    P = np.array(pts)
    slope, intercept = np.polyfit(P[:, 0], P[:, 1], 1)
    dx = result.x[1] - result.x[0]
    dy = result.y[1] - result.y[0]
    # distance in index space, where cells are unit squares
    a = slope * dx / dy
    resid = (P[:, 1] - (slope * P[:, 0] + intercept)) / dy
    dist = np.abs(resid) / math.sqrt(1.0 + a * a)
    return FrontierFit(float(slope), float(intercept), float(dist.max()), len(pts), tuple(pts))


@dataclass
class RadialScan:
    r0: np.ndarray
    q_star: np.ndarray
    verdict: list
    t_star: np.ndarray
    global_verdict: str
    worst_r0: float
    blowup_time_bound: Optional[float]

    def to_csv(self, path):
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r0", "q_star", "verdict", "t_star"])
            for r, q, v, t in zip(self.r0, self.q_star, self.verdict, self.t_star):
                w.writerow([_fmt(r), _fmt(q), v, "" if math.isnan(t) else _fmt(t)])


def scan_radial(profile, grid, method="closed-form", margin=DEFAULT_MARGIN, workers=1):
    """Classify every characteristic of a profile; smooth overall iff every one is."""
    grid = np.asarray(grid, dtype=float)
    report = validate_profile(profile, grid)
    if not report.ok:
        raise InadmissibleDatumError(f"profile invalid at r0={report.r0}: {report.reason}")

    def one(k):
        return classify_datum(datum_at(profile, grid[k]), method, margin)

    cells = _parallel_rows(one, len(grid), workers)
    q = np.array([c.q_star for c in cells])
    v = [c.verdict for c in cells]
    t = np.array([math.nan if c.t_star is None else c.t_star for c in cells])
    if all(k == SMOOTH for k in v):
        overall = SMOOTH
    elif BLOWUP in v:
        overall = BLOWUP
    else:
        overall = MARGINAL
    bound = float(np.nanmin(t)) if BLOWUP in v else None
    return RadialScan(grid, q, v, t, overall, float(grid[int(np.argmin(q))]), bound)
