"""Blow-up analysis for radial solutions of the pressureless repulsive
Euler-Poisson equations in four space dimensions.

Each characteristic carries a datum ``(F0, G0, u0, v0)``.  The solution stays
smooth along it iff the projective denominator ``q`` of the linearised
gradient system stays positive over one period (which is always 2 pi).
``criterion`` computes the minimum of ``q`` in closed form; ``dynamics``
integrates the ODEs directly and serves as the reference.
"""
from .criterion import (CriterionConstants, classify, closed_forms, criterion_constants,
                        criterion_d1, criterion_zero_field, criterion_zero_velocity,
                        endpoint_values, extremum_candidates, q_star, sabatini_isochronous)
from .dynamics import (BLOWUP, MARGINAL, SMOOTH, InitialDatum, TimeSeries, Verdict,
                       conserved_quantities, density_along, envelope, integrate_characteristic,
                       measure_period, oracle_classify)
from .exceptions import (DegenerateDatumError, InadmissibleDatumError, IntegrationError,
                         OutOfEnvelopeError)
from .profiles import AnalyticPair, GaussianPulse, Tabulated, datum_at, validate_profile
from .sweep import ScanRequest, fit_frontier, scan_plane, scan_radial

__version__ = "0.1.0"

__all__ = [
    "AnalyticPair", "BLOWUP", "CriterionConstants", "DegenerateDatumError", "GaussianPulse",
    "InadmissibleDatumError", "InitialDatum", "IntegrationError", "MARGINAL", "OutOfEnvelopeError",
    "SMOOTH", "ScanRequest", "Tabulated", "TimeSeries", "Verdict", "classify", "closed_forms",
    "conserved_quantities", "criterion_constants", "criterion_d1", "criterion_zero_field",
    "criterion_zero_velocity", "datum_at", "density_along", "endpoint_values", "envelope",
    "extremum_candidates", "fit_frontier", "integrate_characteristic", "measure_period",
    "oracle_classify", "q_star", "sabatini_isochronous", "scan_plane", "scan_radial",
    "validate_profile",
]
