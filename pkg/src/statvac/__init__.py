"""statvac: verification toolkit for stationary vacuum space-time geometries.

Finite-difference/spectral tensor calculus on coordinate charts, the reduced
stationary Einstein system, radial (Gauss) foliations, boundary Killing
initial data and their radial extensions, asymptotic boundary expansions,
weighted-inequality experiments, and static axisymmetric vacuum solutions.
"""

from .grid import Axis, ChartGrid, GridError, interval_axis, periodic_axis
from .fields import (
    LORENTZIAN,
    RIEMANNIAN,
    FieldError,
    MetricField,
    SingularMetricError,
    TensorField,
    one_form,
    scalar_field,
    sym2_field,
    vector_field,
)

__version__ = "0.1.0"
