"""Arithmetic structure of unit vectors and small-ball experiments for random symmetric matrices."""

from .anticonc import (
    AtomDistribution,
    ConcentrationEstimate,
    esseen_levy_bound,
    levy_exact,
    levy_mc,
    mrlcd_anticonc_bound,
    rogozin_bound,
    tensorization_bound,
    weighted_sum_atoms,
)
from .arithmetic import (
    LcdBracket,
    LcdParams,
    is_admissible,
    lattice_distance,
    lcd,
    level_set_member,
    median_threshold,
    mrlcd,
    threshold,
)
from .ensembles import (
    EntryLaw,
    distance_to_rowspan,
    quadratic_distance_identity,
    quadratic_form_statistic,
    sample_symmetric,
    singular_extremes,
)
from .errors import (
    CapacityError,
    CertificationError,
    MrlcdError,
    NumericError,
    ParameterError,
    PreconditionError,
    StructuralError,
)
from .geometry import SphereParams, is_compressible, spread_assignment
from .rounding import levy_round, randomized_round

__version__ = "0.1.0"
