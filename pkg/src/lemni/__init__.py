"""Random polynomial lemniscates {|p_n| < 1}: sampling, potentials, rasters and certificates."""
from .measures import (
    Empirical,
    GinibreNormalized,
    PotentialValue,
    UniformCircle,
    UniformDisk,
    negative_set_inradius,
    parse_measure,
    potential,
    potential_mc,
    sample,
    variance_sigma2,
)
from .polynomial import (
    DiskCertificate,
    ZeroSet,
    certify_disk,
    inf_bound_on_circle,
    log_modulus,
    sup_bound_on_circle,
)
from .raster import Box, Raster, distance_transform, inradius_estimate, rasterize

__version__ = "0.1.0"
