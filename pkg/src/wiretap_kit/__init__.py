"""Invertible randomness extractors and wiretap protocols, verified exactly at desk scale."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .kernels import BACKEND  # noqa: F401
from .gf import Field, field, rank, rref, sample_affine, solve_affine  # noqa: F401
from .dists import (  # noqa: F401
    ExactDist,
    SourceDescriptor,
    condition,
    duality_gap,
    hq,
    min_entropy,
    pushforward,
    shannon_entropy,
    statistical_distance,
)
from .expander import LabeledGraph, complete_selfloop, cycle, margulis, second_eigenvalue  # noqa: F401
from .sfext import RoundedSfextParams, SfextParams, mod_invert, walk_rate  # noqa: F401
from .linext import LinearSeededExtractor, lse_extract, lse_invert, random_family, toeplitz_family  # noqa: F401
from .affext import InvertibleAffineExtractor, affine_error, quadratic_bank, shaltiel_check  # noqa: F401
from .wiretap import (  # noqa: F401
    WiretapProtocol,
    aont_error,
    decode,
    encode,
    equivocation,
    from_invertible_extractor,
    one_time_pad,
    verify_resilience,
)
