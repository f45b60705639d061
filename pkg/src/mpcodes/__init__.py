"""Zero-error distributed compression of deviation-symmetric sources.

Linear fixed-length codes over finite fields for jointly correlated
sources whose joint-sequence set is closed under uniform shifts: encoders
are per-terminal matrices, decoding is joint and exactly lossless, and the
whole design space reduces to choosing one parent matrix.
"""

from .errors import MPCError
from .field import Field, make_field
from .linalg import (
    FMatrix,
    complete_to_invertible,
    express_rows,
    hstack,
    inverse,
    left_annihilator,
    nullspace_basis,
    rank,
    row_basis,
    rref,
    solve,
    surjective_with_nullspace,
    vstack,
)
from .source import (
    Source,
    all_vectors,
    generalized_hamming_source,
    hamming_source,
    make_source,
)
from .parent import (
    CosetDecomposition,
    ParentMatrix,
    build_parent_thm7,
    coset_decompose,
    hamming_parent_check,
    min_r,
    projective_points,
    s2_parent,
    validate_parent,
    zero_sum_repair,
)
from .code import (
    PartitionCode,
    Witness,
    construct_mpc,
    construct_pre_mpc,
    is_perfect,
    min_total_length,
    ratio_report,
    verify_compression,
)
from .codec import (
    Decoder,
    build_decoder,
    encode,
    encode_batch,
    oracle_decode,
    roundtrip_report,
)
from .analysis import (
    SubspaceBasis,
    brute_min_m,
    brute_optimal_tuple,
    compressible,
    compressible_witness,
    enumerate_subspaces,
    extract_parent,
    nullspace_shift,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
