"""Spectra of nonnegative matrices: necessary conditions, digraph tools and realizers."""

from .conditions import (
    ConditionReport,
    Verdict,
    check_boyle_handelman,
    check_frobenius_set,
    check_irreducible_realizability,
    check_kor_integer_realizability,
    check_loewy_london,
    check_odd_case_refinement,
    check_positivity_propagation,
    check_trace_structure,
    check_trace_conditions,
    run_suite,
)
from .errors import FrobspecError
from .matrix_lab import (
    NonnegativeMatrix,
    eigenvalues,
    is_irreducible,
    is_primitive,
    net_trace_exact,
    nonzero_spectrum,
    period,
    power_trace,
)
from .realization import (
    cyclic_block_lift,
    peripheral_period,
    quotient_spectrum,
    realize_irreducible,
    search_primitive_realizer,
    verify_kor_lift,
)
from .spectrum import (
    SpectrumMultiset,
    canonicalize,
    multiset_equal,
    peripheral,
    power_map,
    rotate,
    spectral_radius,
)
from .symmetric import (
    NetTraceSequence,
    PowerSumSequence,
    coefficients_from_power_sums,
    coefficients_from_spectrum,
    is_integer_polynomial,
    mobius,
    net_trace,
    power_sum,
    power_sums_from_coefficients,
)

__version__ = "0.1.0"
