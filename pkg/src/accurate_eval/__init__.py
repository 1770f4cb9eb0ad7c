"""Accurate evaluation of multivariate polynomials under the ``op*(1+delta)`` rounding model."""

from .accuracy import AccuracyReport, adversarial_search, relative_error, sample_accuracy_report
from .dag import (BlackBoxOp, BranchProgram, Dag, DagBuilder, check_homogeneous_algorithm, eval_exact,
                  eval_rounded, extract_polynomial, symbolic_output)
from .decide import (EVALUABLE, NOT_EVALUABLE, UNKNOWN, Verdict, decide_blackbox_affine, decide_complex,
                     decide_real)
from .dominance import dominance_regions, dominant_term, enumerate_standard_changes, parse_component, prune
from .generators import gen_compensated_sum, gen_monomial_sum, gen_motzkin
from .poly import Polynomial, parse_polynomial
from .structured import (generalized_vandermonde_check, poly_vandermonde_minor_check, schur_function,
                         toeplitz_det)

__version__ = "0.1.0"
