"""Blaschke-Potapov factorization and coprimeness of rational matrix functions."""

from .blaschke import (BPFactor, BPProduct, FiniteBlaschkeProduct, blaschke_factor, bp_eval,
                       bp_inverse_samples, canonicalize, expand)
from .errors import (CertificationFailure, CoprimeCheckFailed, DivisionResidual, NegativeVerdict, NotADivisor,
                     NotAnalytic, NotInner, NotRational, NotShiftInvariant, PotapovError, TrivialGcd,
                     TruncationTooSmall, VerdictMismatch)
from .funcspace import (GridSamples, MatPoly, RationalMatFn, analytic_part_certify, compose_blaschke, evaluate,
                        from_grid, is_inner, is_two_sided_inner, multiply, sup_distance, tilde, to_grid)
from .numerics import DEFAULT_TOL, Tolerance
from .divisors_zn import ZnDivisorCertificate, classify_b_alpha_n, classify_zn, nontriviality_witness
from .factorize import PeelTrace, coprime_factorize, inner_rational_to_bp, peel_step, potapov_peel

__version__ = "0.1.0"
