"""Values computed once with sympy (an independent CAS) and frozen here.

Regenerate with ``python3 tests/make_oracles.py``."""

TOEPLITZ_DET_2 = "-x1*x3 + x2^2"

TOEPLITZ_DET_3 = "-x1*x3*x5 + x1*x4^2 + x2^2*x5 - 2*x2*x3*x4 + x3^3"

TOEPLITZ_DET_4 = "x1*x3*x5*x7 - x1*x3*x6^2 - x1*x4^2*x7 + 2*x1*x4*x5*x6 - x1*x5^3 - x2^2*x5*x7 + x2^2*x6^2 + 2*x2*x3*x4*x7 - 2*x2*x3*x5*x6 - 2*x2*x4^2*x6 + 2*x2*x4*x5^2 - x3^3*x7 + 2*x3^2*x4*x6 + x3^2*x5^2 - 3*x3*x4^2*x5 + x4^4"

TOEPLITZ_DET_5 = "x1*x3*x5*x7*x9 - x1*x3*x5*x8^2 - x1*x3*x6^2*x9 + 2*x1*x3*x6*x7*x8 - x1*x3*x7^3 - x1*x4^2*x7*x9 + x1*x4^2*x8^2 + 2*x1*x4*x5*x6*x9 - 2*x1*x4*x5*x7*x8 - 2*x1*x4*x6^2*x8 + 2*x1*x4*x6*x7^2 - x1*x5^3*x9 + 2*x1*x5^2*x6*x8 + x1*x5^2*x7^2 - 3*x1*x5*x6^2*x7 + x1*x6^4 - x2^2*x5*x7*x9 + x2^2*x5*x8^2 + x2^2*x6^2*x9 - 2*x2^2*x6*x7*x8 + x2^2*x7^3 + 2*x2*x3*x4*x7*x9 - 2*x2*x3*x4*x8^2 - 2*x2*x3*x5*x6*x9 + 2*x2*x3*x5*x7*x8 + 2*x2*x3*x6^2*x8 - 2*x2*x3*x6*x7^2 - 2*x2*x4^2*x6*x9 + 2*x2*x4^2*x7*x8 + 2*x2*x4*x5^2*x9 - 4*x2*x4*x5*x7^2 + 2*x2*x4*x6^2*x7 - 2*x2*x5^3*x8 + 4*x2*x5^2*x6*x7 - 2*x2*x5*x6^3 - x3^3*x7*x9 + x3^3*x8^2 + 2*x3^2*x4*x6*x9 - 2*x3^2*x4*x7*x8 + x3^2*x5^2*x9 - 4*x3^2*x5*x6*x8 + 2*x3^2*x5*x7^2 + x3^2*x6^2*x7 - 3*x3*x4^2*x5*x9 + 2*x3*x4^2*x6*x8 + x3*x4^2*x7^2 + 4*x3*x4*x5^2*x8 - 2*x3*x4*x5*x6*x7 - 2*x3*x4*x6^3 - 3*x3*x5^3*x7 + 3*x3*x5^2*x6^2 + x4^4*x9 - 2*x4^3*x5*x8 - 2*x4^3*x6*x7 + 3*x4^2*x5^2*x7 + 3*x4^2*x5*x6^2 - 4*x4*x5^3*x6 + x5^5"

MOTZKIN_LEAF_EXPANDED = "x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2*x3^2 + x3^6"

PVMINOR_4_C23_I2 = "-x1^3*x3 + x1^3*x4 - x1^2*x3 + x1^2*x4 + x1*x3^3 + x1*x3^2 - x1*x4^3 - x1*x4^2 - x3^3*x4 - x3^2*x4 + x3*x4^3 + x3*x4^2"
