"""
Dimension towers and units
==========================

Dimensions d with (d+1)(d-3) = m^2 D0 share the real quadratic field
Q(sqrt D0).  With u0 the fundamental unit of positive norm they are
d_k = 1 + u0^k + conj(u0)^k.
"""

from siccat.number_theory import (
    classify_dimension,
    dimension_sequence,
    fundamental_unit,
    negative_norm_dimension,
    positive_norm_unit,
)

for D0 in (5, 2, 13, 10):
    eta, norm = fundamental_unit(D0)
    print(f"D0={D0:>2}  eta0={eta}  norm {norm:+d}  u0={positive_norm_unit(D0)}  d: {dimension_sequence(D0, 5)}")

# %%
# d = n^2 + 3 always comes with the norm -1 unit (n + sqrt(n^2+4))/2
for n in range(1, 8):
    d, eta = negative_norm_dimension(n)
    print(n, d, eta, eta.norm())

# %%
# and its odd prime factors other than 3 are all 1 mod 3
for n in (6, 11, 15, 20):
    print(classify_dimension(n).factor_string())
