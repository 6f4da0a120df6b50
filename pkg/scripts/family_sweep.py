"""Sweep M6(e^{it}) over t and record the Gram residual, the distance to the
displayed D6 limit (both index alignments) and the size of the Lambda-set.

Output is CSV on stdout, for plotting elsewhere.
"""

import argparse
import math

import numpy as np

from hadamard_lab.catalogue import SingularParameter, dita_d6, m6_family
from hadamard_lab.core import gram_residual
from hadamard_lab.equivalence import lambda_set

ap = argparse.ArgumentParser()
ap.add_argument("-n", type=int, default=360)
args = ap.parse_args()

d6 = dita_d6().entries
swap = [0, 1, 2, 3, 5, 4]
print("t,gram_residual,dist_d6,dist_d6_swapped,lambda_size")
for t in np.linspace(0, 2 * math.pi, args.n, endpoint=False):
    try:
        H = m6_family(t)
    except SingularParameter:
        continue
    h = H.entries
    direct = np.max(np.abs(h - d6))
    swapped = np.max(np.abs(h[np.ix_(swap, swap)] - d6))
    print(f"{t:.6f},{gram_residual(H):.3e},{direct:.6f},{swapped:.6f},{len(lambda_set(H))}")
