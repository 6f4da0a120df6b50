"""Print the Lambda-set facts about the discrete matrix M6 and its conjugate:
distances of omega, i, a^2 and conj(a)^2 to each set, and the equivalence
certificate between the two matrices if the search finds one."""

import json

import numpy as np

from hadamard_lab.catalogue import m6_closed_forms, m6_discrete
from hadamard_lab.core import conjugate
from hadamard_lab.equivalence import are_equivalent, lambda_set

a = m6_closed_forms().a
M = m6_discrete()
probes = {"omega": np.exp(2j * np.pi / 3), "i": 1j, "a^2": a**2, "conj(a)^2": np.conj(a) ** 2}

for label, H in (("M6", M), ("conj(M6)", conjugate(M))):
    L = lambda_set(H)
    print(f"{label}: |Lambda| = {len(L)}")
    for name, z in probes.items():
        print(f"  dist({name}) = {L.distance_to(np.angle(z)):.3e} rad")

cert = are_equivalent(M, conjugate(M))
if cert is None:
    print("M6 and conj(M6): no certificate")
else:
    print("M6 ~ conj(M6), error", f"{cert.error(M, conjugate(M)):.1e}")
    print(json.dumps(cert.to_json(), indent=1))
