"""Exact computations on invariant forms of SL(2,C), the Iwasawa group and a torus.

Prints the structure equations, looks for a potential of omega^2, and
reports invariant Bott-Chern and Aeppli dimensions in bidegree (1,1).
"""

import json

from growthlab import lie

for name, n in (("sl2c", None), ("heisenberg", None), ("abelian", 3)):
    cx = lie.build_complex(lie.lie_algebra(name, n))
    omega = lie.reference_metric(cx.n)
    print(f"== {name}")
    witness = lie.degenerate_balanced_witness(cx, omega)
    if witness.certified:
        terms = witness.to_json()["witness"]["Gamma"]
        print(f"omega^2 = d Gamma, Gamma has {len(terms)} exact terms, e.g. {json.dumps(terms[0])}")
        print("residual is exactly zero:", witness.residual.is_zero())
    else:
        print("no invariant potential for omega^2:", witness.reason)
    dims = lie.cohomology_dims(cx, 1, 1)
    print(f"invariant h^(1,1): Bott-Chern {dims.bc}, Aeppli {dims.aeppli}")
    print("Gauduchon certificate for omega^2:", lie.certify_gauduchon(cx, lie.form_power(omega, 2)).certified)
