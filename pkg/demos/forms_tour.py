"""A short walk through the exterior-algebra layer.

Builds the Euclidean Kaehler form on C^2, checks that its top power has
unit density, and compares the Hodge star of a covector with the closed
formula for primitive forms.
"""

import numpy as np

from growthlab.forms import (
    HermitianForm,
    dz,
    dzbar,
    hodge_star,
    power_over_factorial,
    top_density,
    trace_lambda,
    wedge,
)

beta = HermitianForm(0.5 * np.eye(2), "positive-definite")
omega = beta.as_form()
print("omega on C^2:", omega)
print("density of omega^2/2!:", float(top_density(power_over_factorial(omega, 2))))

# crossed pairs: the sign is easy to get wrong by hand
print("(dz1^dzbar2)^(dz2^dzbar1) =", wedge(wedge(dz(2, 0), dzbar(2, 1)), wedge(dz(2, 1), dzbar(2, 0))))

rng = np.random.default_rng(0)
a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
g = HermitianForm(a @ a.conj().T + 0.5 * np.eye(2))
v = dz(2, 0) * (1 + 2j) + dz(2, 1) * 0.5
star = hodge_star(v, g)
closed = wedge(g.as_form(), v) * (-1j)
print("star(v) agrees with -i g ^ v:", star.allclose(closed, atol=1e-12))
print("trace of g against itself:", trace_lambda(g.as_form(), g).real)
