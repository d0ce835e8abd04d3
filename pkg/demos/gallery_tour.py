"""The model gallery: five holomorphic maps and their pullback metrics.

For each model, print the metric at the origin and at a sample point,
then show that the three ways of computing the SL(2,C) pullback agree.
"""

import numpy as np

from growthlab.gallery import (
    GALLERY,
    HolomorphicMapSpec,
    gallery,
    maurer_cartan_pullback,
    numeric_jacobian,
    pullback_metric,
)

z = np.array([0.7 + 0.2j, -0.4 + 1.1j])
for name in GALLERY:
    model = gallery(name)
    point = np.resize(z, model.domain_dim)
    print(f"{name:13s} domain C^{model.domain_dim}  h(0) diag = "
          f"{np.real(np.diag(model.metric_at(np.zeros(model.domain_dim)).matrix)).round(4)}"
          f"  h(z) diag = {np.real(np.diag(model.metric_at(point).matrix)).round(4)}")

model = gallery("sl2c")
closed = model.metric_matrix(z)
mc = maurer_cartan_pullback(z).matrix
spec = HolomorphicMapSpec(2, model.holomorphic_map.evaluate, mode="finite-difference")
fd = pullback_metric(numeric_jacobian(spec, z), model.ambient_metric(model.holomorphic_map.evaluate(z))).matrix
print("sl2c: closed form vs Maurer-Cartan", np.abs(closed - mc).max())
print("sl2c: closed form vs finite differences", np.abs(closed - fd).max())
