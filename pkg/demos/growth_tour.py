"""Volume growth on three models.

The torus and the Iwasawa map grow polynomially and satisfy both growth
conditions.  The SL(2,C) map grows exponentially, so its log F has a
positive tail slope and the second condition fails.
"""

import numpy as np

from growthlab.gallery import gallery
from growthlab.growth import (
    build_profile,
    check_condition_i,
    classify_condition_ii,
    hoelder_chain_check,
    verdict,
)
from growthlab.quadrature import QuadratureSpec

runs = [
    ("torus", np.linspace(0.5, 200.0, 40), None),
    ("iwasawa", np.linspace(0.5, 300.0, 48), None),
    ("sl2c", np.linspace(0.5, 12.0, 47), QuadratureSpec(radial_order=96, polar_order=96)),
]
for name, grid, quad in runs:
    profile = build_profile(gallery(name), grid, quad)
    ci, cii = check_condition_i(profile), classify_condition_ii(profile)
    print(f"{name}: vol({grid[-1]:g}) = {profile.vol[-1]:.4g}")
    print(f"  condition (i) {ci.status} (C1 = {ci.C1:.3g}, trend slope {ci.trend_slope:.3f})")
    print(f"  log F tail rate {cii.rate:.3f}: {cii.classification}, condition (ii) {cii.condition}")
    print(f"  Hoelder chain worst margin {hoelder_chain_check(profile).worst_margin:.3e}")
    print(f"  verdict: {verdict(ci, cii)}")
