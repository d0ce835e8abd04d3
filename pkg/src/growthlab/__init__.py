"""Volume growth of degenerate pullback metrics and exact invariant-form checks.

Subpackages by concern:

* :mod:`growthlab.forms`: pointwise complex exterior algebra, Hodge star,
  Hermitian metrics;
* :mod:`growthlab.gallery`: closed-form pullback metrics of the model maps;
* :mod:`growthlab.quadrature` and :mod:`growthlab.growth`: ball / sphere
  integrals, growth profiles and the growth-condition heuristics;
* :mod:`growthlab.exact` and :mod:`growthlab.lie`: Gaussian-rational linear
  algebra on left-invariant forms;
* :mod:`growthlab.cli`: the ``growthlab`` command.
"""

__version__ = "0.1.0"
