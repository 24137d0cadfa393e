"""Numerical laboratory for quadratic-generator BSDEs.

Submodules:

* ``model``     -- coefficient tuples, assumption auditing, built-in catalog
* ``genapprox`` -- the Lipschitz approximation ladder and mollified variant
* ``forward``   -- forward SDE simulation, limit ODE, perturbation gaps
* ``backward``  -- regression Monte Carlo BSDE solver and backward ODE limits
* ``pde``       -- finite-difference solvers for the associated semilinear PDEs
* ``ldp``       -- action-functional rates and rare-event Monte Carlo
* ``cli``       -- experiment runner
"""

from qbsde.errors import ConfigurationError, EvaluationError, QbsdeError

__version__ = "0.1.0"

__all__ = ["ConfigurationError", "EvaluationError", "QbsdeError", "__version__"]
