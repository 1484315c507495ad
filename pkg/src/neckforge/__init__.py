"""neckforge: numerics for conformal half-Laplacian symbols on cylinder boundaries.

Module map:

* ``specfun``   -- complex log-Gamma plumbing.
* ``symbol``    -- cylinder Fourier symbol Theta_m and the curvature constants.
* ``indicial``  -- indicial roots with argument-principle certification.
* ``modegreen`` -- per-mode linearized operator and Green solves on the line.
* ``extension`` -- bulk extension problem; independent Dirichlet-to-Neumann path.
* ``neck``      -- glued approximate metric, weights, curvature-error sweeps.
* ``solver``    -- nonlinear boundary-curvature solver on a periodic cylinder.
* ``cli``       -- the ``neckforge`` command line front end.
"""

__version__ = "0.1.0"

from . import errors  # noqa: F401
