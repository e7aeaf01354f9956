"""siegel-verify: exact and numerical checks for genus-2 paramodular structures.

The package is organised in layers:

* :mod:`siegel.exact`      -- exact rational/integer linear algebra (HNF, SNF,
  symplectic predicates),
* :mod:`siegel.groups`     -- paramodular groups, membership, coset machinery,
* :mod:`siegel.cusps`      -- isotropic lines/planes and their stabilizer lattices,
* :mod:`siegel.theta`      -- theta constants, the Igusa weight-10 cusp form and
  its symmetrization,
* :mod:`siegel.invariants` -- closed-form invariants and the modular-surface
  intersection calculus,
* :mod:`siegel.voronoi`    -- genus-2 Voronoi cones and basicness tests,
* :mod:`siegel.verify`     -- the self-contained verification report,
* :mod:`siegel.service`    -- FastAPI service exposing all of the above,
* :mod:`siegel.cli`        -- thin command-line client.
"""

__version__ = "0.1.0"
