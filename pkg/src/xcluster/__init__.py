"""Exact arithmetic for seed mutations, amalgamation and matrix-group evaluation.

The package is organised bottom-up:

* ``ratfun``      -- exact multivariate rational functions (the coordinate ring)
* ``seeds``       -- seeds (exchange matrices with multipliers and frozen set)
* ``torus``       -- coordinate tori, mutation maps, composition, Poisson checks
* ``amalgam``     -- gluing seeds along frozen vertices, defrosting
* ``rootdata``    -- root data, decorated words, word seeds, Weyl/Hecke helpers
* ``groups``      -- evaluation into matrix groups, projective comparison,
                     classical r-matrix brackets
* ``folding``     -- foldings of root data and seeds, lifted mutation sequences
* ``explorer``    -- exchange-graph exploration, glued complexes, fundamental
                     groups, braid-relation checks
* ``confspaces``  -- cross-ratio coordinates on configuration spaces of points
                     and flags
* ``cli``         -- command-line interface
"""

__version__ = "0.1.0"
