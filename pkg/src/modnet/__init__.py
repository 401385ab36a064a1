"""Numerical toolkit for Mobius covariance and standard-subspace nets.

The package is organised around a small tower of layers:

* :mod:`modnet.mobius` -- the Mobius group of the line/circle, its universal
  cover and interval dilation flows.
* :mod:`modnet.spacetime` -- two-dimensional regions in lightray coordinates,
  on Minkowski space and on its cylindrical completion.
* :mod:`modnet.stdspace` -- real standard subspaces of finite-dimensional
  complex Hilbert spaces and their modular theory.
* :mod:`modnet.reps` -- lattice one-particle representations (chiral sums,
  massive fibers, direct integrals) with exactly unitary generator actions.
* :mod:`modnet.bgl` -- wedge subspaces, dual nets, axiom reports and the
  counterexample / reconstruction experiments built on top of the above.
* :mod:`modnet.fock` -- a truncated bosonic Fock layer (Weyl words, vacuum
  functional, second quantisation).
* :mod:`modnet.cli` -- the ``modnet`` command line runner.
"""

__version__ = "0.1.0"

__all__ = [
    "mobius",
    "spacetime",
    "stdspace",
    "reps",
    "bgl",
    "fock",
    "cli",
]
