"""Executable checks for commutative effect monads on finite spaces.

Subpackages: ``core`` (finite sets, measurable and topological spaces),
``monads``, ``kleisli`` (classification of morphisms), ``sobrify``,
``observe``, ``namegen``, ``dsl`` and the ``effects-lab`` command line.
"""

__version__ = "0.1.0"
