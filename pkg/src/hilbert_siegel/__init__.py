"""Algebraic modular forms for GSp4 over Q(sqrt 5) at Siegel-type level,
computed through the icosian order of the definite quaternion algebra (-1,-1)."""

__version__ = "0.1.0"
