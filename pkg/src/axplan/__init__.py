"""Bounded-horizon planning with axioms via answer-set and integer programs."""

__version__ = "0.1.0"
