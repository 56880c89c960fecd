"""sepsim: deterministic simulation and verification of stage-by-stage
priority constructions over separating classes."""

__version__ = "0.1.0"
