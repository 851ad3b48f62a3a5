"""Co-design toolkit for a planar wheg hexapod: morphology + gait optimization."""

__version__ = "0.1.0"
