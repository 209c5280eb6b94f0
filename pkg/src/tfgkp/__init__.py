"""Time-frequency GKP codes for n single photons."""

__version__ = "0.1.0"
