"""Color-GKP code simulator and decoder."""

__version__ = "0.1.0"
