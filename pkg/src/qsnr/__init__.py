"""Signal-to-noise bounds for quantum detectors from state fidelity."""

__version__ = "0.1.0"
