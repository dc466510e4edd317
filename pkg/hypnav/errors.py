"""
Exception hierarchy for hypnav

Library code raises the most specific subclass; the command line layer
catches HypNavError and turns it into an exit code.
"""


class HypNavError(Exception):
    pass


class GeometryError(HypNavError):
    pass


class AutodiffError(HypNavError):
    pass


class OptimizerError(HypNavError):
    pass


class SimulationError(HypNavError):
    pass


class ConfigError(HypNavError):
    pass


class CheckpointError(HypNavError):
    pass


class TrainingError(HypNavError):
    pass


class AnalysisError(HypNavError):
    pass
