"""Error taxonomy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to:
1 config, 2 capacity, 3 numerical validity, 4 I/O.
"""


class SimulationError(Exception):
    exit_code = 1


class ConfigError(SimulationError):
    """Bad parameter or violated precondition."""

    exit_code = 1


class CapacityError(SimulationError):
    """Requested problem size exceeds a configured memory cap."""

    exit_code = 2


class ValidityError(SimulationError):
    """Numerical output failed a physicality check."""

    exit_code = 3


class ImpossibleOutcomeError(ValidityError):
    """Measurement outcome with vanishing probability."""

    exit_code = 3


class OutputError(SimulationError):
    """Could not write results."""

    exit_code = 4
