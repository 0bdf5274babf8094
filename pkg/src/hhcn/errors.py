"""Exception hierarchy.

``InputError`` subclasses flag invalid arguments or input files;
``ComputationError`` subclasses flag well-formed inputs for which the
requested quantity does not exist.  The CLI maps the two families onto
exit codes 2 and 3.
"""


class HHCNError(Exception):
    pass


class InputError(HHCNError, ValueError):
    pass


class ComputationError(HHCNError):
    pass


class DepthOutOfRange(InputError):
    pass


class CountExceedsLevel(InputError):
    pass


class KraftViolated(InputError):
    pass


class IdMismatch(InputError):
    pass


class ConfigTooShort(InputError):
    pass


class NodeAtBaseStation(InputError):
    pass


class RootNotInGraph(InputError):
    pass


class Disconnected(ComputationError):
    pass


class Infeasible(ComputationError):
    pass


class Unreachable(ComputationError):
    pass


class NoAgreement(ComputationError):
    pass


class InconsistentInputs(ComputationError):
    pass
