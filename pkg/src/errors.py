"""
Exception hierarchy for the lab
Every failure raised by the library derives from LabError
"""

from typing import Optional


class LabError(Exception):
    """Base class for all lab failures"""


class InvalidSignalError(LabError):
    """Signal vector has the wrong length or non-binary entries"""


class InvalidArgumentError(LabError):
    """Argument outside the operation's domain"""


class UnboundedRegionError(LabError):
    """Half-plane system does not bound a polygon"""


class NotDecomposableError(LabError):
    """Central channel that the factor decomposition does not split"""


class InfeasibleSchemeError(LabError):
    """Scheme parameters violate the kind's shape constraints"""

    def __init__(self, message: str, inequality: Optional[str] = None):
        super().__init__(message)
        self.inequality = inequality


class InvalidTargetError(LabError):
    """Requested rate pair is not a vertex of the capacity region"""


class UnsupportedPlanError(LabError):
    """No verified construction reaches the requested vertex"""


class ProtocolViolationError(LabError):
    """A node emitted a malformed or non-causal transmission"""

    def __init__(self, message: str, node: Optional[str] = None, slot: Optional[int] = None):
        super().__init__(message)
        self.node = node
        self.slot = slot


class PlanMismatchError(LabError):
    """Plan factors do not match the channel decomposition"""
