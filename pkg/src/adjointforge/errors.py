"""Exception hierarchy shared by every module."""


class AdjointForgeError(Exception):
    """Base class for all library errors."""


class LatticeError(AdjointForgeError, ValueError):
    pass


class NotALattice(LatticeError):
    pass


class NotGraded(LatticeError):
    pass


class NoBounds(LatticeError):
    pass


class RankTooSmall(LatticeError):
    pass


class RankTooLarge(LatticeError):
    pass


class BadRank(LatticeError):
    pass


class NBBError(AdjointForgeError, ValueError):
    pass


class EmptySet(NBBError):
    pass


class NotIndependent(NBBError):
    pass


class NotDownwardClosed(NBBError):
    pass


class RankMismatch(NBBError):
    pass


class NotGeometricTarget(NBBError):
    pass


class NotABijection(NBBError):
    pass


class NotABasis(AdjointForgeError, ValueError):
    pass


class AtomInBasis(NBBError):
    pass


class NotCoatomic(NBBError):
    pass


class SearchTooLarge(NBBError):
    """Raised when a factorial search is refused without an explicit override."""


class MatroidError(AdjointForgeError, ValueError):
    pass


class ExchangeAxiomViolated(MatroidError):
    pass


class EmptyFamily(MatroidError):
    pass


class UnequalSizes(MatroidError):
    pass


class ElementInBasis(MatroidError):
    pass


class NotACircuit(MatroidError):
    pass


class NoCircuits(MatroidError):
    pass


class GroundSetMismatch(MatroidError):
    pass


class UnknownName(MatroidError, KeyError):
    pass


class CircuitIsFundamental(AdjointForgeError, ValueError):
    pass


class NotModular(AdjointForgeError, ValueError):
    pass


class RouteDisagreement(AdjointForgeError, RuntimeError):
    """Independent adjoint characterisations returned different answers."""


class EmptySetDependent(AdjointForgeError, ValueError):
    pass


class NotProper(AdjointForgeError, ValueError):
    pass


class FileFormatError(AdjointForgeError, ValueError):
    pass


class ExpectationMismatch(AdjointForgeError):
    def __init__(self, name, diff):
        super().__init__(f"{name}: {diff}")
        self.name = name
        self.diff = diff
