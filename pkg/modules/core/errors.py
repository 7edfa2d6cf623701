"""
This module holds every exception the toolkit raises, grouped by the stage of the pipeline that raises it.

All errors derive from RbsKitError, which carries the process exit code the CLI should return.
Domain errors exit with 2, validity-guard failures with 3.

Classes:
    RbsKitError
    ArrayError, ModulationError, LinearSystemError, RwaError
    OperatingPointError, CompositionError, FeasibilityError
    PerturbationError, OracleError, DeviceFileError
"""


class RbsKitError(Exception):
    exit_code = 2


#################################################################### Resonator Arrays ###########################################################################


class ArrayError(RbsKitError):
    pass


class DisconnectedGraph(ArrayError):
    pass


class DuplicateEdge(ArrayError):
    pass


class SelfLoop(DuplicateEdge):
    pass


class IndexOutOfRange(ArrayError):
    pass


class NegativeRate(ArrayError):
    pass


class DuplicateWaveguide(ArrayError):
    pass


class InvalidSide(ArrayError):
    pass


#################################################################### Modulation ###########################################################################


class ModulationError(RbsKitError):
    pass


class LengthMismatch(ModulationError):
    pass


class InvalidSign(ModulationError):
    pass


class InvalidTone(ModulationError):
    pass


class EmptyDrive(ModulationError):
    pass


class OddSideForbidden(ModulationError):
    pass


class EmptyPattern(ModulationError):
    pass


#################################################################### Linear Systems ###########################################################################


class LinearSystemError(RbsKitError):
    pass


class DimensionMismatch(LinearSystemError):
    pass


class NonUnitaryScattering(LinearSystemError):
    pass


class NonHermitianOmega(LinearSystemError):
    pass


class SingularResolvent(LinearSystemError):
    pass


class TimeDependentA(LinearSystemError):
    pass


#################################################################### RWA Engine ###########################################################################


class RwaError(RbsKitError):
    pass


class UnresolvedModes(RwaError):
    pass


class NoResonantTone(RwaError):
    pass


class NonResonantInput(RwaError):
    pass


class ValidityViolation(RwaError):
    exit_code = 3


class SingularAeff(SingularResolvent):
    pass


class UnknownDevice(RwaError):
    pass


class UnsupportedPhase(RwaError):
    pass


class OverlappingPairs(RwaError):
    pass


class PassivityViolation(RwaError):
    pass


#################################################################### Operating Points & Composition ###########################################################################


class OperatingPointError(RbsKitError):
    pass


class RatioUnreachable(OperatingPointError):
    pass


class RegimeViolation(OperatingPointError):
    pass


class CompositionError(RbsKitError):
    pass


class PortMismatch(CompositionError):
    pass


class NotAtGCC(CompositionError):
    pass


class NotAt5050(CompositionError):
    pass


#################################################################### Analysis ###########################################################################


class FeasibilityError(RbsKitError):
    pass


class SearchLimitExceeded(FeasibilityError):
    # Carries the verdict reached from the necessary conditions alone
    def __init__(self, message, necessary_ok=None):
        super().__init__(message)
        self.necessary_ok = necessary_ok


class NoConvergence(FeasibilityError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class PerturbationError(RbsKitError):
    pass


class DegenerateSpectrum(PerturbationError):
    pass


class UnknownEdge(PerturbationError):
    pass


class OracleError(RbsKitError):
    pass


class StepFailure(OracleError):
    pass


class InsufficientWindow(OracleError):
    pass


class InsufficientDuration(OracleError):
    pass


#################################################################### Device Files ###########################################################################


class DeviceFileError(RbsKitError):
    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line
