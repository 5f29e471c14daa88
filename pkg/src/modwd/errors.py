"""Exception hierarchy shared by every module of the package."""


class ModwdError(Exception):
    """Base class for all errors raised by :mod:`modwd`."""


# signal I/O
class WavError(ModwdError):
    pass


class MalformedHeader(WavError):
    pass


class UnsupportedFormat(WavError):
    pass


class EmptyAudio(WavError):
    pass


class AllSamplesClipped(WavError):
    pass


class SilentInput(ModwdError):
    pass


# framing / transforms
class SignalTooShort(ModwdError):
    pass


class DimensionMismatch(ModwdError):
    pass


class SequenceTooShort(ModwdError):
    pass


class InconsistentPair(ModwdError):
    pass


# enhancement
class TooFewFrames(ModwdError):
    pass


class ConfigError(ModwdError):
    """Invalid parameter, token or run configuration."""


# metrics
class LengthMismatch(ModwdError):
    pass


class AllFramesSilent(ModwdError):
    pass


class ProcessFailure(ModwdError):
    pass


class ParseFailure(ModwdError):
    pass


# approximation payload
class PayloadError(ModwdError):
    pass


class VersionError(PayloadError):
    """Payload header does not describe a layout this reader understands."""
