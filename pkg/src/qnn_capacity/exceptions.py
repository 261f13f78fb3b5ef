"""Exception hierarchy shared by every module of the package."""


class QnnError(Exception):
    """Base class for all errors raised by qnn_capacity."""


# quantum core
class QubitCountOutOfRange(QnnError, ValueError):
    pass


class QubitIndexOutOfRange(QnnError, IndexError):
    pass


class QubitCountMismatch(QnnError, ValueError):
    pass


# encoding / ansatz
class FeatureOutOfRange(QnnError, ValueError):
    pass


class DegenerateBounds(QnnError, ValueError):
    pass


class ParamLengthMismatch(QnnError, ValueError):
    pass


# model persistence
class SchemaVersionUnsupported(QnnError, ValueError):
    pass


class MalformedModelFile(QnnError, ValueError):
    pass


# training
class EmptyDataset(QnnError, ValueError):
    pass


class NonFiniteLoss(QnnError, FloatingPointError):
    pass


# dataset
class MalformedCsv(QnnError, ValueError):
    def __init__(self, line, reason=""):
        self.line = line
        msg = f"malformed CSV at line {line}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class DuplicateCycle(QnnError, ValueError):
    def __init__(self, cycle):
        self.cycle = cycle
        super().__init__(f"duplicate cycle {cycle}")


class NonPositiveCapacity(QnnError, ValueError):
    def __init__(self, line):
        self.line = line
        super().__init__(f"non-positive capacity at line {line}")


class TooFewRecords(QnnError, ValueError):
    pass


class DegenerateSplit(QnnError, ValueError):
    pass


class NonPositiveRated(QnnError, ValueError):
    pass


# metrics
class LengthMismatch(QnnError, ValueError):
    pass


class EmptyInput(QnnError, ValueError):
    pass


class ZeroReference(QnnError, ZeroDivisionError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"reference value at index {index} is zero")
