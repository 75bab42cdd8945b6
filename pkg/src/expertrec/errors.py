"""Exception types shared across the pipeline."""


class ExpertRecError(Exception):
    """Base class for every error raised by this package."""


class MalformedRecordError(ExpertRecError, ValueError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: malformed record: {reason}")


class DuplicateRecordError(ExpertRecError, ValueError):
    def __init__(self, specialist_id: str, line_no: int | None = None):
        self.specialist_id = specialist_id
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"duplicate specialist_id {specialist_id!r}{where}")


class EmptyCorpusError(ExpertRecError, ValueError):
    pass


class ContractError(ExpertRecError, ValueError):
    """A caller violated a documented precondition."""


class ConfigurationError(ExpertRecError, ValueError):
    pass


class TrainingError(ExpertRecError, ArithmeticError):
    pass


class FileFormatError(ExpertRecError, ValueError):
    """A persisted model/index/table file could not be decoded."""


class EmptyQueryError(ExpertRecError, ValueError):
    pass


class FingerprintMismatchError(ExpertRecError, ValueError):
    pass
