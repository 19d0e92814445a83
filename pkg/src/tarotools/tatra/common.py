from typing import Any, Mapping, Optional


class TatraException(Exception):
    pass


class ConfigFileNotFoundError(TatraException, FileNotFoundError):

    def __init__(self, file, search_path=()):
        self.file = file
        self.search_path = search_path

        if search_path:
            message = f"Config file `{file}` not found in the search path: {', '.join([str(dir_) for dir_ in search_path])}"
        else:
            message = f"Config file `{file}` not found"

        super().__init__(message)


class InadmissibleParametersError(TatraException, ValueError):
    """
    Raised when construction parameters do not describe a valid field, subgroup or Tatra scheme,
    e.g. a non-prime characteristic, `n` not dividing `q - 1` or odd `q(q - 1)/n`.
    """

    def __init__(self, message: str):
        super().__init__(message)


class SizeLimitExceededError(TatraException, ValueError):
    """
    Raised when a configured size guard is exceeded (field order, degree, extension size, search rank...).
    """

    def __init__(self, what: str, size: int, limit: int):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what} {size} exceeds the configured limit {limit}")


class VerificationError(TatraException, AssertionError):
    """
    A structural claim did not hold for a computed object. The `witness` mapping identifies the counterexample
    and is JSON serializable.
    """

    def __init__(self, check: str, message: str, witness: Optional[Mapping[str, Any]] = None):
        self.check = check
        self.witness = dict(witness or {})
        super().__init__(f"[{check}] {message}")

