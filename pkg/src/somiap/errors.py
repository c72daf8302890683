"""Exception hierarchy shared by every stage."""


class SomiapError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(SomiapError):
    """An image stream could not be decoded."""


class ContractError(SomiapError, ValueError):
    """A precondition of an operation was violated."""


class BoundsError(ContractError):
    """A rectangle or window falls outside its image."""


class ShapeError(ContractError):
    pass


class SingularityError(SomiapError, ArithmeticError):
    pass


class ModelParseError(SomiapError):
    """A cascade document is malformed. ``path`` names the offending node."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class UnsupportedModelError(ModelParseError):
    pass


class ConflictError(SomiapError):
    pass


class ManifestError(SomiapError):
    pass
