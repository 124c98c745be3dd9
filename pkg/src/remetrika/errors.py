class RemetrikaError(Exception):
    pass


class InstanceError(RemetrikaError, ValueError):
    """Malformed or invalid instance document; ``path`` locates the fault."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class ResourceError(RemetrikaError):
    pass


class GateError(RemetrikaError):
    """The family does not have an attractor (or another mathematical gate failed)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PreconditionError(RemetrikaError, ValueError):
    pass


class VerificationError(RemetrikaError):
    """A property that the construction guarantees did not hold."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class ConditionError(GateError, PreconditionError):
    """A mathematical hypothesis of a construction fails on this input."""
