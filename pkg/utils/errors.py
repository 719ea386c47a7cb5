from typing import Optional


class DynamicsError(Exception):
    """Base class for every error raised by the toolkit"""


class InputError(DynamicsError, ValueError):
    """Invalid arguments: bad rationals, non-primes, unmet preconditions"""


class ConfigError(InputError):
    """Invalid value in the environment or .env file"""


class NotPeriodicError(DynamicsError):
    """A point assumed periodic turned out not to be"""


class IncompletenessError(DynamicsError):
    """A computation could not be finished within its configured budget"""


class IncompleteFactorizationError(IncompletenessError):
    def __init__(self, n: int, cofactor: int, message: Optional[str] = None):
        self.n = n
        self.cofactor = cofactor
        super().__init__(
            message or f"factorization of {n} is incomplete, unfactored cofactor {cofactor}"
        )


class SizeGuardError(IncompletenessError):
    def __init__(self, slots: int, allowed: int):
        self.slots = slots
        self.allowed = allowed
        super().__init__(
            f"computation needs {slots} coefficient slots, the size guard allows {allowed}"
        )


class BudgetExceededError(IncompletenessError):
    def __init__(self, estimate: int, cap: int, what: str = "census"):
        self.estimate = estimate
        self.cap = cap
        super().__init__(f"{what} volume estimate {estimate} exceeds the cap {cap}")
