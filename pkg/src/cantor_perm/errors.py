"""Exception taxonomy shared by the library and the CLI exit codes."""


class CantorPermError(Exception):
    exit_code = 1


class ArgumentError(CantorPermError, ValueError):
    """Malformed input: wrong shapes, mismatched codomains, non-surjections."""

    exit_code = 1


class CapacityError(CantorPermError):
    """An enumeration would exceed its bit budget."""

    exit_code = 2

    def __init__(self, what: str, needed: int, budget: int):
        self.what = what
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what}: needs {needed} bits, budget is {budget} bits "
                         f"(raise with CANTOR_PERM_BUDGET_BITS)")


class IntegrityError(CantorPermError):
    """A computed result contradicts a proven mathematical fact.

    Reaching one of these means a bug, not bad input.
    """

    exit_code = 3
