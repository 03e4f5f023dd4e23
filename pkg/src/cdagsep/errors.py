"""Exception types shared by every module of the package."""


class InputError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class EnumerationLimitError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its bound."""

    def __init__(self, count, bound):
        self.count = count
        self.bound = bound
        super().__init__(f"enumeration needs {count} items, bound is {bound}")


class CdagParseError(InputError):
    """Raised by :func:`cdagsep.cdag_io.parse_cdag` with all collected diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(f"line {ln}: {msg}" for ln, msg in self.diagnostics)
        super().__init__(lines or "parse failed")
