"""Exception hierarchy shared by all modules.

The CLI maps the three families to exit codes: ``InputError`` -> 2,
``BudgetExceeded`` -> 3, ``InvariantViolation`` -> 4.
"""


class HoigError(Exception):
    pass


class InputError(HoigError):
    pass


class BudgetExceeded(HoigError):
    pass


class InvariantViolation(HoigError):
    pass


class HoigSyntaxError(InputError):
    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class ValidationError(InputError):
    pass


class UnboundSymbol(InputError):
    pass


class KindMismatch(InputError):
    pass


class NotClosedReplacement(InputError):
    pass


class UnknownLetter(InputError):
    pass


class UniverseMismatch(InputError):
    pass


class PartialAtomMap(InputError):
    pass


class NotARedex(InputError):
    pass


class BadRuleIndex(InputError):
    pass


class DomainTooLarge(BudgetExceeded):
    def __init__(self, cap, predicted, kind=None):
        what = f" for kind {kind}" if kind is not None else ""
        super().__init__(f"domain enumeration{what} exceeds cap {cap} (at least {predicted} elements)")
        self.cap = cap
        self.predicted = predicted


class IterationBudgetExceeded(BudgetExceeded):
    def __init__(self, max_iters):
        super().__init__(f"fixpoint not reached within {max_iters} iterations")
        self.max_iters = max_iters


class TransferMismatch(InvariantViolation):
    def __init__(self, nonterminal, witness):
        super().__init__(f"abstraction of abstract solution differs from optimized solution at {nonterminal} (argument {witness})")
        self.nonterminal = nonterminal
        self.witness = witness


class NoSatisfyingChoice(InvariantViolation):
    pass


class StrategyRefuted(InvariantViolation):
    def __init__(self, trace):
        super().__init__("strategy produced a rejected word: " + " ; ".join(trace))
        self.trace = trace
