"""Exception hierarchy shared by every deplen module."""


class DeplenError(Exception):
    """Base class for all errors raised by deplen."""


class ConlluParseError(DeplenError, ValueError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class StructuralError(DeplenError, ValueError):
    """A HEAD value points outside the sentence."""


class TreeRejection(DeplenError):
    """The dependency graph of a sentence is not a tree."""

    def __init__(self, reason, sentence_id=None):
        self.reason = reason
        self.sentence_id = sentence_id
        where = f" ({sentence_id})" if sentence_id is not None else ""
        super().__init__(f"not a tree{where}: {reason}")


class DomainError(DeplenError, ValueError):
    pass


class NoDataError(DeplenError, ValueError):
    pass


class SizeError(DeplenError, ValueError):
    pass


class AssumptionError(DeplenError, ValueError):
    """A closed form was requested outside the conditions it was derived under."""


class SpecValidationError(DeplenError, ValueError):
    def __init__(self, problems):
        self.problems = dict(problems)
        detail = "; ".join(f"{k}: {v}" for k, v in self.problems.items())
        super().__init__(f"invalid mixture spec: {detail}")


class ComparisonError(DeplenError, ValueError):
    pass
