"""Exception types shared across the engine.

Every error raised on a user-facing path derives from FlexdlError so CLI
entry points can catch one type and exit cleanly.
"""


class FlexdlError(Exception):
    pass


class ParseError(FlexdlError):
    """Malformed program text or data file. Carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class ArityMismatchError(FlexdlError):
    """A relation is used with two different arities (or against its .decl)."""


class UnsafeRuleError(FlexdlError):
    """A head variable does not occur in the rule body (range restriction)."""


class EdbInHeadError(FlexdlError):
    """A relation declared .edb appears in a rule head."""


class InvalidCombinationError(FlexdlError):
    """Access type and data structure cannot be combined."""


class PrefixProbeUnsupportedError(FlexdlError):
    """Hash tables answer full-key probes only."""


class AppendAfterFinishError(FlexdlError):
    """Append-sequence protocol violation.

    Sequences may restart after finished_append, so no public call order
    triggers this; it is reserved for internal protocol misuse.
    """


class MissingRepresentationError(FlexdlError):
    """A rule occurrence has no representation to probe or iterate."""


class KeyMismatchError(FlexdlError):
    """No representation key covers the bound attributes of an occurrence."""


class IoError(FlexdlError):
    """A data or program file could not be read or written."""


class MissingFactsError(FlexdlError):
    """An EDB relation has no facts file."""


class CounterMismatchError(FlexdlError):
    """Benchmark repetitions disagreed on operation counters (nondeterminism)."""
