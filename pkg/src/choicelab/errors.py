"""Exception hierarchy shared by all choicelab modules."""


class ChoicelabError(Exception):
    pass


class ValidationError(ChoicelabError, ValueError):
    """Malformed input: bad tiers, unknown labels, sets outside the universe."""


class CapExceeded(ChoicelabError, RuntimeError):
    """An exhaustive enumeration or search would exceed the configured cap."""


class PreconditionError(ChoicelabError, ValueError):
    """An SCF or construction was applied outside its domain."""


class TournamentError(PreconditionError):
    """A tournament-only operation met a majority tie."""

    def __init__(self, pair, message=None):
        self.pair = pair
        super().__init__(message or f"majority tie between {pair[0]} and {pair[1]}")


class InternalInvariantError(ChoicelabError, AssertionError):
    """Something that should be impossible happened; this is a bug."""
