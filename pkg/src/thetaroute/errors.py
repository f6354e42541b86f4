"""Exception types shared across the package.

Every error that the CLI reports as a domain error derives from
:class:`DomainError`; its class name is what gets printed on stderr.
"""


class DomainError(Exception):
    """Base class for all domain-level failures."""


class DegenerateDirection(DomainError):
    """A direction is parallel to one of the six cone rays."""


class NotInPositiveCone(DomainError):
    pass


class PreconditionViolated(DomainError):
    pass


class InvalidInstance(DomainError):
    pass


class InvalidParams(DomainError):
    pass


class NoCandidateEdge(DomainError):
    """The positive router found nothing to follow (never valid on legal input)."""


class StuckAtAnchor(DomainError):
    """The negative router exhausted both sides without progress."""


class NotVisible(DomainError):
    pass


class Unreachable(DomainError):
    pass
