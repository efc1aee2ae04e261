"""Exception hierarchy shared by all davlab modules."""


class DavlabError(Exception):
    """Base class for every error raised by davlab."""


class ParamOutOfRange(DavlabError, ValueError):
    pass


class InvalidPresentation(DavlabError, ValueError):
    """The triple (m, n, s) does not present a group of order m*n."""


class OrderCapExceeded(DavlabError):
    pass


class StateSpaceCapExceeded(DavlabError):
    """A sub-multiset lattice would exceed the configured number of cells."""


class LengthOutOfRange(DavlabError, ValueError):
    pass


class QuotientNotProductOne(DavlabError, ValueError):
    pass


class EmptySet(DavlabError, ValueError):
    pass


class NonAbelianAmbient(DavlabError, ValueError):
    pass


class HypothesisViolated(DavlabError):
    """Raised by lemma checkers in strict mode when an instance is off-hypothesis."""


class CapExceeded(DavlabError):
    """A search hit its node or state-space budget before finishing."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class CorruptCheckpoint(DavlabError):
    pass


class VersionMismatch(DavlabError):
    pass


class WrongLength(DavlabError, ValueError):
    pass


class NotStarGroup(DavlabError, ValueError):
    pass


class SequenceSyntaxError(DavlabError, ValueError):
    pass


class CacheMismatch(DavlabError):
    pass


class CorruptCache(DavlabError):
    pass
