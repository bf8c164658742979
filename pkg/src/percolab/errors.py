"""Exception hierarchy shared by all percolab modules."""


class PercolabError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class ParseError(PercolabError, ValueError):
    pass


class ValidationError(PercolabError, ValueError):
    pass


class SizeError(PercolabError, ValueError):
    """Input outside the size range an operation supports."""


class DegeneratePairError(PercolabError, ValueError):
    pass


class ContainmentError(PercolabError, ValueError):
    pass


class PreconditionError(PercolabError, ValueError):
    pass


class NotActivatedError(PercolabError):
    """The requested edge is not in the closure."""


class CertificateError(PercolabError):
    """A supplied density bound or certificate is inconsistent."""


class NoCertificateError(PercolabError):
    pass


class ConstructionError(PercolabError):
    pass
