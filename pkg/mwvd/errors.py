"""Exception hierarchy; every error names the pipeline stage that raised it"""


class MWVDError(Exception):
    """Base class for all library errors"""
    stage = "mwvd"


class DegenerateSitePairError(MWVDError, ValueError):
    stage = "geometry"

    def __init__(self, message: str = "degenerate site pair"):
        super().__init__(message)


class AmbiguousCandidateSetError(MWVDError):
    stage = "candidates"

    def __init__(self, message: str = "ambiguous candidate set at boundary point"):
        super().__init__(message)


class DegeneracyError(MWVDError):
    """Input is not in general position; the message names the sites involved"""
    stage = "overlay"

    def __init__(self, message: str, sites: tuple[int, ...] = ()):
        self.sites = tuple(sites)
        detail = f" (sites {', '.join(map(str, self.sites))})" if self.sites else ""
        super().__init__(f"{message}{detail}; jitter the site locations and retry")


class BoundaryQueryError(MWVDError):
    stage = "query"

    def __init__(self, message: str = "boundary query"):
        super().__init__(message)


class OutsideWorldBoxError(BoundaryQueryError):
    def __init__(self, message: str = "query point outside the world box"):
        super().__init__(message)


class TripleIntersectionError(MWVDError):
    stage = "envelope"

    def __init__(self, message: str = "three functions meet at one point"):
        super().__init__(f"{message}; jitter the functions and retry")


class ModelSpecError(MWVDError, ValueError):
    stage = "models"


class ExperimentConfigError(MWVDError, ValueError):
    stage = "experiment"


class ReportError(MWVDError):
    stage = "report"
