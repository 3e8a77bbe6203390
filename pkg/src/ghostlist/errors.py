class GhostlistError(Exception):
    pass


class ParamError(GhostlistError, ValueError):
    pass


class GraphFormatError(GhostlistError, ValueError):
    pass


class TraceFormatError(GhostlistError, ValueError):
    pass


class ExperimentError(GhostlistError):
    pass


# %% Oracle errors


class OracleError(GhostlistError):
    pass


class NotFound(OracleError, LookupError):
    pass


class SelfQuery(OracleError, ValueError):
    pass


class AccessDenied(OracleError, PermissionError):
    pass


class RateLimited(OracleError):
    pass
