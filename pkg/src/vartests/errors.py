"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input: bad shapes, out-of-range parameters, unknown names."""


class DegenerateDataError(ValueError):
    """The data admit no statistic (zero spread, 0/0); never silently NaN."""


class KurtosisError(DegenerateDataError):
    """Pooled kurtosis estimate is <= 1, so the Box-Anderson factor is undefined."""
