class NumericalError(RuntimeError):
    """A numerical routine failed or produced a result that violates its contract."""
