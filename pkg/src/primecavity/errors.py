"""Package exceptions."""


class ConfigurationError(Exception):
    """A run was configured inconsistently (bad model name, step size, guard trip)."""


class PropagationError(RuntimeError):
    """The integrator violated its accuracy contract (norm drift past tolerance)."""
