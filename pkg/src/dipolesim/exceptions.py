"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the physically meaningful domain."""


class UnsupportedConfigurationError(ValueError):
    """The requested operation is not defined for this configuration."""


class SingularConfigurationError(ValueError):
    """A closed-form expression is singular at these parameters."""


class AmbiguityError(ValueError):
    """Level labels cannot be assigned because the spectrum is degenerate."""


class ConfigError(ValueError):
    """Scenario configuration failed validation.

    Carries the full list of problems, not just the first one found.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class ValidityWarning(UserWarning):
    """An approximate formula was evaluated outside its validity regime."""


class TailMassWarning(UserWarning):
    """A time integral was truncated while non-negligible norm survived."""
