"""Exception types shared across the package (mapped to CLI exit codes)."""


class CertificateError(AssertionError):
    """A hard-asserted identity or inequality was violated.

    This never signals bad input; it means an arithmetic path is wrong.
    """

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        self.detail = detail
        super().__init__(f"{name}: {detail}" if detail else name)


class CapExceeded(RuntimeError):
    """An instance is larger than a configured brute-force or size cap."""


class ConfigError(ValueError):
    """Invalid sweep configuration or parameter grid."""
