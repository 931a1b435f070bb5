"""Exception types shared across the library."""

from __future__ import annotations


class RigidityError(Exception):
    """Base class for all library-specific errors."""


class InputError(RigidityError):
    """Malformed or inconsistent input document."""


class ThickPairPresent(RigidityError):
    """A thick pair was found where the decomposition hypothesis forbids one."""

    def __init__(self, x, y):
        self.witness = (x, y)
        super().__init__(f"thick pair present: {x} x {y}")


class HypothesisViolated(RigidityError):
    """An internal hypothesis check failed; indicates a bug in the caller."""


class SupportViolation(RigidityError):
    """A distribution escaped the support set it was required to live in."""


class ConstancyViolation(RigidityError):
    """A multiplier that must be constant on a coset was not."""


class CertificateNotFound(RigidityError):
    """No separating vector exists for two cosets; impossible for distinct cosets."""


class FamilyNotFound(RigidityError):
    """Avoiding-family search failed.

    ``exhausted`` is True when the whole candidate space was enumerated and no
    family exists over this field, False when only the search budget ran out.
    """

    def __init__(self, message: str, exhausted: bool):
        self.exhausted = exhausted
        super().__init__(message)


class ModelTooSmall(RigidityError):
    """The constructive decomposition failed because the field is too small.

    This is an honest outcome, not a bug: over a small prime field the
    avoiding sets can cover every candidate vector, and then support
    elimination genuinely fails.
    """

    def __init__(self, p: int, detail: str):
        self.p = p
        self.detail = detail
        super().__init__(
            f"decomposition not available over F_{p}: {detail} "
            f"(try a larger prime)"
        )
