"""Exception hierarchy.

Everything raised on purpose by the package derives from ``OptomechError``.
``PhysicsError`` subclasses mark conditions the CLI reports with exit code 2
(unstable or singular models, no admissible root, ...), as opposed to bad
user input.
"""


class OptomechError(Exception):
    """Base class for all package errors."""


class InvalidParameters(OptomechError, ValueError):
    """One or more parameter invariants are violated.

    ``violations`` is a list of ``(code, message)`` pairs, where ``code`` is one
    of ``NonPositiveRate``, ``NonFinite``, ``NegativeChi``, ``NegativePower``,
    ``NonPositiveFrequency`` or ``NonPositiveZpf``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        text = "; ".join(f"{code}: {msg}" for code, msg in self.violations)
        super().__init__(text or "invalid parameters")

    @property
    def codes(self):
        return [code for code, _ in self.violations]


class NonPositiveRate(InvalidParameters):
    def __init__(self, name, value):
        super().__init__([("NonPositiveRate", f"{name}={value!r} must be > 0")])


class PhysicsError(OptomechError):
    """A well-formed request that has no physical answer."""


class PhaseOutOfBranch(PhysicsError, ValueError):
    pass


class DegenerateDenominator(PhysicsError, ZeroDivisionError):
    pass


class NoRootInBranch(PhysicsError):
    pass


class NoPhysicalRoot(PhysicsError):
    pass


class InconsistentBoundaries(PhysicsError, ValueError):
    pass


class NonRealCoefficients(PhysicsError):
    pass


class WrongDegree(OptomechError, ValueError):
    pass


class EigenNoConverge(PhysicsError):
    pass


class SingularAtProbe(PhysicsError):
    pass


class UnstableModel(PhysicsError):
    pass


class UnknownPreset(OptomechError, KeyError):
    pass
