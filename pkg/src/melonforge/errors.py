"""Exception hierarchy shared by all melonforge modules."""


class MelonforgeError(Exception):
    """Base class for all melonforge errors."""


class ValidationError(MelonforgeError):
    """A graph-shaped input violates a structural invariant."""


class NotRegular(ValidationError):
    pass


class NotProperlyColored(ValidationError):
    pass


class NotBipartite(ValidationError):
    pass


class NotConnected(ValidationError):
    pass


class EmptyOrFullColorSet(ValidationError):
    pass


class VertexNotFound(MelonforgeError):
    pass


class SizeLimitExceeded(MelonforgeError):
    pass


class CertificateMismatch(MelonforgeError):
    pass


class NotATreeGluing(MelonforgeError):
    pass


class CapExceeded(MelonforgeError):
    pass


class EnumerationCap(MelonforgeError):
    pass


class MissingScaling(MelonforgeError):
    pass


class NonQuarticBubble(MelonforgeError):
    pass


class EdgeIsBridge(MelonforgeError):
    pass


class NoConvergence(MelonforgeError):
    pass


class OutsideBranch(MelonforgeError):
    pass


class NotTotallyUnbalanced(MelonforgeError):
    pass


class QuadratureDiverged(MelonforgeError):
    pass


class SingularDiagnostic(MelonforgeError):
    pass


class GradientTooLarge(MelonforgeError):
    pass


class LogDomain(MelonforgeError):
    pass


class OrderCap(MelonforgeError):
    pass


class UsageError(MelonforgeError):
    pass
