"""Exception hierarchy.

Input and validation problems derive from :class:`ProperlabInputError`
(CLI exit code 1); resource caps derive from :class:`ResourceCapError`
(exit code 2).
"""


class ProperlabError(Exception):
    pass


class ProperlabInputError(ProperlabError, ValueError):
    pass


class ResourceCapError(ProperlabError):
    pass


class UnsupportedFamily(ProperlabInputError):
    pass


class CapExceeded(ResourceCapError):
    def __init__(self, order: int, cap: int):
        super().__init__(f"Weyl group of order {order} exceeds cap {cap}")
        self.order = order
        self.cap = cap


class SingularMatrix(ProperlabInputError):
    pass


class SingularMap(ProperlabInputError):
    pass


class NotASubalgebraOfG(ProperlabInputError):
    pass


class MixedMembers(ProperlabInputError):
    pass


class EmptyTail(ProperlabInputError):
    pass


class EmptySamples(ProperlabInputError):
    pass


class NonCompactKernel(ProperlabError):
    """Raised when rho_V vanishes on a ray where rho_h does not (p_V = +inf)."""

    def __init__(self, ray, result=None):
        super().__init__(f"rho_V vanishes on ray {tuple(ray)} while rho_h > 0")
        self.ray = tuple(ray)
        self.result = result


class DegenerateAmbient(ProperlabInputError):
    pass


class InsufficientSignal(ProperlabError):
    pass


class ArrangementTooLarge(ResourceCapError):
    pass
