"""Exception hierarchy shared by all sfk modules."""


class SFKError(ValueError):
    """Base class for every error raised by sfk."""


class NonPrimitiveNormal(SFKError):
    def __init__(self, index, normal):
        self.index = index
        self.normal = tuple(normal)
        super().__init__(f"normal {index} = {self.normal} is not primitive")


class BadAdjacentDeterminant(SFKError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(
            f"det(nu_{index - 1}, nu_{index}) = {value}, expected -1")


class BadGauge(SFKError):
    def __init__(self, offsets):
        self.offsets = tuple(offsets[:2])
        super().__init__(
            f"offsets must start with lambda_1 = lambda_2 = 0, got {self.offsets}")


class EmptyOrDegenerateRegion(SFKError):
    pass


class PointNotInterior(SFKError):
    pass


class NotStrictlyUnbounded(SFKError):
    pass


class InadmissibleNut(SFKError):
    def __init__(self, nu, det_first, det_last):
        self.nu = tuple(nu)
        self.det_first = det_first
        self.det_last = det_last
        which = "det(nu, nu_1)" if det_first < 0 else "det(nu, nu_d)"
        super().__init__(
            f"nut {self.nu} outside the admissible cone: {which} < 0 "
            f"(det(nu, nu_1) = {det_first:g}, det(nu, nu_d) = {det_last:g})")


class NonIncreasingA(SFKError):
    pass


class NonMonotoneA(SFKError):
    def __init__(self, a):
        self.a = tuple(a)
        super().__init__(f"solved a-parameters are not strictly increasing: {self.a}")


class DomainError(SFKError):
    pass


class NoConvergence(SFKError, ArithmeticError):
    def __init__(self, iterations, residual, point=None):
        self.iterations = iterations
        self.residual = residual
        self.point = point
        msg = f"Newton inversion failed after {iterations} iterations (residual {residual:.3e})"
        if point is not None:
            msg += f" at x = {tuple(float(t) for t in point)}"
        super().__init__(msg)


class QuadratureFailure(SFKError, ArithmeticError):
    pass


class RootNotFound(SFKError, ArithmeticError):
    pass


class NoOracleForPolygon(SFKError):
    pass
