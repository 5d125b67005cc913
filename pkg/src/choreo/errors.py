"""Exception types shared across the package."""


class ChoreoError(Exception):
    """Base class for all package errors."""


class CollisionDetected(ChoreoError):
    """A mutual distance dropped below the collision floor during evaluation."""

    def __init__(self, min_distance, floor):
        self.min_distance = float(min_distance)
        self.floor = float(floor)
        super().__init__(
            f"mutual distance {self.min_distance:.3e} below collision floor {self.floor:.3e}"
        )


class CollisionDuringIntegration(CollisionDetected):
    """The ODE integration came closer than the collision floor."""


class DegenerateLoop(ChoreoError):
    """The loop is constant (K = 0) or otherwise has no usable scale."""


class CertificationFailed(ChoreoError):
    def __init__(self, metric, value, bound):
        self.metric = metric
        self.value = value
        self.bound = bound
        super().__init__(f"certification failed: {metric} = {value!r} (bound {bound!r})")


class SweepBroken(ChoreoError):
    """An alpha-continuation sweep stopped early; partial results are attached."""

    def __init__(self, alpha, reason, partial):
        self.alpha = alpha
        self.reason = reason
        self.partial = partial
        super().__init__(f"sweep broke at alpha={alpha}: {reason}")
