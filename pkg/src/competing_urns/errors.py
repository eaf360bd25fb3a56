"""Exception hierarchy.

Every domain failure derives from :class:`DomainError`, which the CLI maps to
exit code 1.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for all model-level errors."""


# graph construction
class GraphError(DomainError):
    pass


class DuplicateEdge(GraphError):
    def __init__(self, u: int, v: int):
        super().__init__(f"duplicate edge ({u}, {v})")
        self.edge = (u, v)


class SelfLoop(GraphError):
    def __init__(self, v: int):
        super().__init__(f"self-loop at vertex {v}")
        self.vertex = v


class Disconnected(GraphError):
    def __init__(self, vertex: int, msg: str | None = None):
        super().__init__(msg or f"graph is disconnected: vertex {vertex} unreachable from 0")
        self.vertex = vertex


class IndexOutOfRange(GraphError):
    def __init__(self, u: int, v: int, n: int):
        super().__init__(f"edge ({u}, {v}) out of range for n={n}")
        self.edge = (u, v)


class ParameterTooSmall(GraphError):
    pass


class EdgeListFormatError(GraphError):
    pass


class NoConvergence(DomainError):
    def __init__(self, max_iter: int, residual: float):
        super().__init__(f"power iteration did not converge in {max_iter} iterations "
                         f"(residual {residual:.3e})")
        self.max_iter = max_iter
        self.residual = residual


# urns
class UrnError(DomainError):
    pass


class EmptySystem(UrnError):
    def __init__(self):
        super().__init__("initial configuration has no balls")


class MixedUrn(UrnError):
    def __init__(self, vertex: int):
        super().__init__(f"urn {vertex} must be monochromatic (colour set iff balls > 0)")
        self.vertex = vertex


class NegativeCount(UrnError):
    def __init__(self, vertex: int, count: int):
        super().__init__(f"negative ball count {count} at vertex {vertex}")
        self.vertex = vertex


class Extinct(UrnError):
    def __init__(self):
        super().__init__("no balls left in the system")


class NotAPath(UrnError):
    pass


class BeforeFirstNucleation(UrnError):
    def __init__(self):
        super().__init__("marks exist only after the first nucleation")


class MarkInvariantViolated(UrnError):
    def __init__(self, vertex: int):
        super().__init__(f"urn {vertex} holds an unmarked ball of the marked colour "
                         f"together with a marked purple ball")
        self.vertex = vertex


# growth
class GrowthError(DomainError):
    pass


class IllegalInitialConfiguration(GrowthError):
    def __init__(self, site: tuple[int, int], colour: int):
        super().__init__(f"uncoloured site {site} has at least two neighbours of colour {colour}")
        self.site = site
        self.colour = colour


class ConflictDetected(GrowthError):
    def __init__(self, site: tuple[int, int]):
        super().__init__(f"site {site} became eligible for two colours at once")
        self.site = site


class NoBoundary(GrowthError):
    def __init__(self):
        super().__init__("coloured set has no boundary edges")


class BoundaryError(DomainError):
    pass


class DropletDisconnected(BoundaryError):
    def __init__(self, components: int):
        super().__init__(f"coloured set has {components} components; not yet connected")
        self.components = components


class Monochromatic(BoundaryError):
    def __init__(self):
        super().__init__("outer boundary is monochromatic (k = 0)")


class IntervalCountChanged(BoundaryError):
    def __init__(self, step: int, old: int, new: int):
        super().__init__(f"interval count changed from {old} to {new} at step {step}")
        self.step = step
        self.old = old
        self.new = new


# harness
class HarnessError(DomainError):
    pass


class WrongGraphFamily(HarnessError):
    pass


class IncompatibleSampling(HarnessError):
    pass


class ZeroFinalState(HarnessError):
    pass


class ConfigError(HarnessError):
    pass
