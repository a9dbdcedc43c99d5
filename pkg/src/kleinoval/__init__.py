"""Hyperovals of the Klein quadric Q+(5,q), q even, from ovoids of W(q)."""

__version__ = "0.1.0"


class GeometryError(Exception):
    """Base for errors raised by geometric consistency checks."""


class ConsistencyError(GeometryError):
    """An internal invariant failed (bug or broken input data); aborts."""


class NotSCError(GeometryError):
    """A point set fed to the S/C decomposition is not one; names the plane."""

    def __init__(self, plane_index: int, count: int):
        self.plane_index = plane_index
        self.count = count
        super().__init__(
            f"plane {plane_index} meets the set in {count} points: neither singleton nor oval"
        )


class OvoidConstructionError(ValueError):
    """A parameter produced a point set that is not an ovoid."""


class NotRecoverable(GeometryError):
    """Kernel span has projective dimension != 3: span-based recovery unavailable."""
