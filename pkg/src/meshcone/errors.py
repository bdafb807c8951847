"""Exception types shared across the package."""


class MeshConeError(Exception):
    """Base class for all package-specific errors."""


class ObjParseError(MeshConeError):
    """A malformed line was found while reading an OBJ file."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class FaceIndexError(MeshConeError):
    """A face references a vertex index that does not exist."""


class EmptyMeshError(MeshConeError):
    """A mesh with zero vertices or zero faces where one is required."""


class DegenerateMeshError(MeshConeError):
    """Geometry that cannot support the requested operation (zero area/extent)."""


class DimensionError(MeshConeError):
    """Operands with incompatible shapes."""


class SingularMatrixError(MeshConeError):
    """LDL^T factorization hit a pivot too close to zero."""

    def __init__(self, pivot, value):
        self.pivot = pivot
        self.value = value
        super().__init__(
            f"factorization failed: |pivot| = {abs(value):.3e} < 1e-13 at index {pivot}"
        )
