"""Exception types shared across kframe modules."""


class KFrameError(Exception):
    """Base class for all kframe domain errors."""


class SingularMatrix(KFrameError):
    """Matrix determinant below the singularity threshold."""


class SingularFrame(SingularMatrix):
    """An observer frame is numerically singular."""


class SingularMetric(SingularMatrix):
    """A metric field is numerically singular at some site."""


class SymmetryViolated(KFrameError):
    """Transition matrix does not satisfy the observer symmetry condition."""


class ShapeMismatch(KFrameError):
    """Lattice maps or matrices have incompatible shapes."""


class NotInFiberGroup(KFrameError):
    """A matrix value is not a member of the site's fiber group."""


class CollarViolation(KFrameError):
    """A gauge map is not the identity on its declared boundary collar."""


class LogBranchFailure(KFrameError):
    """Principal matrix logarithm is undefined (eigenvalue on the negative real axis)."""


class NonInvariantForm(KFrameError):
    """A bilinear form is not preserved by the fiber group."""
