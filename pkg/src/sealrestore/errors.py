"""Exception types raised across the toolkit."""


class SealRestoreError(Exception):
    """Base class for every error the toolkit raises on purpose."""


class DecodeError(SealRestoreError):
    pass


class ZeroDimensionError(SealRestoreError):
    pass


class DimensionMismatchError(SealRestoreError, ValueError):
    pass


class EmptyImageError(SealRestoreError, ValueError):
    pass


class InvalidKernelError(SealRestoreError, ValueError):
    pass


class TooSmallError(SealRestoreError, ValueError):
    pass


class OutOfBoundsError(SealRestoreError, ValueError):
    pass


class InvalidCodepointError(SealRestoreError, ValueError):
    pass


class PlacementInfeasibleError(SealRestoreError):
    pass


class NoTemplatesError(SealRestoreError, ValueError):
    pass


class EmptyCanvasError(SealRestoreError, ValueError):
    pass


class AnnotationError(SealRestoreError, ValueError):
    """A ground-truth or prediction file failed to parse.

    The message carries ``path:line`` so the offending record can be found.
    """

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")
