"""Mask-kernel backend selection.

The compiled extension is used when its build succeeded; otherwise the
behaviourally identical pure-Python module takes over, so an
interpreter-only install stays fully functional.
"""

from __future__ import annotations

try:
    from . import _maskcore as _impl

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on the build environment
    from . import _maskcore_py as _impl

    BACKEND = "python"


def min_image_table(n: int) -> list[int]:
    """Smallest image of each n-floor mask over all floor permutations."""
    return _impl.min_image_table(n)


def apply_perm_to_mask(perm, mask: int) -> int:
    """Image of a floor mask under a floor permutation."""
    return _impl.apply_perm_to_mask(perm, mask)
