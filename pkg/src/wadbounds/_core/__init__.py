"""Pairwise-sum engine: compiled extension when built, numpy fallback otherwise.

``BACKEND`` reports which implementation is active ("compiled" or "fallback").
Set the environment variable ``WADBOUNDS_FORCE_FALLBACK=1`` to skip the
extension, e.g. for benchmarking the two against each other.
"""

import os

if os.environ.get("WADBOUNDS_FORCE_FALLBACK"):
    from . import _fallback as _impl

    BACKEND = "fallback"
else:
    try:
        from . import _pairwise as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as _impl

        BACKEND = "fallback"

score_table = _impl.score_table
pair_gradient_field = _impl.pair_gradient_field

__all__ = ["BACKEND", "score_table", "pair_gradient_field"]
