"""Hot numeric kernels with a compiled core and a pure-numpy fallback.

The compiled extension (``tensionkit._kernels._core``, built from Cython) is
preferred; if it is missing, or ``TENSIONKIT_BACKEND=fallback`` is set in the
environment, the numpy implementation in ``_fallback`` is used instead.  Both
backends implement the same contract:

``tension_terms(p, w) -> (i1, i2, i3)``
    The triple (I(Y;Q|X), I(X;Q|Y), I(X;Y|Q)) in bits for the joint ``p``
    (shape (nx, ny)) and row-stochastic kernel ``w`` (shape (nx*ny, nq),
    rows in row-major cell order).

``descend(p, w, l1, l2, l3, max_iter, step_tol) -> (value, iters, converged)``
    Multiplicative (exponentiated-gradient) descent of the scalarized
    objective l1*I1 + l2*I2 + l3*I3 over the channel simplex rows, modifying
    ``w`` in place.  Only improving steps are accepted, so the returned value
    (in bits) never exceeds the objective of the initial kernel.

``oracle_sweep(p, comps, rowent, head_idx, lams, z_tol) ->
        (minima, argmin, slice_min, slice_argmin, n_leaves)``
    Exhaustive sweep over grid channels whose rows are drawn from the
    composition table ``comps``; returns per-direction scalarized minima with
    witnesses, and the minimum of r1+r2 over channels with r3 <= z_tol.
    Rows of zero joint mass are skipped (they cannot affect the tension);
    the first positive row may be restricted to ``head_idx`` (canonical
    representatives under relabeling of the q symbols).
"""

import os

_requested = os.environ.get("TENSIONKIT_BACKEND", "auto").lower()

if _requested not in ("auto", "compiled", "fallback"):
    raise RuntimeError(f"unknown TENSIONKIT_BACKEND value: {_requested!r}")

if _requested == "fallback":
    from . import _fallback as _impl

    BACKEND = "fallback"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _fallback as _impl

        BACKEND = "fallback"

tension_terms = _impl.tension_terms
descend = _impl.descend
oracle_sweep = _impl.oracle_sweep

__all__ = ["BACKEND", "tension_terms", "descend", "oracle_sweep"]
