"""Forward and inverse wave invariants of bouncing-ball orbits.

The heavy lifting lives in the compiled extension ``_wavinv``; this package
re-exports its surface and adds small JSON conveniences.
"""

import json

from _wavinv import (  # noqa: F401
    InconsistentDataError,
    IllConditionedError,
    NumericalError,
    ResonanceError,
    SpecError,
    chebyshev_T,
    chebyshev_U,
    det_identity,
    floquet,
    forward,
    hankel_amp_coeffs,
    invert,
    inverse_hessian_element,
    poincare_eigenvalues,
    suite_names,
    verify_suite,
    __version__,
)


def make_domain(n, L, F_coeffs, trunc=3):
    """Build a symmetric DomainSpec JSON string.

    ``F_coeffs`` maps multi-index tuples (in the squared variables) to
    coefficients, e.g. ``{(1,): -0.25}`` for f = L/2 - 0.25 x^2.
    """
    coeffs = [{"idx": list(idx), "val": float(val)} for idx, val in sorted(F_coeffs.items())]
    spec = {
        "n": n,
        "L": L,
        "symmetric": True,
        "F": {"trunc": trunc, "coeffs": coeffs},
    }
    return json.dumps(spec)


def forward_table(domain_json, r_max=4, j_max=2):
    """Forward pipeline returning the table as a dict."""
    return json.loads(forward(domain_json, r_max, j_max))


def invert_table(table, j_max=2, alpha=()):
    """Inverse pipeline; accepts a dict or JSON string."""
    if not isinstance(table, str):
        table = json.dumps(table)
    return json.loads(invert(table, j_max, list(alpha)))
