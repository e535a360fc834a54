"""Smoke tests for the compiled module (run against the CMake build via
PYTHONPATH; `pip install .` exercises the same surface)."""

import json
import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import _wavinv  # noqa: E402


def make_domain(n, L, coeffs, trunc=3):
    spec = {
        "n": n,
        "L": L,
        "symmetric": True,
        "F": {"trunc": trunc, "coeffs": [{"idx": list(i), "val": v} for i, v in sorted(coeffs.items())]},
    }
    return json.dumps(spec)


ELLIPSE = make_domain(2, 1.0, {(1,): -0.25, (2,): 0.05})


def test_chebyshev_values():
    assert _wavinv.chebyshev_T(2, 0.3) == pytest.approx(-0.82)
    assert _wavinv.chebyshev_U(1, 0.7) == pytest.approx(1.4)
    assert _wavinv.chebyshev_U(-1, 0.7) == 0.0


def test_pinned_inverse_hessian_element():
    # d=1, L=1, nu=-1/2, r=1: h^{11,11} = -1/3
    assert _wavinv.inverse_hessian_element(-1.0, 1.0, 1, 1, 1) == pytest.approx(-1.0 / 3.0)


def test_floquet_and_det_identity():
    fl = _wavinv.floquet(ELLIPSE)
    assert fl["stability"] == ["elliptic"]
    assert fl["alpha"][0] == pytest.approx(4.0 * math.pi / 3.0)
    det = _wavinv.det_identity(ELLIPSE, 1)
    assert det["rel_err"] < 1e-10


def test_poincare_eigenvalues_on_unit_circle():
    eigs = _wavinv.poincare_eigenvalues(ELLIPSE)
    for ev in eigs:
        assert abs(abs(ev) - 1.0) < 1e-6


def test_hankel_leading_coefficient():
    a = _wavinv.hankel_amp_coeffs(0.5, 2)
    assert a[0].imag == pytest.approx(-math.sqrt(2.0 / math.pi))
    assert abs(a[1]) < 1e-15


def test_forward_normalization():
    table = json.loads(_wavinv.forward(ELLIPSE, 2, 1))
    b10 = [e for e in table["entries"] if e["r"] == 1 and e["j"] == 0][0]
    assert b10["re"] == pytest.approx(1.0)
    assert b10["im"] == pytest.approx(0.0)


def test_round_trip_d1():
    domain = make_domain(2, 1.0, {(1,): -0.15, (2,): 0.12})
    table = _wavinv.forward(domain, 5, 1)
    rec = json.loads(_wavinv.invert(table, 1))
    coeffs = {tuple(t["idx"]): t["val"] for t in rec["F"]["coeffs"]}
    assert coeffs[(1,)] == pytest.approx(-0.15, rel=1e-6)
    assert coeffs[(2,)] == pytest.approx(0.12, rel=1e-5)


def test_resonant_domain_raises():
    flat = make_domain(2, 1.0, {(1,): 0.0})
    with pytest.raises(_wavinv.ResonanceError):
        _wavinv.floquet(flat)


def test_verify_suite_hankel():
    result = _wavinv.verify_suite("hankel", 1)
    assert result["passed"]
