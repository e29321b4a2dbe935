import os
import subprocess
import sys

import numpy as np
import pytest

from gcasimir import _core, _purecore
from gcasimir.graphene import GrapheneSheet
from gcasimir.materials import gold_drude, silica
from gcasimir.reflection import BoundarySpec

ccore = pytest.importorskip("gcasimir._ccore")

V = 1.0 / 300.0
CASES = [(0.002, 0.0008, 294.0, 0.29, 0.24), (0.05, 0.01, 294.0, 0.0, 0.0),
         (0.3, 0.2, 50.0, 0.1, 0.02), (1e-4, 1e-3, 294.0, 0.29, 0.24)]


def close(a, b, rel=1e-12):
    return np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=rel, atol=0)


def test_compiled_backend_selected():
    assert _core.BACKEND == "cython"


@pytest.mark.parametrize("k,zq,T,gap,mu", CASES)
def test_tensor_kernels_agree(k, zq, T, gap, mu):
    assert close(ccore.order0(k, zq, gap, V), _purecore.order0(k, zq, gap, V))
    assert close(ccore.thermal_exact(k, zq, T, gap, mu, V, 1e-9), _purecore.thermal_exact(k, zq, T, gap, mu, V, 1e-9))
    assert close(ccore.l0(k, T, gap, mu, V, 1e-9), _purecore.l0(k, T, gap, mu, V, 1e-9))
    assert close(ccore.zero_t(k, zq, gap, mu, V), _purecore.zero_t(k, zq, gap, mu, V))
    zeta = zq * 197.3269804
    assert close(ccore.y_approx(zeta, T, gap, mu, 1e-9), _purecore.y_approx(zeta, T, gap, mu, 1e-9))
    assert ccore.psi(gap / zeta) == _purecore.psi(gap / zeta)


@pytest.mark.parametrize("zeta", [0.0, 0.0253 * 6.283, 1.5])
def test_term_integrals_agree(zeta):
    plate = BoundarySpec.coated(silica(), GrapheneSheet(0.29, 0.24))
    s1 = plate.side(zeta)
    s2 = BoundarySpec.bare(gold_drude()).side(zeta)
    a = ccore.term_integrals(zeta, 300.0, 294.0, s1, s2, 1e-9)
    b = _purecore.term_integrals(zeta, 300.0, 294.0, s1, s2, 1e-9)
    assert close(a, b, rel=1e-12)


def test_environment_forces_pure_backend():
    env = dict(os.environ, GCASIMIR_BACKEND="python")
    code = ("from gcasimir import _core; from gcasimir.lifshitz import *; "
            "from gcasimir.reflection import BoundarySpec; "
            "print(_core.BACKEND, gradient_zero_T(SystemGeometry(60350.0, 250.0), "
            "BoundarySpec.ideal(), BoundarySpec.ideal()).value)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out[0] == "python"
    assert float(out[1]) == pytest.approx(126.2067, abs=1e-3)
