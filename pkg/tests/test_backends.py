import os
import subprocess
import sys

import numpy as np
import pytest
from conftest import BACKENDS, dirichlet_dist

from meplsim import _kernels
from meplsim.oracle import _prepare, _run
from meplsim.topology import grid, line


def test_default_backend_is_compiled_when_built():
    if "cython" in BACKENDS:
        assert _kernels.BACKEND == "cython"
    else:
        assert _kernels.BACKEND == "python"


def test_env_var_forces_fallback():
    env = dict(os.environ, MEPLSIM_PURE_PYTHON="1")
    code = ("import meplsim, numpy as np; from meplsim import *; "
            "t, d, pl = worst_case_line_arrangement(2, 4); "
            "print(meplsim.BACKEND, brute_force_mepl(t, d).mepl_value)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "1.0"]


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
@pytest.mark.parametrize("rule,ms", [("M", "adjacent"), ("C", "adjacent"), ("C", "adjacent+knight")])
def test_enumeration_outputs_identical(rule, ms):
    rng = np.random.default_rng(21)
    for t in (line(7), grid(2, 3)):
        if ms == "adjacent+knight" and t.d != 2:
            continue
        d = dirichlet_dist(t.n, rng, 5)
        prep = _prepare(t, d, 9, 25)
        outs = {}
        for name, k in BACKENDS.items():
            best, assign, cmin, cassign, count, la, le, lc = _run(t, d, prep, rule, ms, True, 1e-12, k)
            order = np.lexsort(la.T[::-1])
            outs[name] = (best, assign.tolist(), cmin, count, la[order].tolist(), le[order], lc[order])
        a, b = outs["python"], outs["cython"]
        assert a[0] == pytest.approx(b[0], abs=1e-12) and a[1] == b[1]
        assert a[2] == pytest.approx(b[2], abs=1e-12) and a[3] == b[3]
        assert a[4] == b[4]
        assert np.allclose(a[5], b[5], atol=1e-12) and np.allclose(a[6], b[6], atol=1e-12)
