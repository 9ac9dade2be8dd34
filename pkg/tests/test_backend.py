import os
import subprocess
import sys

import numpy as np
import pytest

from lvglasso import _cd_py, lasso_cd

from conftest import KERNELS, random_spd


def backend_in_subprocess(**env):
    code = "import lvglasso; print(lvglasso.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={**os.environ, **env},
                         capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_forced_fallback():
    assert backend_in_subprocess(LVGLASSO_PURE_PYTHON="1") == "python"


@pytest.mark.skipif(len(KERNELS) < 2, reason="compiled kernel not built")
def test_compiled_selected_by_default():
    env = {k: v for k, v in os.environ.items() if k != "LVGLASSO_PURE_PYTHON"}
    out = subprocess.run([sys.executable, "-c", "import lvglasso; print(lvglasso.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "cython"


@pytest.mark.parametrize("seed", range(5))
def test_lasso_kernels_agree(seed):
    if len(KERNELS) < 2:
        pytest.skip("compiled kernel not built")
    from lvglasso import _cd_fast

    rng = np.random.default_rng(seed)
    G = random_spd(rng, 9)
    t = rng.standard_normal(9)
    pen = rng.uniform(0, 0.3, 9)
    a, b = np.zeros(9), np.zeros(9)
    na, ra = _cd_py.lasso_cd(G, t, pen, a, 1e-10, 500)
    nb, rb = _cd_fast.lasso_cd(G, t, pen, b, 1e-10, 500)
    assert na == nb
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_public_lasso_uses_selected_kernel(kernel):
    res = lasso_cd(np.eye(3), [1.0, -2.0, 0.05], [0.1, 0.1, 0.1])
    np.testing.assert_allclose(res.coef, [0.9, -1.9, 0.0])
