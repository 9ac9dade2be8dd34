import numpy as np
import pytest

from lvglasso import _cd_py, glasso

try:
    from lvglasso import _cd_fast
except ImportError:  # extension not built
    _cd_fast = None

KERNELS = [pytest.param(_cd_py, id="python")]
if _cd_fast is not None:
    KERNELS.append(pytest.param(_cd_fast, id="cython"))


def random_spd(rng, d, n=None):
    """Sample covariance of ``n`` Gaussian draws (PD when n > d)."""
    n = n or d + 10
    mix = np.eye(d) + 0.5 * rng.standard_normal((d, d)) / np.sqrt(d)
    X = rng.standard_normal((n, d)) @ mix
    W = X.T @ X / n
    return (W + W.T) / 2


def random_mask(rng, d, scale=0.3, zero_frac=0.3):
    M = rng.uniform(0, scale, (d, d))
    M = np.triu(M, 1)
    M[rng.random((d, d)) < zero_frac] = 0.0
    M = np.triu(M, 1)
    return M + M.T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=KERNELS)
def kernel(request, monkeypatch):
    """Run the test once per available coordinate-descent backend."""
    monkeypatch.setattr(glasso, "kernels", request.param)
    return request.param


def strong_latent_data(p, seed, n, boost=4.0, latent_var=0.3):
    """Generator graph with one latent whose loadings are scaled by ``boost``.

    The latent diagonal is set so the latent's conditional variance given
    the observables is ``latent_var``, which makes it a real confounder.
    """
    from lvglasso import simgen

    model, _, _ = simgen.simulate(p, 1, n, seed)
    K = model.K_true.copy()
    v = boost * K[:p, p:]
    K[:p, p:], K[p:, :p] = v, v.T
    K[p:, p:] = v.T @ np.linalg.solve(K[:p, :p], v) + latent_var
    strong = simgen.GroundTruthModel(p, 1, model.locations, model.true_edges, K, 1.0, seed)
    return strong, simgen.sample_data(strong, n, seed)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
