"""Synthetic latent variable graphical models.

Observed variables sit at uniform random locations in the unit square and
are joined with a probability that decays with distance, subject to a
maximum degree of four. Every latent variable is connected to every
observed one.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import linalg

EDGE_VALUE = 0.2
LATENT_MAX = 0.12
MAX_DEGREE = 4
DIAG_START = 1.0
DIAG_STEP = 0.5
MAX_INFLATIONS = 20


@dataclass
class GroundTruthModel:
    p: int
    h: int
    locations: np.ndarray
    true_edges: set
    K_true: np.ndarray
    diag_value: float
    seed: int

    @property
    def covariance(self):
        return linalg.inv(self.K_true)

    @property
    def S_true(self):
        return self.K_true[:self.p, :self.p]


@dataclass
class Dataset:
    X: np.ndarray
    sigma_o_n: np.ndarray
    n: int
    source_seed: int


def edge_probability(d, p):
    """``2 phi(d sqrt(p))`` with ``phi`` the standard normal density."""
    x = d * math.sqrt(p)
    return 2.0 * math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def generate_graph(p, rng_seed):
    """Random geometric graph with degree cap.

    Pairs are visited in lexicographic order. A pair with a saturated
    endpoint is skipped without consuming a random draw.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    rng = np.random.default_rng(rng_seed)
    loc = rng.uniform(size=(p, 2))
    degree = [0] * p
    edges = set()
    for i in range(p):
        for j in range(i + 1, p):
            if degree[i] >= MAX_DEGREE or degree[j] >= MAX_DEGREE:
                continue
            d = math.hypot(loc[i, 0] - loc[j, 0], loc[i, 1] - loc[j, 1])
            if rng.random() < edge_probability(d, p):
                edges.add((i, j))
                degree[i] += 1
                degree[j] += 1
    return loc, edges


def build_precision(true_edges, p, h, rng_seed, locations=None):
    rng = np.random.default_rng(rng_seed)
    K = np.zeros((p + h, p + h))
    for i, j in true_edges:
        if not (0 <= i < p and 0 <= j < p) or i == j:
            raise ValueError(f"invalid edge {(i, j)} for p={p}")
        K[i, j] = K[j, i] = EDGE_VALUE
    if h:
        # open interval (0, LATENT_MAX)
        cross = rng.uniform(np.nextafter(0.0, 1.0), LATENT_MAX, size=(p, h))
        K[:p, p:] = cross
        K[p:, :p] = cross.T
    diag = DIAG_START
    for _ in range(MAX_INFLATIONS + 1):
        np.fill_diagonal(K, diag)
        try:
            linalg.cholesky(K, lower=True)
        except linalg.LinAlgError:
            diag += DIAG_STEP
            continue
        break
    else:
        raise RuntimeError(f"precision not positive definite after {MAX_INFLATIONS} inflations")
    if locations is None:
        locations = np.empty((p, 2))
    return GroundTruthModel(p, h, locations, set(true_edges), K, diag, rng_seed)


def sample_data(model, n, rng_seed):
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(rng_seed)
    chol = linalg.cholesky(model.covariance, lower=True)
    Z = rng.standard_normal((n, model.p + model.h))
    X = (Z @ chol.T)[:, :model.p]
    return Dataset(X, sample_covariance(X), n, rng_seed)


def sample_covariance(X):
    Xc = X - X.mean(axis=0)
    S = Xc.T @ Xc / X.shape[0]
    return (S + S.T) / 2.0


def derive_seeds(seed):
    """Independent graph/precision/data seeds derived from one master seed."""
    children = np.random.SeedSequence(seed).generate_state(3, dtype=np.uint32)
    return {"graph": int(children[0]), "precision": int(children[1]), "data": int(children[2])}


def simulate(p, h, n, seed):
    """Draw a model and a dataset; returns ``(model, dataset, seeds)``."""
    seeds = derive_seeds(seed)
    loc, edges = generate_graph(p, seeds["graph"])
    model = build_precision(edges, p, h, seeds["precision"], locations=loc)
    data = sample_data(model, n, seeds["data"])
    return model, data, seeds
