"""Randomized prediction rule of a learned minimax risk classifier.

Given learned ``(mu, nu)`` and an instance matrix ``Phi_x`` the rule is::

    s_y  = (Phi_x[y] . mu + nu + 1)_+
    c_x  = sum_y s_y
    h(y | x) = s_y / c_x        if c_x > 0
             = 1 / |Y|          otherwise

Sampled labels use NumPy's Philox4x64 counter-based generator keyed by
``seed`` with the counter set to the sample index, so the draw for sample
``i`` depends on ``(seed, i)`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .learn import MrcModel

DETERMINISTIC = "deterministic"
SAMPLED = "sampled"


@dataclass(frozen=True, eq=False)
class Prediction:
    probabilities: np.ndarray
    label: int
    c_x: float


def rule_probabilities(mu, nu: float, matrices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Label probabilities ``(r, |Y|)`` and normalizers ``c`` for a stack of instance matrices."""
    matrices = np.asarray(matrices, dtype=float)
    scores = np.maximum(matrices @ np.asarray(mu, dtype=float) + nu + 1.0, 0.0)
    c = scores.sum(axis=-1)
    ny = matrices.shape[-2]
    probs = np.full(scores.shape, 1.0 / ny)
    pos = c > 0
    probs[pos] = scores[pos] / c[pos, None]
    return probs, c


def uniform_draw(seed: int, index: int) -> float:
    """The uniform variate assigned to sample ``index`` under ``seed``."""
    gen = np.random.Generator(np.random.Philox(key=int(seed), counter=int(index)))
    return float(gen.random())


def _sample(probs: np.ndarray, u: float) -> int:
    cdf = np.cumsum(probs)
    return int(min(np.searchsorted(cdf, u * cdf[-1], side="right"), probs.size - 1))


def choose_labels(probs: np.ndarray, mode: str = DETERMINISTIC, seed: int = 0,
                  start: int = 0) -> np.ndarray:
    """Turn probability rows into labels: argmax (lowest index on ties) or a seeded draw."""
    probs = np.atleast_2d(probs)
    if mode == DETERMINISTIC:
        return np.argmax(probs, axis=1)
    if mode != SAMPLED:
        raise ValueError(f"unknown prediction mode {mode!r}")
    return np.array([_sample(p, uniform_draw(seed, start + i)) for i, p in enumerate(probs)],
                    dtype=np.intp)


def predict_proba_batch(model: "MrcModel", X) -> tuple[np.ndarray, np.ndarray]:
    fm = model.feature_map
    patterns = fm.binarize(X)
    return rule_probabilities(model.mu, model.nu, fm.matrices_from_patterns(patterns))


def predict_proba(model: "MrcModel", x) -> Prediction:
    probs, c = predict_proba_batch(model, np.atleast_2d(x))
    return Prediction(probs[0], int(np.argmax(probs[0])), float(c[0]))


def predict_label(model: "MrcModel", x, mode: str = DETERMINISTIC, seed: int = 0, index: int = 0) -> int:
    probs, _ = predict_proba_batch(model, np.atleast_2d(x))
    return int(choose_labels(probs, mode, seed, index)[0])


def predict(model: "MrcModel", X, mode: str = DETERMINISTIC, seed: int = 0) -> np.ndarray:
    """Labels for every row of ``X``; sampled draws use counters ``0..n-1``."""
    probs, _ = predict_proba_batch(model, X)
    return choose_labels(probs, mode, seed)
