"""numpy fallback for the walk kernel; same signatures as the compiled module."""
import numpy as np


def walk_hits(draws, thresholds, n_max, counts):
    # step = 1 + #{thresholds <= draw}; thresholds are sorted ascending
    steps = np.searchsorted(thresholds, draws, side="right").astype(np.int64) + 1
    positions = np.cumsum(steps, axis=1)
    hits = positions[positions <= n_max]
    counts += np.bincount(hits, minlength=n_max + 1)[: n_max + 1]
    counts[0] += draws.shape[0]


def draw_steps(draws, thresholds, out):
    out[:] = np.searchsorted(thresholds, draws, side="right") + 1
