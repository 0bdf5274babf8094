"""Counter-based random substreams.

Every Monte Carlo trial draws from its own SplitMix64 stream whose state is
derived from ``(seed, trial index)`` alone.  A block of trials can therefore
be generated in any order, in chunks, or in separate processes and the
result is bit-identical to a sequential run.
"""

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SEED_SALT = np.uint64(0xD1B54A32D192ED03)


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _trial_states(seed, trials):
    seed_word = np.asarray([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    base = _mix(seed_word * _SEED_SALT + _GAMMA)
    return _mix(base ^ _mix(np.asarray(trials, dtype=np.uint64) * _GAMMA + _GAMMA))


def uniforms(seed, trials, width):
    """Uniform draws in [0, 1) of shape ``(len(trials), width)``.

    Row ``i`` is the first ``width`` values of the substream for trial
    ``trials[i]`` and does not depend on which other trials are requested.
    """
    trials = np.atleast_1d(np.asarray(trials, dtype=np.int64))
    if np.any(trials < 0):
        raise ValueError("trial indices must be non-negative")
    with np.errstate(over="ignore"):
        state = _trial_states(int(seed), trials)[:, None]
        steps = np.arange(1, width + 1, dtype=np.uint64)[None, :] * _GAMMA
        words = _mix(state + steps)
    # top 53 bits -> double in [0, 1)
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def chunked(trials, chunk=16384):
    """Yield consecutive index ranges covering ``range(trials)``."""
    for start in range(0, trials, chunk):
        yield np.arange(start, min(start + chunk, trials))
