import numpy as np

from hhcn.streams import chunked, uniforms


def test_rows_depend_only_on_seed_and_trial():
    full = uniforms(3, np.arange(100), 5)
    picked = uniforms(3, [70, 4, 99], 5)
    assert np.array_equal(picked, full[[70, 4, 99]])
    # a wider draw extends the substream without changing its prefix
    assert np.array_equal(uniforms(3, np.arange(100), 8)[:, :5], full)


def test_seeds_differ():
    assert not np.array_equal(uniforms(0, np.arange(10), 4), uniforms(1, np.arange(10), 4))


def test_range_and_moments():
    u = uniforms(11, np.arange(200_000), 2)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.003
    assert abs(u.var() - 1 / 12) < 0.002
    assert abs(np.corrcoef(u[:, 0], u[:, 1])[0, 1]) < 0.01
    counts, _ = np.histogram(u[:, 0], bins=20, range=(0, 1))
    expected = len(u) / 20
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 50  # 19 dof, p ~ 1e-4


def test_chunked_covers_range():
    parts = list(chunked(40_000, chunk=16384))
    assert np.array_equal(np.concatenate(parts), np.arange(40_000))
