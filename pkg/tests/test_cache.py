import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qchaos import cache, spectral
from qchaos.errors import CacheError


@pytest.fixture
def result():
    a = np.random.default_rng(3).normal(size=(12, 12))
    return spectral.diagonalize(a + a.T, 0.02, 5)


def test_round_trip_bit_exact(tmp_path, result):
    path = cache.store(result, tmp_path)
    assert path.name.startswith("qbox_n5_")
    back = cache.load(tmp_path, 5, 0.02)
    assert back.eps == 0.02 and back.nmax == 5
    assert back.eigenvalues.tobytes() == result.eigenvalues.tobytes()
    assert back.eigenvectors.tobytes() == result.eigenvectors.tobytes()


def test_layout(result):
    blob = cache.encode(result)
    assert blob[:8] == b"QBOXCACH"
    n = len(result)
    assert len(blob) == 32 + 8 * n + 8 * n * n + 32
    assert np.array_equal(np.frombuffer(blob, "<f8", n, 32), result.eigenvalues)


def test_missing_entry(tmp_path):
    assert cache.load(tmp_path, 5, 0.02) is None


@pytest.mark.parametrize("where", [0, 20, 40, -1])
def test_corruption_detected(tmp_path, result, where):
    path = cache.store(result, tmp_path)
    blob = bytearray(path.read_bytes())
    blob[where] ^= 0x01
    path.write_bytes(bytes(blob))
    with pytest.raises(CacheError):
        cache.load(tmp_path, 5, 0.02)


def test_truncated(result):
    with pytest.raises(CacheError):
        cache.decode(cache.encode(result)[:20])


def test_no_temp_files_left(tmp_path, result):
    cache.store(result, tmp_path)
    cache.store(result, tmp_path)
    assert [p.name for p in tmp_path.iterdir()] == [cache.cache_path(tmp_path, 5, 0.02).name]


finite = st.floats(0, 1, exclude_max=True)


@given(st.integers(2, 500), finite, st.integers(2, 500), finite)
def test_keys_collision_free(n1, e1, n2, e2):
    same = (n1, e1) == (n2, e2)
    assert (cache.cache_key(n1, e1) == cache.cache_key(n2, e2)) == same
    assert (cache.cache_path(".", n1, e1) == cache.cache_path(".", n2, e2)) == same


def test_key_distinguishes_nearby_eps():
    assert cache.cache_key(100, 0.02) != cache.cache_key(100, np.nextafter(0.02, 1))
