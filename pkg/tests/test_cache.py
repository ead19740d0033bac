from qpicrystal import cache
from qpicrystal.cartan import get_datum
from qpicrystal.half import HalfAlgebra


def test_cache_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.ENV, str(tmp_path))
    D = get_datum("osp14")
    a = HalfAlgebra(D, cutoff=4)
    ws = a.space((2, 2))
    files = list(tmp_path.rglob("*.pkl"))
    assert files
    b = HalfAlgebra(D, cutoff=4)
    loaded = cache.load(D, (2, 2))
    assert loaded is not None and loaded.words == ws.words and loaded.gram == ws.gram
    assert b.space((2, 2)).gram == ws.gram


def test_cache_disabled(monkeypatch):
    monkeypatch.delenv(cache.ENV, raising=False)
    assert cache.load(get_datum("osp12"), (1,)) is None


def test_cache_keys_differ(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.ENV, str(tmp_path))
    HalfAlgebra(get_datum("osp14"), cutoff=2).space((1, 1))
    HalfAlgebra(get_datum("affine2"), cutoff=2).space((1, 1))
    assert len([p for p in tmp_path.iterdir() if p.is_dir()]) == 2


def test_corrupt_entry_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.ENV, str(tmp_path))
    D = get_datum("osp12")
    HalfAlgebra(D, cutoff=3).space((2,))
    for p in tmp_path.rglob("*.pkl"):
        p.write_bytes(b"garbage")
    assert cache.load(D, (2,)) is None
    assert HalfAlgebra(D, cutoff=3).dim((2,)) == 1
