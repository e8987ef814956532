import numpy as np
import pytest

import photomosaic as pm


@pytest.fixture(scope="module")
def db():
    return pm.synthetic_database(60, tile_size=(8, 8), bins=15, seed=4)


@pytest.fixture(scope="module")
def scene():
    return pm.synthetic_scene(32, 40, seed=1)


def test_database(db):
    assert len(db) == 60
    assert db.tile_size == (8, 8)
    assert db.tile(0).shape == (8, 8, 3)
    h = db.histograms()
    assert h.shape == (60, 45)
    np.testing.assert_allclose(h[:, :15].sum(axis=1), 1.0)


def test_cache_round_trip(db, tmp_path):
    db.save(tmp_path / "tiles.bin")
    back = pm.TileDatabase.load(tmp_path / "tiles.bin", tile_size=(8, 8))
    assert len(back) == len(db)
    np.testing.assert_array_equal(back.tile(5), db.tile(5))
    with pytest.raises(pm.MosaicError):
        pm.TileDatabase.load(tmp_path / "tiles.bin", tile_size=(16, 16))


def test_ingest(tmp_path):
    for i in range(3):
        pm.save_image(pm.synthetic_scene(20, 30, seed=i), tmp_path / f"t{i}.png")
    (tmp_path / "readme.txt").write_text("not an image")
    db, skipped = pm.ingest(tmp_path, tile_size=(8, 8))
    assert len(db) == 3
    assert len(skipped) == 1


def test_solve_and_render(db, scene):
    model = pm.cluster(db, clusters=4, seed=1)
    assert model.num_clusters == 4
    out = pm.solve(scene, db, grid=(4, 5), nredu=2, algorithm="cep", clusters=model, max_evaluations=2000, seed=3)
    assert len(out["tiles"]) == 20
    assert out["evaluations"] == 2000
    fits = [f for _, f, _ in out["convergence"]]
    assert all(b <= a for a, b in zip(fits, fits[1:]))
    img = pm.render(scene, db, (4, 5), out["tiles"])
    assert img.shape == (32, 40, 3)
    assert np.abs(img.astype(float) - scene.astype(float)).mean() / 255 == pytest.approx(out["fitness"], abs=1 / 255)
    again = pm.solve(scene, db, grid=(4, 5), nredu=2, algorithm="cep", clusters=model, max_evaluations=2000, seed=3)
    assert again["tiles"] == out["tiles"]


def test_baselines(db, scene):
    greedy = pm.solve(scene, db, grid=(4, 5), nredu=2, algorithm="greedy")
    rii = pm.solve(scene, db, grid=(4, 5), nredu=2, algorithm="rii", max_evaluations=2000)
    assert greedy["evaluations"] == 20 * 60
    assert rii["fitness"] > 0


def test_errors(db, scene):
    with pytest.raises(pm.MosaicError):
        pm.solve(scene, db, grid=(4, 5), nredu=0, algorithm="rii")
    with pytest.raises(pm.MosaicError):
        pm.solve(scene, db, grid=(4, 5), algorithm="cep")


def test_mann_whitney():
    u, p, exact = pm.mann_whitney_u([1, 2, 3], [4, 5, 6])
    assert u == 0
    assert exact
    assert p == pytest.approx(0.1)
