import re

import numpy as np
import pytest

from infeasible_di import CASE_STUDY, NewtonConfig, PortraitGrid, PortraitSpec, ProblemInstance, newton_iterate, portrait
from infeasible_di.exceptions import RegimeError
from infeasible_di.portrait import read_portrait_csv, write_portrait_csv, write_portrait_pgm

ROOT_15 = (0.693321878369456, 2.172720275813312)
P15 = ProblemInstance(CASE_STUDY, 1.5)


def read_pgm(path):
    raw = path.read_bytes()
    # header is four whitespace-separated tokens, then one whitespace byte
    m = re.match(rb"(P5)\s+(\d+)\s+(\d+)\s+(\d+)\s", raw)
    assert m and m.group(4) == b"255"
    w, h = int(m.group(2)), int(m.group(3))
    return w, h, np.frombuffer(raw[m.end():], dtype=np.uint8).reshape(h, w)


def test_spec_validation():
    with pytest.raises(ValueError):
        PortraitSpec(r=-1.5, ts_range=(1.0, 0.0))
    with pytest.raises(ValueError):
        PortraitSpec(r=-1.5, resolution=(1, 5))
    with pytest.raises(ValueError):
        PortraitSpec(r=-1.5, method="damped")


def test_refuses_feasible():
    with pytest.raises(RegimeError):
        portrait(ProblemInstance(CASE_STUDY, 5.0), PortraitSpec(r=-5.0, resolution=(2, 2)))


def test_cell_at_root_is_zero():
    # a 1x1-cell window centred on the root (resolution 2 puts no centre on it, so use 3)
    d = 1e-3
    spec = PortraitSpec(
        r=-1.5,
        ts_range=(ROOT_15[0] - d, ROOT_15[0] + d),
        c1_range=(ROOT_15[1] - d, ROOT_15[1] + d),
        resolution=(3, 3),
    )
    g = portrait(P15, spec)
    assert spec.ts_centers()[1] == pytest.approx(ROOT_15[0], abs=1e-15)
    assert g.counts[1, 1] == 0


def test_near_root_fast():
    spec = PortraitSpec(r=-1.5, ts_range=(0.49, 0.89), c1_range=(1.97, 2.37), resolution=(20, 20))
    g = portrait(P15, spec)
    assert np.all((g.counts >= 0) & (g.counts <= 10))


@pytest.fixture(scope="module")
def small():
    spec = PortraitSpec(r=-1.5, resolution=(24, 17))
    return spec, portrait(P15, spec)


def test_shape_and_range(small):
    spec, g = small
    assert g.counts.shape == (24, 17)
    assert np.all((g.counts == -1) | ((g.counts >= 0) & (g.counts <= spec.cap)))


def test_deterministic_and_schedule_free(small):
    spec, g = small
    np.testing.assert_array_equal(portrait(P15, spec).counts, g.counts)
    np.testing.assert_array_equal(portrait(P15, spec, jobs=3).counts, g.counts)


def test_cells_independent_and_reproducible(small):
    spec, g = small
    cfg = NewtonConfig(max_iter=spec.cap, tol=spec.tol, method=spec.method)
    ts, c1 = spec.ts_centers(), spec.c1_centers()
    for i in range(0, 24, 5):
        for j in range(0, 17, 4):
            _, trace = newton_iterate(cfg, spec.r, CASE_STUDY, (ts[i], c1[j]))
            expected = trace.iterations if trace.converged else -1
            assert g.counts[i, j] == expected


def test_csv_layout_and_round_trip(tmp_path):
    spec = PortraitSpec(r=-1.5, resolution=(2, 2))
    g = PortraitGrid(spec, np.array([[1, 2], [3, -1]]))
    path = tmp_path / "p.csv"
    write_portrait_csv(g, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 3
    ts, c1, counts = read_portrait_csv(path)
    np.testing.assert_array_equal(counts, g.counts)
    np.testing.assert_array_equal(ts, spec.ts_centers())
    np.testing.assert_array_equal(c1, spec.c1_centers())


def test_pgm_sentinel_only(tmp_path):
    spec = PortraitSpec(r=-1.5, resolution=(5, 4))
    path = tmp_path / "p.pgm"
    write_portrait_pgm(PortraitGrid(spec, np.full((5, 4), -1)), path)
    w, h, img = read_pgm(path)
    assert (w, h) == (5, 4)
    assert not img.any()


def test_pgm_grey_levels(tmp_path):
    spec = PortraitSpec(r=-1.5, resolution=(3, 2), cap=40)
    counts = np.array([[0, 40], [20, -1], [1, 39]])
    path = tmp_path / "p.pgm"
    write_portrait_pgm(PortraitGrid(spec, counts), path)
    _, _, img = read_pgm(path)
    # ts runs along x, c1 upward: the bottom image row holds the first c1 column
    np.testing.assert_array_equal(img[::-1].T > 0, counts >= 0)
    assert img[-1, 0] == 255
    bright = img[::-1].T
    assert bright[0, 0] > bright[2, 0] > bright[1, 0] > bright[2, 1] > bright[0, 1] > 0
