"""
Test hdl.converge module.
"""
import math

import numpy as np
import pytest

import hdl.converge
import hdl.exc
import hdl.gridrep
import hdl.spectrumlab
from hdl.gridrep import GridSpec


def test_fit_order():
    steps = [0.4, 0.2, 0.1]
    assert hdl.converge.fit_order(steps, [3 * h ** 2 for h in steps]) == pytest.approx(2.0)
    assert hdl.converge.fit_order(steps, [h for h in steps]) == pytest.approx(1.0)


def test_fit_order_too_few():
    assert math.isnan(hdl.converge.fit_order([0.2, 0.1], [0.0, 1e-3]))


def test_is_decreasing():
    assert hdl.converge.is_decreasing([4, 2, 1])
    assert hdl.converge.is_decreasing([4, 2, 2.1])
    assert not hdl.converge.is_decreasing([4, 2, 2.5])
    assert not hdl.converge.is_decreasing([4, 5, 1])


def test_is_decreasing_floor():
    assert hdl.converge.is_decreasing([7.7e-17, 9.9e-17, 4.9e-16])
    assert hdl.converge.is_decreasing([1e-3, 1e-14, 2e-13])
    assert not hdl.converge.is_decreasing([1e-3, 1e-14, 2e-13], floor=1e-15)


def test_order_ok():
    errors = [1e-2, 1e-3]
    assert hdl.converge.order_ok(2.3, errors, 'central')
    assert not hdl.converge.order_ok(2.7, errors, 'central')
    assert not hdl.converge.order_ok(1.2, errors, 'central')
    assert hdl.converge.order_ok(6.0, errors, 'fourier')
    assert not hdl.converge.order_ok(1.0, errors, 'fourier')
    assert hdl.converge.order_ok(0.2, [1e-13, 1e-14], 'fourier')
    assert hdl.converge.order_ok(float('nan'), [1e-3], 'central')


def test_stays_within():
    assert hdl.converge.stays_within([0.3, 0.2, 0.5], 2.0)
    assert not hdl.converge.stays_within([0.3, 0.1], 2.0)
    assert not hdl.converge.stays_within([0.3, 0.7], 2.0)
    assert not hdl.converge.stays_within([0.0, 0.0], 2.0)


def test_canonical_study_central():
    specs = [GridSpec(size, 8, 8.0, 4.0, backend='central') for size in (16, 32, 64)]
    rows, order = hdl.converge.canonical_study(specs)

    assert [row['grid'] for row in rows] == ['16x8/8x4', '32x8/8x4', '64x8/8x4']
    assert hdl.converge.is_decreasing([row['error'] for row in rows])
    assert abs(order - 2) < 0.25


def test_energy_rows(f_small_spec):
    rows = hdl.converge.energy_rows(f_small_spec, 1.0, levels=4, cluster_tol=0.05)

    assert [row['N'] for row in rows] == [0, 1, 2, 3]
    assert [row['d_grid'] for row in rows] == [row['d_exact'] for row in rows]
    assert rows[0]['E_exact'] == pytest.approx(hdl.spectrumlab.solve_level(0, 1.0).E)
    assert all(row['error'] < 0.05 for row in rows)


def test_energy_rows_nonrel(f_small_spec):
    rows = hdl.converge.energy_rows(f_small_spec, 1.0, levels=2, cluster_tol=0.05, nonrel=True)

    assert rows[0]['E_exact'] == pytest.approx(hdl.spectrumlab.nonrel_level(0, 1.0))
    assert rows[0]['error'] < 0.1


def test_summarize():
    rows = [
        {'name': 'a', 'h': 0.1, 'error': 0.01},
        {'name': 'a', 'h': 0.2, 'error': 0.04},
        {'name': 'b', 'h': 0.2, 'error': 0.04},
        {'name': 'b', 'h': 0.1, 'error': 0.05},
    ]
    summary = hdl.converge.summarize(rows, 'name')

    assert summary['a']['errors'] == [0.04, 0.01]
    assert summary['a']['order'] == pytest.approx(2.0)
    assert summary['a']['decreasing']
    assert not summary['b']['decreasing']


def test_higgs_rows(f_small_spec):
    rows = hdl.converge.higgs_rows(f_small_spec, 1.0, levels=2, cluster_tol=0.05)

    assert sorted({row['N'] for row in rows}) == [0, 1]
    assert {row['residual'] for row in rows} == {'ladder', 'cubic', 'casimir', 'weights'}
    assert rows[0]['name'] == '{} N=0'.format(rows[0]['residual'])
    assert all(row['error'] >= 0 and row['h'] > 0 for row in rows)


def test_cluster_limit():
    assert hdl.converge.cluster_limit(4) == 6
    assert hdl.converge.cluster_limit(1) == 1


def test_assign_levels_drops_higher():
    esys = hdl.gridrep.EigenSystem(np.array([1.0, 2.0, 2.002, 3.0]), np.eye(4))
    spaces = hdl.gridrep.cluster_levels(esys, 1e-3)
    levels = hdl.converge.assign_levels(spaces, {0: 1.0, 1: 2.0, 2: 3.0}, 2)

    assert sorted(levels) == [0, 1]
    assert len(levels[1]) == 2


def test_grid_levels(f_small_spec):
    grid = hdl.converge.grid_levels(f_small_spec, 1.0, levels=4, cluster_tol=0.05,
                                    cutoff=1e-10, max_dim=5000, residual_tol=1e-10)

    assert sorted(grid.levels) == [0, 1, 2, 3]
    assert [grid.merged(num).multiplicity for num in range(4)] == [1, 1, 2, 2]
    assert len(grid.esys) == f_small_spec.dirac_dim
    assert grid.prim.cutoff == 1e-10


def test_grid_levels_passes_max_dim(f_small_spec):
    with pytest.raises(hdl.exc.DimensionCapError):
        hdl.converge.grid_levels(f_small_spec, 1.0, levels=2, cluster_tol=0.05, max_dim=100)


def test_grid_levels_too_many(f_small_spec):
    with pytest.raises(hdl.exc.SpectralGapError):
        hdl.converge.grid_levels(f_small_spec, 1.0, levels=1000, cluster_tol=0.05)


def test_energy_rows_split_level(f_small_spec):
    """ A cluster tolerance far below the grid error splits pairs, levels stay matched. """
    rows = hdl.converge.energy_rows(f_small_spec, 1.0, levels=4, cluster_tol=1e-12)

    assert [row['N'] for row in rows] == [0, 1, 2, 3]
    assert [row['d_grid'] for row in rows] == [1, 1, 2, 2]
    assert all(row['error'] < 0.05 for row in rows)


def test_dirac_energy_order():
    specs = [GridSpec(size, size, 6.0, 6.0) for size in (12, 16, 20)]
    rows = []
    for spec in specs:
        rows += hdl.converge.energy_rows(spec, 1.0, levels=2, cluster_tol=0.05)
    summary = hdl.converge.summarize(rows, 'N')

    assert summary[0]['decreasing']
    assert summary[0]['order'] >= hdl.converge.ORDER_SPECTRAL
    assert hdl.converge.order_ok(summary[0]['order'], summary[0]['errors'], 'fourier')
