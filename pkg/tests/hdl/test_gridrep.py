"""
Test hdl.gridrep module.
"""
import numpy as np
import pytest

import hdl.exc
import hdl.gridrep
import hdl.spectrumlab
import hdl.symalg
from hdl.gridrep import GridSpec


def test_gridspec_invalid():
    for args, kwargs in (((9, 8, 1.0, 1.0), {}),
                         ((6, 8, 1.0, 1.0), {}),
                         ((8, 8, 0.0, 1.0), {}),
                         ((8, 8, 1.0, 1.0), {'backend': 'wavelet'})):
        with pytest.raises(hdl.exc.InvalidConfig):
            GridSpec(*args, **kwargs)


def test_gridspec_steps(f_small_spec):
    assert f_small_spec.h1 == pytest.approx(12 / 21)
    assert f_small_spec.h2 == pytest.approx((6 + hdl.gridrep.WALL_DEPTH) / 29)
    assert f_small_spec.dim == 560
    assert f_small_spec.dirac_dim == 1120
    assert f_small_spec.label() == '20x28/6x6'


def test_gridspec_nodes():
    half = GridSpec(8, 8, 2.0, 3.0)
    full = GridSpec(8, 8, 2.0, 3.0, half_plane=False)

    assert half.x2_nodes.min() > 0
    assert half.x2_nodes.max() < 3.0
    assert np.allclose(full.x2_nodes, -full.x2_nodes[::-1])
    assert np.allclose(half.x1_nodes, -half.x1_nodes[::-1])


def test_gridspec_uniform_without_wall_map():
    spec = GridSpec(8, 8, 2.0, 3.0, wall_map=False)
    prim = hdl.gridrep.build_primitives(spec)

    assert not spec.mapped
    assert np.allclose(spec.x2_nodes, np.arange(1, 9) / 3)
    assert np.allclose(spec.x2_jacobian, 1.0)
    assert np.allclose(np.diag(prim.X2inv2).real, np.tile((np.arange(1, 9) / 3) ** -2, 8))


def test_gridspec_wall_map_nodes():
    spec = GridSpec(8, 400, 1.0, 6.0)
    nodes, jac = spec.x2_nodes, spec.x2_jacobian

    assert spec.mapped
    assert not GridSpec(8, 8, 1.0, 6.0, half_plane=False).mapped
    assert 0 < nodes[0] < 5e-3
    assert np.all(np.diff(nodes) > 0)
    assert nodes[-1] == pytest.approx(spec.t2_nodes[-1], abs=1e-5)
    assert np.allclose(np.gradient(nodes, spec.t2_nodes)[1:-1], jac[1:-1], atol=1e-3)


def test_gridspec_refined(f_small_spec):
    spec = f_small_spec.refined(24)
    assert (spec.M1, spec.M2, spec.L1) == (24, 24, 6.0)


@pytest.mark.parametrize('backend', ['fourier', 'central'])
def test_derivative_antisymmetric(backend):
    mat = hdl.gridrep.derivative_1d(12, 0.3, backend)
    assert np.allclose(mat, -mat.T)


def test_derivative_fourier_exact():
    size, step = 16, 0.5
    nodes = step * np.arange(size)
    wave = 2 * np.pi / (size * step)
    mat = hdl.gridrep.derivative_1d(size, step, 'fourier')

    assert np.allclose(mat @ np.sin(3 * wave * nodes), 3 * wave * np.cos(3 * wave * nodes))


def test_derivative_central_linear():
    mat = hdl.gridrep.derivative_1d(10, 0.25, 'central')
    nodes = 0.25 * np.arange(10)
    assert np.allclose((mat @ nodes)[1:-1], 1.0)


def test_build_primitives_cap(f_small_spec):
    with pytest.raises(hdl.exc.DimensionCapError) as exc:
        hdl.gridrep.build_primitives(f_small_spec, max_dim=100)
    assert 'limits.max_dim' in exc.value.reply()


def test_primitives_identities(f_small_prim):
    prim = f_small_prim

    assert np.allclose(prim.P1 @ prim.P2, prim.P2 @ prim.P1)
    assert np.allclose(prim.Bdag @ prim.B, prim.Psq)
    assert np.allclose(prim.Psq, prim.Psq.conj().T)
    assert np.allclose(prim.Pinv2, prim.Pinv2.conj().T)
    assert prim.pinv_defect() < 1e-8


def test_primitives_pinv_rank(f_small_prim):
    dim = f_small_prim.spec.dim
    assert dim - 4 <= f_small_prim.retained_rank < dim

    prim = hdl.gridrep.build_primitives(GridSpec(8, 8, 2.0, 2.0, backend='central'))
    assert prim.retained_rank == 64


def test_primitives_readonly(f_small_prim):
    with pytest.raises(ValueError):
        f_small_prim.X1[0, 0] = 1.0


def test_realize_atoms(f_small_prim):
    prim = f_small_prim

    assert np.allclose(hdl.gridrep.realize(hdl.symalg.X1, prim), prim.X1)
    assert np.allclose(hdl.gridrep.realize(hdl.symalg.P_SQ, prim), prim.Psq)
    assert np.allclose(hdl.gridrep.realize(hdl.symalg.L_ORB, prim),
                       prim.X1 @ prim.P2 - prim.X2 @ prim.P1)


def test_realize_potential(f_small_prim):
    prim = f_small_prim
    expect = np.diag((prim.x1 ** 2 + prim.x2 ** 2 + 2.0 * prim.x2 ** -2) / 2)

    assert np.allclose(hdl.gridrep.realize(hdl.symalg.sw_potential(), prim, 2.0), expect)


def test_realize_needs_k(f_small_prim):
    with pytest.raises(hdl.exc.DomainError):
        hdl.gridrep.realize(hdl.symalg.sw_potential(), f_small_prim)


def test_build_hamiltonian(f_small_ham, f_small_prim):
    assert f_small_ham.hermitian_defect() < 1e-12
    assert f_small_ham.matrix.shape == (1120, 1120)
    assert np.allclose(f_small_ham.lower_right, -np.eye(560))
    assert np.allclose(f_small_ham.upper_right, f_small_prim.B)

    with pytest.raises(hdl.exc.DomainError):
        hdl.gridrep.build_hamiltonian(-1.0, f_small_prim)


def test_dirac_op_repr(f_small_ham):
    assert repr(f_small_ham) == "DiracOp(name='H', dim=1120)"


def test_eigh_residual(f_small_ham):
    esys = hdl.gridrep.eigh(f_small_ham)

    assert len(esys) == 1120
    assert np.all(np.diff(esys.values) >= 0)
    assert esys.residual < 1e-10


def test_positive_branch_levels(f_small_levels):
    mults = [space.multiplicity for space in f_small_levels]
    assert mults == [1, 1, 2, 2]

    for num, space in enumerate(f_small_levels):
        assert space.energy == pytest.approx(hdl.spectrumlab.solve_level(num, 1.0).E, abs=0.05)


def test_cluster_levels():
    esys = hdl.gridrep.EigenSystem(np.array([1.0, 1.0001, 2.0, 3.0, 3.00001]), np.eye(5))
    spaces = hdl.gridrep.cluster_levels(esys, 1e-3)

    assert [space.multiplicity for space in spaces] == [2, 1, 2]
    assert spaces[0].energy == pytest.approx(1.00005)
    assert np.allclose(spaces[2].projector(), np.diag([0, 0, 0, 1, 1]))
    assert len(hdl.gridrep.cluster_levels(esys, 1e-3, limit=2)) == 2


def test_cluster_levels_no_gap():
    esys = hdl.gridrep.EigenSystem(np.array([0.0, 0.0009, 0.0018, 1.0]), np.eye(4))
    with pytest.raises(hdl.exc.SpectralGapError):
        hdl.gridrep.cluster_levels(esys, 1e-3)


def test_commutator_residual():
    diag = np.diag([1.0, 2.0, 3.0])
    other = np.diag([4.0, 5.0, 6.0])
    shift = np.roll(np.eye(3), 1, axis=0)

    assert hdl.gridrep.commutator_residual(diag, other) == {'full': 0.0, 'projected': None}
    res = hdl.gridrep.commutator_residual(shift, diag, np.eye(3)[:, :1])
    assert res['full'] > 0
    assert res['projected'] == 0.0


def test_conserved_beats_orbital(f_small_prim, f_small_ham, f_small_levels, f_defs):
    q3 = hdl.gridrep.build_T(f_defs.Q3, f_small_prim, 1.0)
    orbital = hdl.gridrep.build_L(f_small_prim)

    res_q3 = hdl.gridrep.commutator_residual(q3, f_small_ham, f_small_levels)
    res_l = hdl.gridrep.commutator_residual(orbital, f_small_ham, f_small_levels)
    assert res_q3['projected'] < res_l['projected']


def test_build_nonrel_ground(f_small_prim):
    esys = hdl.gridrep.eigh(hdl.gridrep.build_nonrel(1.0, f_small_prim))
    assert esys.values[0] == pytest.approx(hdl.spectrumlab.nonrel_level(0, 1.0), abs=0.1)


def test_wall_map_derivative():
    spec = GridSpec(8, 48, 2.0, 6.0)
    prim = hdl.gridrep.build_primitives(spec)
    xs, root = spec.x2_nodes, np.sqrt(spec.x2_jacobian)
    func = xs ** 3 * np.exp(-xs ** 2)
    deriv = (3 * xs ** 2 - 2 * xs ** 4) * np.exp(-xs ** 2)

    got = prim.P2 @ np.tile(root * func, spec.M1)
    assert np.allclose(got, np.tile(-1j * root * deriv, spec.M1), atol=1e-5)
    assert np.allclose(prim.P2, prim.P2.conj().T)


def test_momentum_power_cached(f_small_prim):
    first = f_small_prim.momentum_power(1, 2)

    assert f_small_prim.momentum_power(1, 2) is first
    assert np.allclose(first, f_small_prim.P1 @ f_small_prim.P2 @ f_small_prim.P2)
    other = hdl.gridrep.build_primitives(GridSpec(8, 8, 2.0, 2.0))
    assert (1, 2) not in other._powers


@pytest.mark.parametrize('name', ['D1', 'D2', 'Q3', 'L'])
def test_build_T_hermitian(f_small_prim, f_defs, name):
    top = hdl.gridrep.build_T(f_defs[name], f_small_prim, 1.0)

    assert top.hermitian_defect() < 1e-8
    assert top.matrix.shape == (1120, 1120)


def test_build_T_q3_upper_right(f_small_prim, f_defs):
    prim = f_small_prim
    q3 = hdl.gridrep.build_T(f_defs.Q3, prim, 1.0)
    block = np.diag((prim.x1 ** 2 - prim.x2 ** 2 - prim.x2 ** -2) / 2)

    assert np.allclose(q3.upper_right, block @ prim.B)
    assert np.allclose(q3.lower_left, prim.Bdag @ block)


def test_hermitian_part():
    mat = np.array([[1.0, 2.0j], [0.0, 3.0]])
    part = hdl.gridrep.hermitian_part(mat)

    assert np.allclose(part, part.conj().T)
    assert np.allclose(part, [[1.0, 1.0j], [-1.0j, 3.0]])


def test_build_L_blocks(f_small_prim):
    prim = f_small_prim
    orbital = hdl.gridrep.build_L(prim)
    lmat = hdl.gridrep.hermitian_part(prim.X1 @ prim.P2 - prim.X2 @ prim.P1)

    assert orbital.name == 'L'
    assert np.allclose(orbital.upper_left, lmat)
    assert not np.any(orbital.upper_right)
    assert not np.any(orbital.lower_left)
    assert orbital.hermitian_defect() < 1e-8


def test_orbital_conserved_without_coupling(f_small_prim, f_small_ham, f_small_levels):
    prim = hdl.gridrep.build_primitives(GridSpec(20, 20, 6.0, 6.0, half_plane=False))
    ham = hdl.gridrep.build_hamiltonian(0.0, prim)
    esys = hdl.gridrep.positive_branch(hdl.gridrep.eigh(ham))
    spaces = hdl.gridrep.cluster_levels(esys, 0.05, limit=3)

    free = hdl.gridrep.commutator_residual(hdl.gridrep.build_L(prim), ham, spaces)
    coupled = hdl.gridrep.commutator_residual(hdl.gridrep.build_L(f_small_prim), f_small_ham,
                                              f_small_levels)
    assert free['projected'] < 1e-2
    assert free['projected'] < coupled['projected'] / 10


def test_eigh_cluster_example():
    esys = hdl.gridrep.eigh(np.diag([1.0, 2.0, 2.0, 3.0]))
    spaces = hdl.gridrep.cluster_levels(esys, 0.5)

    assert [space.multiplicity for space in spaces] == [1, 2, 1]
    assert [space.energy for space in spaces] == pytest.approx([1.0, 2.0, 3.0])
    assert np.allclose(spaces[1].projector(), np.diag([0, 1, 1, 0]))


def test_nonrel_oracle_fine_grid():
    prim = hdl.gridrep.build_primitives(GridSpec(48, 48, 8.0, 8.0), max_dim=5000)
    esys = hdl.gridrep.eigh(hdl.gridrep.build_nonrel(1.0, prim))
    expect = [hdl.spectrumlab.nonrel_level(num, 1.0) for num in range(4)
              for _ in range(hdl.spectrumlab.degeneracy(num))]

    assert len(expect) == 6
    assert np.max(np.abs(esys.values[:6] - expect)) < 1e-3


def test_merge_spaces():
    esys = hdl.gridrep.EigenSystem(np.array([1.0, 2.0, 2.1, 3.0]), np.eye(4))
    spaces = hdl.gridrep.cluster_levels(esys, 0.05)
    merged = hdl.gridrep.merge_spaces([spaces[2], spaces[1]])

    assert merged.multiplicity == 2
    assert list(merged.values) == [2.0, 2.1]
    assert np.allclose(merged.projector(), np.diag([0, 1, 1, 0]))


def test_match_levels_split_pair():
    esys = hdl.gridrep.EigenSystem(np.array([1.0, 1.998, 2.003, 3.01, 4.4]), np.eye(5))
    spaces = hdl.gridrep.cluster_levels(esys, 1e-3)
    matched = hdl.gridrep.match_levels(spaces, {0: 1.0, 1: 2.0, 2: 3.0, 3: 4.0})

    assert sorted(matched) == [0, 1, 2, 3]
    assert [space.energy for space in matched[1]] == pytest.approx([1.998, 2.003])
    assert matched[2][0].energy == pytest.approx(3.01)


def test_window_basis():
    esys = hdl.gridrep.EigenSystem(np.array([-1.0, 1.0, 2.0, 5.0]), np.eye(4))
    window = hdl.gridrep.window_basis(esys, 1.5, 1.0)

    assert np.allclose(window, np.eye(4)[:, 1:3])
