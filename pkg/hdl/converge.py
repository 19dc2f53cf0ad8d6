"""
Grid refinement studies.

Each study evaluates one error measure on a sequence of grids and fits the observed order p
from err ~ C h^p by least squares on log err against log h.

Grid clusters are matched to levels by the nearest analytic energy, so a level whose states
split over two clusters on a coarse grid is still compared with its own energy.
"""
import dataclasses
import logging

import numpy as np

import hdl.exc
import hdl.generators
import hdl.gridrep
import hdl.higgscheck
import hdl.spectrumlab

SLACK = 0.1
# Errors at or below FLOOR are round-off, they count as converged.
FLOOR = 1e-12
ORDER_CENTRAL = (1.5, 2.5)
ORDER_SPECTRAL = 1.5


def fit_order(steps, errors):
    """
    Slope of log(errors) over log(steps). NaN when fewer than two positive errors.
    """
    steps = np.asarray(steps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    mask = errors > 0
    if mask.sum() < 2:
        return float('nan')

    slope, _ = np.polyfit(np.log(steps[mask]), np.log(errors[mask]), 1)
    return float(slope)


def is_decreasing(values, slack=SLACK, floor=FLOOR):
    """
    True when values shrink along the sequence, the last pair may grow by slack relative.
    Values at or below floor are taken as floor.
    """
    values = [max(val, floor) for val in values]
    for ind in range(1, len(values)):
        allowed = values[ind - 1] * (1 + slack) if ind == len(values) - 1 else values[ind - 1]
        if values[ind] > allowed:
            return False

    return True


def order_ok(order, errors, backend, floor=FLOOR):
    """
    Judge a fitted order: central differences must give 2 +- 0.5, the spectral backend at
    least ORDER_SPECTRAL. Sequences already at floor or too short to fit pass.
    """
    if not errors or errors[-1] <= floor or np.isnan(order):
        return True
    if backend == 'central':
        return ORDER_CENTRAL[0] <= order <= ORDER_CENTRAL[1]

    return order >= ORDER_SPECTRAL


def canonical_defect(prim):
    """
    max |([X1, P1] - i) g| / max |g| for the Gaussian g = exp(-x1^2 / 4).
    """
    gauss = np.exp(-prim.x1 ** 2 / 4).astype(complex)
    comm = prim.X1 @ prim.P1 - prim.P1 @ prim.X1
    err = np.abs(comm @ gauss - 1j * gauss)

    return float(err.max() / np.abs(gauss).max())


def canonical_study(specs):
    """
    canonical_defect over grids, returns (rows, order).
    """
    rows = []
    for spec in specs:
        prim = hdl.gridrep.build_primitives(spec)
        rows += [{'grid': spec.label(), 'h': spec.h1, 'error': canonical_defect(prim)}]

    return rows, fit_order([row['h'] for row in rows], [row['error'] for row in rows])


def cluster_limit(levels):
    """ Most clusters the lowest levels can fall into, every state split off. """
    return sum(hdl.spectrumlab.degeneracy(num) for num in range(levels))


def exact_levels(k, levels, *, nonrel=False, tol=hdl.spectrumlab.ROOT_TOL):
    """
    dict N -> analytic energy for N < levels + 2, the two extra levels catch clusters beyond
    the wanted ones.
    """
    if nonrel:
        return {num: hdl.spectrumlab.nonrel_level(num, k) for num in range(levels + 2)}
    return {num: hdl.spectrumlab.solve_level(num, k, tol).E for num in range(levels + 2)}


def assign_levels(spaces, exact, levels):
    """
    hdl.gridrep.match_levels restricted to N < levels.
    """
    matched = hdl.gridrep.match_levels(spaces, exact)
    return {num: matched[num] for num in sorted(matched) if num < levels}


@dataclasses.dataclass
class GridLevels():
    """
    The solved spectrum of one grid.

    Attributes:
        spec: The GridSpec.
        prim: Its PrimitiveSet.
        ham: H as a DiracOp, None for the scalar nonrelativistic operator.
        esys: Full EigenSystem.
        spaces: Lowest positive clusters, ascending.
        levels: dict N -> clusters matched to level N.
        exact: dict N -> analytic energy.
    """
    spec: object
    prim: object
    ham: object
    esys: object
    spaces: list
    levels: dict
    exact: dict

    def merged(self, num):
        """ All states of level num as one EigenSpace. """
        return hdl.gridrep.merge_spaces(self.levels[num])


def grid_levels(spec, k, *, levels, cluster_tol, nonrel=False, cutoff=None, max_dim=None,
                residual_tol=None):
    """
    Lowest clustered levels of one grid.

    Args:
        spec: GridSpec.
        k: Coupling.
        levels: Number of levels wanted.
        cluster_tol: Clustering tolerance.
        nonrel: Use the scalar p^2/2 + V_sw instead of the Dirac H.
        cutoff, max_dim: Passed on to build_primitives.
        residual_tol: Passed on to eigh.

    Returns: GridLevels
    """
    prim = hdl.gridrep.build_primitives(spec, cutoff=cutoff, max_dim=max_dim)
    if nonrel:
        ham = None
        esys = hdl.gridrep.eigh(hdl.gridrep.build_nonrel(k, prim), residual_tol=residual_tol)
        branch = esys
    else:
        ham = hdl.gridrep.build_hamiltonian(k, prim)
        esys = hdl.gridrep.eigh(ham, residual_tol=residual_tol)
        branch = hdl.gridrep.positive_branch(esys)

    spaces = hdl.gridrep.cluster_levels(branch, cluster_tol, limit=cluster_limit(levels))
    if len(spaces) < levels:
        raise hdl.exc.SpectralGapError("only {} clustered levels on {}, {} requested. "
                                       "Enlarge the box or the grid.".format(
                                           len(spaces), spec.label(), levels))
    exact = exact_levels(k, levels, nonrel=nonrel)
    matched = assign_levels(spaces, exact, levels)
    for num in range(levels):
        if num not in matched:
            logging.getLogger(__name__).warning("No cluster near level N=%d on %s", num,
                                                spec.label())

    return GridLevels(spec=spec, prim=prim, ham=ham, esys=esys,
                      spaces=[space for group in matched.values() for space in group],
                      levels=matched, exact=exact)


def energy_rows(spec, k, *, levels, cluster_tol, nonrel=False, **solver):
    """
    Grid versus analytic energy per level, the error is the worst state of the level.

    solver holds cutoff, max_dim and residual_tol for grid_levels.
    """
    grid = grid_levels(spec, k, levels=levels, cluster_tol=cluster_tol, nonrel=nonrel,
                       **solver)
    rows = []
    for num in grid.levels:
        space = grid.merged(num)
        exact = grid.exact[num]
        rows += [{
            'grid': spec.label(),
            'h': max(spec.h1, spec.h2),
            'N': num,
            'E_grid': space.energy,
            'E_exact': exact,
            'error': float(np.max(np.abs(space.values - exact))),
            'd_grid': space.multiplicity,
            'd_exact': hdl.spectrumlab.degeneracy(num),
            'clusters': len(grid.levels[num]),
        }]

    return rows


def conservation_rows(spec, k, *, levels, cluster_tol, generators=None, **solver):
    """
    Full and projected [T, H] residuals of each generator on one grid.

    The projection uses every cluster matched to the lowest levels of the positive branch.
    """
    log = logging.getLogger(__name__)
    defs = generators or hdl.generators.builtin_generators()
    grid = grid_levels(spec, k, levels=levels, cluster_tol=cluster_tol, **solver)

    rows = []
    for entry in defs:
        top = hdl.gridrep.build_T(entry, grid.prim, k)
        res = hdl.gridrep.commutator_residual(top, grid.ham, grid.spaces)
        log.debug("%s on %s: full %.3e projected %.3e", entry.name, spec.label(),
                  res['full'], res['projected'])
        rows += [{
            'grid': spec.label(),
            'h': max(spec.h1, spec.h2),
            'generator': entry.name,
            'full': res['full'],
            'projected': res['projected'],
            'hermitian_defect': top.hermitian_defect(),
        }]

    return rows


def higgs_rows(spec, k, *, levels, cluster_tol, triple=('D1', 'D2', 'Q3'), **solver):
    """
    Higgs residuals of the lowest levels on one grid.

    Split levels are merged back before compressing. Leakage is reported rather than raised,
    coarse grids of a refinement leak the most. Levels whose merged multiplicity differs
    from the analytic degeneracy are skipped.
    """
    defs = hdl.generators.builtin_generators()
    grid = grid_levels(spec, k, levels=levels, cluster_tol=cluster_tol, **solver)
    t1, t2, t3 = (hdl.gridrep.build_T(defs[name], grid.prim, k) for name in triple)

    rows = []
    for num in grid.levels:
        space = grid.merged(num)
        expect = hdl.spectrumlab.degeneracy(num)
        if space.multiplicity != expect:
            logging.getLogger(__name__).warning("Skip N=%d on %s: %d states, expected %d", num,
                                                spec.label(), space.multiplicity, expect)
            continue
        frame = hdl.higgscheck.build_frame(space, t1, t2, t3, grid.exact[num], k, N=num,
                                           window=hdl.higgscheck.resolved_window(grid.esys,
                                                                                 space))
        report = hdl.higgscheck.frame_report(frame)
        for name, res in report['residuals'].items():
            rows += [{
                'grid': spec.label(),
                'h': max(spec.h1, spec.h2),
                'N': num,
                'residual': name,
                'name': '{} N={}'.format(name, num),
                'error': res,
                'leakage': report['leakage'],
            }]

    return rows


def summarize(rows, key, error='error', floor=FLOOR):
    """
    Fit an order per value of rows[key].

    Returns: dict key value -> {'order': p, 'errors': [...], 'decreasing': bool}
    """
    groups = {}
    for row in rows:
        groups.setdefault(row[key], []).append(row)

    summary = {}
    for name, group in groups.items():
        group = sorted(group, key=lambda row: -row['h'])
        errors = [row[error] for row in group]
        summary[name] = {
            'order': fit_order([row['h'] for row in group], errors),
            'errors': errors,
            'decreasing': is_decreasing(errors, floor=floor),
        }

    return summary


def stays_within(values, factor):
    """
    True when every value lies within factor of the first one, in both directions.
    """
    values = list(values)
    if not values or not values[0]:
        return False

    return all(values[0] / factor <= val <= values[0] * factor for val in values)
