"""
Numerical checks of the Higgs algebra on one degenerate level.

With G = 2(E + 1) the scalar of the level, the generators T1, T2, T3 give

    D+- = T1 +- i sqrt(G) T2        D3 = T3 / (4 sqrt(G))

which are compressed onto the level's eigenbasis. All checks compare norms and spectra only,
so the arbitrary phases of eigenvectors drop out.

Leakage counts only the part of Op P landing on eigenvectors of H within LEAK_WINDOW of the
level. Grid scale modes piled up at the x2 wall carry the discretization error of the singular
terms and are not part of any resolved level.
"""
import dataclasses
import logging

import numpy as np

import hdl.exc
import hdl.gridrep
import hdl.spectrumlab

EPS = 1e-14
LEAK_WINDOW = 2.5


@dataclasses.dataclass
class HiggsFrame():
    """
    The Higgs generators restricted to one level.

    Attributes:
        N: Level number, None if unknown.
        k: Coupling.
        E: Analytic energy used for the scalars.
        E_grid: Grid eigenvalue of the cluster, None for synthetic frames.
        scal: HiggsScalars at (E, k).
        d3, dplus, dminus: d x d restricted matrices.
        leakage: dict name -> ||(1 - P) Op P|| / ||Op P||.
    """
    N: int
    k: float
    E: float
    scal: object
    d3: np.ndarray
    dplus: np.ndarray
    dminus: np.ndarray
    E_grid: float = None
    leakage: dict = dataclasses.field(default_factory=dict)

    @property
    def multiplicity(self):
        return self.d3.shape[0]

    def hermitian_d3(self):
        """ (D3r + D3r^+) / 2 """
        return (self.d3 + self.d3.conj().T) / 2


def norm2(mat):
    """ Spectral norm. """
    return float(np.linalg.norm(mat, 2)) if mat.size else 0.0


def compress(apply_op, basis, window=None):
    """
    Restrict an operator to span(basis).

    Args:
        apply_op: Callable mapping a block of columns V to Op V.
        basis: Orthonormal columns.
        window: Orthonormal columns containing span(basis), leakage is measured inside their
            span only. None measures it in the whole space.

    Returns: (V^+ Op V, leakage) with leakage = ||W^+ (Op V - V V^+ Op V)|| / ||W^+ Op V||.
    """
    image = apply_op(basis)
    restricted = basis.conj().T @ image
    outside = image - basis @ restricted
    if window is not None:
        image = window.conj().T @ image
        outside = window.conj().T @ outside
    total = np.linalg.norm(image)
    leak = float(np.linalg.norm(outside) / total) if total else 0.0

    return restricted, leak


def resolved_window(esys, space, width=LEAK_WINDOW):
    """
    Eigenvectors of esys within width of the space's energy, the space's own included.
    """
    return hdl.gridrep.window_basis(esys, space.energy, max(width, space.spread))


def build_frame(space, t1, t2, t3, E, k, *, N=None, E_grid=None, leakage_tol=None,
                root_g=None, window=None):
    """
    Compress D+, D-, D3 onto an eigenspace.

    Args:
        space: EigenSpace of H.
        t1, t2, t3: DiracOp or matrices of the three generators.
        E: Analytic level energy, fixes G and the scalars.
        k: Coupling.
        N: Level number for reports.
        E_grid: Grid energy of the cluster, space.energy by default.
        leakage_tol: Raise when any leakage exceeds it.
        root_g: Replace sqrt(G) in D+- only, used for misnormalized controls.
        window: Eigenvectors of H the leakage is measured against, see resolved_window.

    Raises:
        LeakageError: Some generator maps the space outside itself beyond leakage_tol.
    """
    scal = hdl.spectrumlab.higgs_scalars(E, k)
    root = np.sqrt(scal.G)
    root_pm = root if root_g is None else root_g
    m1, m2, m3 = (hdl.gridrep.as_matrix(op) for op in (t1, t2, t3))
    basis = space.vectors

    dplus, leak_p = compress(lambda vec: m1 @ vec + 1j * root_pm * (m2 @ vec), basis, window)
    dminus, leak_m = compress(lambda vec: m1 @ vec - 1j * root_pm * (m2 @ vec), basis, window)
    d3, leak_3 = compress(lambda vec: m3 @ vec / (4 * root), basis, window)
    leakage = {'D+': leak_p, 'D-': leak_m, 'D3': leak_3}
    logging.getLogger(__name__).debug("Frame N=%s E=%.6f d=%d leakage %s", N, E,
                                      space.multiplicity, leakage)

    worst = max(leakage.values())
    if leakage_tol is not None and worst > leakage_tol:
        raise hdl.exc.LeakageError("eigenspace leakage {:.3g} above {:g} at E={:.6f}, "
                                   "grid too coarse".format(worst, leakage_tol, space.energy))

    return HiggsFrame(N=N, k=k, E=E, scal=scal, d3=d3, dplus=dplus, dminus=dminus,
                      E_grid=space.energy if E_grid is None else E_grid, leakage=leakage)


def check_ladder(frame):
    """
    ||[D3, D+-] -+ D+-|| / max(||D+-||, eps) for both signs, 0 on a single state level.
    """
    if frame.multiplicity == 1:
        return {'plus': 0.0, 'minus': 0.0}

    result = {}
    for name, mat, sign in (('plus', frame.dplus, 1), ('minus', frame.dminus, -1)):
        comm = frame.d3 @ mat - mat @ frame.d3
        result[name] = norm2(comm - sign * mat) / max(norm2(mat), EPS)

    return result


def check_cubic(frame):
    """
    Relative residual of [D+, D-] = c3 D3^3 + c1 D3 + c0.
    """
    scal = frame.scal
    d3 = frame.d3
    eye = np.eye(frame.multiplicity)
    lhs = frame.dplus @ frame.dminus - frame.dminus @ frame.dplus
    rhs = scal.c3 * d3 @ d3 @ d3 + scal.c1 * d3 + scal.c0 * eye
    size = norm2(d3)
    scale = abs(scal.c3) * size ** 3 + abs(scal.c1) * size + abs(scal.c0)

    return norm2(lhs - rhs) / max(scale, EPS)


def casimir_matrix(frame):
    """ {D+, D-} + c3/2 D3^4 + (c1 + c3/2) D3^2 + 2 c0 D3 """
    scal = frame.scal
    d3 = frame.d3
    d3sq = d3 @ d3
    return frame.dplus @ frame.dminus + frame.dminus @ frame.dplus + scal.c3 / 2 * d3sq @ d3sq \
        + (scal.c1 + scal.c3 / 2) * d3sq + 2 * scal.c0 * d3


def check_casimir(frame):
    """
    Returns:
        dict with casimir = ||C_mat - C|| / |C| and commutes = ||[C_mat, D3]|| / (||C_mat|| ||D3||).
        |C| is floored by ||C_mat|| where the Casimir value itself vanishes.
    """
    cmat = casimir_matrix(frame)
    value = frame.scal.C
    diff = norm2(cmat - value * np.eye(frame.multiplicity))
    comm = norm2(cmat @ frame.d3 - frame.d3 @ cmat)

    return {
        'casimir': diff / max(abs(value), norm2(cmat), EPS),
        'commutes': comm / max(norm2(cmat) * norm2(frame.d3), EPS),
    }


def ladder_scale(scal, weights):
    """
    Size of the terms of S+- over the given weights, at least |C|.
    """
    scale = abs(scal.C)
    for m in weights:
        for step in (1, -1):
            terms = abs(scal.c3 / 2 * m ** 2 * (m + step) ** 2) + abs(scal.c1 * m * (m + step)) \
                + abs(scal.c0 * (2 * m + step))
            scale = max(scale, terms)

    return max(scale, EPS)


def check_weights(frame, tol=None):
    """
    Compare the spectrum of D3 with the predicted ladder m_under, m_under + 1, ..., m_bar.

    The branch lambda is the one whose m_under lies closest to the lowest observed weight.

    Args:
        frame: A HiggsFrame.
        tol: When given, raise if spacing or extremal weights deviate by more.

    Returns:
        dict with weights, predicted, lam, spacing, top, bottom, annihilate_plus,
        annihilate_minus, s_pm and residual (max of all).

    Raises:
        LadderMismatch: The observed weights do not match the prediction within tol.
    """
    scal = frame.scal
    weights, vecs = np.linalg.eigh(frame.hermitian_d3())
    lam = min(hdl.spectrumlab.LAMBDAS, key=lambda x: abs(weights[0] - scal.m_under[x]))
    predicted = scal.m_under[lam] + np.arange(frame.multiplicity)

    spacing = float(np.max(np.abs(np.diff(weights) - 1))) if frame.multiplicity > 1 else 0.0
    top = abs(weights[-1] - scal.m_bar)
    bottom = abs(weights[0] - scal.m_under[lam])

    scale = ladder_scale(scal, weights)
    v_top, v_bot = vecs[:, -1], vecs[:, 0]
    annihilate_plus = float(np.linalg.norm(frame.dplus @ v_top) / np.sqrt(scale))
    annihilate_minus = float(np.linalg.norm(frame.dminus @ v_bot) / np.sqrt(scale))

    s_pm = 0.0
    minus_plus = 2 * frame.dminus @ frame.dplus
    plus_minus = 2 * frame.dplus @ frame.dminus
    for ind, weight in enumerate(weights):
        vec = vecs[:, ind]
        got_p = np.vdot(vec, minus_plus @ vec).real
        got_m = np.vdot(vec, plus_minus @ vec).real
        s_pm = max(s_pm,
                   abs(got_p - hdl.spectrumlab.s_pm_value(weight, scal, 1)) / scale,
                   abs(got_m - hdl.spectrumlab.s_pm_value(weight, scal, -1)) / scale)

    report = {
        'weights': [float(x) for x in weights],
        'predicted': [float(x) for x in predicted],
        'lam': lam,
        'spacing': spacing,
        'top': top,
        'bottom': bottom,
        'annihilate_plus': annihilate_plus,
        'annihilate_minus': annihilate_minus,
        's_pm': s_pm,
    }
    report['residual'] = max(spacing, top, bottom, annihilate_plus, annihilate_minus, s_pm)

    if tol is not None and max(spacing, top, bottom) > tol:
        raise hdl.exc.LadderMismatch(observed=report['weights'], predicted=report['predicted'])

    return report


def frame_report(frame):
    """
    All residuals of a frame as one flat JSON ready dict.
    """
    ladder = check_ladder(frame)
    casimir = check_casimir(frame)
    weights = check_weights(frame)

    return {
        'N': frame.N,
        'k': frame.k,
        'E_analytic': frame.E,
        'E_grid': frame.E_grid,
        'd': frame.multiplicity,
        'lam': weights['lam'],
        'residuals': {
            'ladder': max(ladder.values()),
            'cubic': check_cubic(frame),
            'casimir': casimir['casimir'],
            'weights': weights['residual'],
        },
        'weights': weights['weights'],
        'predicted': weights['predicted'],
        'leakage': max(frame.leakage.values()) if frame.leakage else 0.0,
    }


def synthetic_frame(N, k, *, tol=hdl.spectrumlab.ROOT_TOL):
    """
    Exact representation of the algebra on level N built from the scalars alone.

    D3 = diag(m_under..m_bar) and D+ |m> = sqrt(S+(m) / 2) |m + 1>, D- = D+^+. Serves as the
    reference the grid frames are measured against.
    """
    level = hdl.spectrumlab.solve_level(N, k, tol)
    scal = hdl.spectrumlab.higgs_scalars(level.E, k)
    weights = scal.m_under[level.lam] + np.arange(level.d)
    dplus = np.zeros((level.d, level.d), dtype=complex)
    for ind in range(level.d - 1):
        dplus[ind + 1, ind] = np.sqrt(max(hdl.spectrumlab.s_pm_value(weights[ind], scal, 1), 0) / 2)

    return HiggsFrame(N=N, k=k, E=level.E, scal=scal, d3=np.diag(weights).astype(complex),
                      dplus=dplus, dminus=dplus.conj().T)
