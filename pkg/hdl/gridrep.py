"""
Finite dimensional realization of the operator algebra on a 2D tensor grid.

Scalar index of node (i, j) is i * M2 + j (both 0 based), the Dirac index is
sector * M1 * M2 + scalar index with sector 0 the upper component.

Two derivative backends exist:
    fourier - periodic spectral derivative, free of lattice doublers (default)
    central - 3 point central differences with Dirichlet ends

Both give P1, P2 acting on separate tensor factors, so [P1, P2] = 0 and B^+ B = Psq hold as
exact matrix identities.

Wall map
--------
On the half plane eigenfunctions behave like x2^s near x2 = 0 with s irrational, which a
uniform x2 grid only resolves algebraically. With wall_map the x2 nodes sit on a uniform grid
in t through x2 = a log(1 + exp(t / a)), a = WALL_SCALE, so x2 ~ a exp(t / a) near the wall and
x2 ~ t far from it. Vectors hold J^(1/2) psi with J = dx2/dt and P2 = -i W D W, W = J^(-1/2),
which keeps P2 Hermitian and the t dependence smooth.

Useful Documentation
--------------------
scipy.linalg:
    https://docs.scipy.org/doc/scipy/reference/linalg.html
scipy.special.expit:
    https://docs.scipy.org/doc/scipy/reference/generated/scipy.special.expit.html
"""
import dataclasses
import functools
import logging

import numpy as np
import scipy.linalg
import scipy.special

import hdl.exc
import hdl.generators
import hdl.symalg
import hdl.util

BACKENDS = ('fourier', 'central')
PINV_CUTOFF = 1e-10
CLUSTER_TOL = 1e-3
WALL_SCALE = 0.5
# t runs over (-WALL_DEPTH, L2), the first node lands near x2 = 5e-3.
WALL_DEPTH = 2.6


@dataclasses.dataclass(frozen=True)
class GridSpec():
    """
    Tensor grid of M1 x M2 interior nodes.

    x1 covers [-L1, L1]. x2 covers (0, L2] when half_plane else [-L2, L2]. On the half plane
    wall_map crowds the x2 nodes towards the wall, see the module doc.
    """
    M1: int
    M2: int
    L1: float
    L2: float
    half_plane: bool = True
    backend: str = 'fourier'
    wall_map: bool = True

    def __post_init__(self):
        for name in ('M1', 'M2'):
            val = getattr(self, name)
            if not isinstance(val, int) or val < 8 or val % 2:
                raise hdl.exc.InvalidConfig("{} must be an even integer >= 8, got {}".format(
                    name, val))
        for name in ('L1', 'L2'):
            if not getattr(self, name) > 0:
                raise hdl.exc.InvalidConfig("{} must be positive".format(name))
        if self.backend not in BACKENDS:
            raise hdl.exc.InvalidConfig("backend must be one of: " + ', '.join(BACKENDS))

    @property
    def mapped(self):
        """ True when the x2 axis goes through the wall map. """
        return self.half_plane and self.wall_map

    @property
    def h1(self):
        return 2 * self.L1 / (self.M1 + 1)

    @property
    def h2(self):
        """ Step of the uniform x2 coordinate, t under the wall map. """
        if self.mapped:
            return (self.L2 + WALL_DEPTH) / (self.M2 + 1)
        width = self.L2 if self.half_plane else 2 * self.L2
        return width / (self.M2 + 1)

    @property
    def x1_nodes(self):
        return -self.L1 + self.h1 * np.arange(1, self.M1 + 1)

    @property
    def t2_nodes(self):
        """ Uniform nodes along x2, the same as x2_nodes without the wall map. """
        if self.mapped:
            start = -WALL_DEPTH
        else:
            start = 0.0 if self.half_plane else -self.L2
        return start + self.h2 * np.arange(1, self.M2 + 1)

    @property
    def x2_nodes(self):
        if self.mapped:
            return WALL_SCALE * np.logaddexp(0.0, self.t2_nodes / WALL_SCALE)
        return self.t2_nodes

    @property
    def x2_jacobian(self):
        """ dx2/dt at the nodes, ones without the wall map. """
        if self.mapped:
            return scipy.special.expit(self.t2_nodes / WALL_SCALE)
        return np.ones(self.M2)

    @property
    def dim(self):
        """ Scalar dimension. """
        return self.M1 * self.M2

    @property
    def dirac_dim(self):
        return 2 * self.dim

    def label(self):
        """ Short text like 24x24/8x8. """
        return '{}x{}/{:g}x{:g}'.format(self.M1, self.M2, self.L1, self.L2)

    def refined(self, M1, M2=None):
        """ Same box with a different resolution. """
        return dataclasses.replace(self, M1=M1, M2=M1 if M2 is None else M2)


def derivative_1d(size, step, backend):
    """
    Real antisymmetric first derivative matrix on size points spaced step apart.
    """
    if backend == 'central':
        off = np.ones(size - 1) / (2 * step)
        return np.diag(off, 1) - np.diag(off, -1)

    # Periodic spectral derivative, period size * step, size even.
    dist = np.arange(1, size)
    col = np.zeros(size)
    col[1:] = np.pi / (size * step) * (-1.0) ** dist / np.tan(np.pi * dist / size)

    return scipy.linalg.toeplitz(col, -col)


def freeze(mat):
    """ Mark an array read only and return it. """
    mat.setflags(write=False)
    return mat


class PrimitiveSet():
    """
    Position and momentum matrices of one grid, immutable once built.

    Attributes:
        spec: The GridSpec.
        x1, x2: Node coordinates per scalar index.
        X1, X2, X2inv2: Diagonal position matrices.
        P1, P2, Psq, Pinv2, B, Bdag: Momentum side matrices.
        retained_rank: Number of Psq modes kept by the pseudoinverse.
    """
    def __init__(self, spec, *, cutoff=PINV_CUTOFF):
        self.spec = spec
        self.cutoff = cutoff
        self._powers = {}
        eye1, eye2 = np.eye(spec.M1), np.eye(spec.M2)

        self.x1 = freeze(np.repeat(spec.x1_nodes, spec.M2))
        self.x2 = freeze(np.tile(spec.x2_nodes, spec.M1))
        self.identity = freeze(np.eye(spec.dim, dtype=complex))
        self.X1 = freeze(np.diag(self.x1).astype(complex))
        self.X2 = freeze(np.diag(self.x2).astype(complex))
        self.X2inv2 = freeze(np.diag(self.x2 ** -2).astype(complex))

        dx1 = derivative_1d(spec.M1, spec.h1, spec.backend)
        # d/dx2 = W d/dt W on J^(1/2) psi, W = J^(-1/2), still real antisymmetric.
        weight = spec.x2_jacobian ** -0.5
        dx2 = weight[:, None] * derivative_1d(spec.M2, spec.h2, spec.backend) * weight[None, :]
        self.P1 = freeze(-1j * np.kron(dx1, eye2))
        self.P2 = freeze(-1j * np.kron(eye1, dx2))
        self.Psq = freeze(self.P1 @ self.P1 + self.P2 @ self.P2)
        self.B = freeze(self.P1 - 1j * self.P2)
        self.Bdag = freeze(self.P1 + 1j * self.P2)

        # Psq = A1 x 1 + 1 x A2 with A = -D^2, diagonalized factor by factor.
        lam1, vec1 = scipy.linalg.eigh(-dx1 @ dx1)
        lam2, vec2 = scipy.linalg.eigh(-dx2 @ dx2)
        lam = np.add.outer(lam1, lam2).ravel()
        basis = np.kron(vec1, vec2)
        keep = lam > cutoff * lam.max()
        inv = np.zeros_like(lam)
        inv[keep] = 1 / lam[keep]

        self.retained_rank = int(keep.sum())
        self.Pinv2 = freeze(((basis * inv) @ basis.T).astype(complex))
        self._retained = freeze((basis * keep) @ basis.T)
        logging.getLogger(__name__).debug("Grid %s: pinv2 keeps %d of %d modes",
                                          spec.label(), self.retained_rank, spec.dim)

    def __repr__(self):
        return "{}(spec={!r}, retained_rank={})".format(self.__class__.__name__, self.spec,
                                                        self.retained_rank)

    def pinv_defect(self):
        """
        ||Pinv2 Psq - Pi|| in spectral norm, Pi the projector on retained modes.
        """
        return float(np.linalg.norm(self.Pinv2 @ self.Psq - self._retained, 2))

    def momentum_power(self, b, d):
        """ P1^b P2^d, cached on this instance. """
        key = (b, d)
        if key not in self._powers:
            self._powers[key] = freeze(np.linalg.matrix_power(self.P1, b)
                                       @ np.linalg.matrix_power(self.P2, d))
        return self._powers[key]


def build_primitives(spec, *, cutoff=None, max_dim=None):
    """
    Build the PrimitiveSet of spec.

    Args:
        spec: A GridSpec.
        cutoff: Relative eigenvalue cutoff of the Psq pseudoinverse.
        max_dim: Largest Dirac dimension allowed, limits.max_dim from config by default.

    Raises:
        DimensionCapError: 2 * M1 * M2 exceeds max_dim.
    """
    if max_dim is None:
        max_dim = hdl.util.get_config('limits', 'max_dim', default=5000)
    if spec.dirac_dim > max_dim:
        mem_mb = 16 * spec.dirac_dim ** 2 / 2 ** 20
        raise hdl.exc.DimensionCapError(
            "Dirac dimension {} exceeds cap {} (each dense matrix needs {:.0f} MiB). "
            "Lower M1/M2 or raise limits.max_dim.".format(spec.dirac_dim, max_dim, mem_mb))

    return PrimitiveSet(spec, cutoff=PINV_CUTOFF if cutoff is None else cutoff)


def realize(expr, prim, k=None):
    """
    Matrix of expr on the grid with the formal k set to the value k.

    Monomials pinv2^s x1^a x2^c p1^b p2^d sharing (s, b, d) are summed into one diagonal
    position factor, so each group costs a single product.

    Raises:
        DomainError: expr depends on k and no value was given.
    """
    if k is None and expr.subs_k(1) != expr.subs_k(0):
        raise hdl.exc.DomainError("realize needs a numeric k for " + str(expr))

    groups = {}
    for (s, a, c, b, d), coeff in expr.numeric_terms(0.0 if k is None else k):
        diag = groups.setdefault((s, b, d), np.zeros(prim.spec.dim, dtype=complex))
        diag += coeff * prim.x1 ** a * prim.x2 ** c

    result = np.zeros((prim.spec.dim, prim.spec.dim), dtype=complex)
    for (s, b, d), diag in groups.items():
        right = diag[:, None] * prim.momentum_power(b, d)
        result += np.linalg.matrix_power(prim.Pinv2, s) @ right if s else right

    return result


class DiracOp():
    """
    2x2 block operator on the spinor grid.
    """
    def __init__(self, upper_left, upper_right, lower_left, lower_right, *, name=''):
        self.name = name
        self.blocks = (upper_left, upper_right, lower_left, lower_right)

    @property
    def upper_left(self):
        return self.blocks[0]

    @property
    def upper_right(self):
        return self.blocks[1]

    @property
    def lower_left(self):
        return self.blocks[2]

    @property
    def lower_right(self):
        return self.blocks[3]

    @functools.cached_property
    def matrix(self):
        """ The assembled dense matrix. """
        ul, ur, ll, lr = self.blocks
        return freeze(np.block([[ul, ur], [ll, lr]]))

    def hermitian_defect(self):
        """ ||A - A^+|| / ||A|| in Frobenius norm, 0 for the zero operator. """
        norm = np.linalg.norm(self.matrix)
        if not norm:
            return 0.0
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T) / norm)

    def __repr__(self):
        return "{}(name={!r}, dim={})".format(self.__class__.__name__, self.name,
                                              self.matrix.shape[0])


def as_matrix(op):
    """ Dense matrix of a DiracOp or a plain array. """
    return op.matrix if isinstance(op, DiracOp) else np.asarray(op)


def build_hamiltonian(k, prim):
    """
    H = [[1 + V, B], [B^+, -1]] with V = V_sw at the given k.

    Raises:
        DomainError: k < 0.
    """
    if k < 0:
        raise hdl.exc.DomainError("k must be >= 0, got {}".format(k))
    pot = realize(hdl.symalg.sw_potential(), prim, k)
    return DiracOp(prim.identity + pot, prim.B, prim.Bdag, -prim.identity, name='H')


def hermitian_part(mat):
    """ (A + A^+) / 2 """
    return (mat + mat.conj().T) / 2


def build_T(entry, prim, k=None):
    """
    T = [[T11, T12 B], [B^+ T21, B^+ T22 B]] with Tij the Hermitian parts of the realized blocks.

    Written order products of grid matrices that do not commute, x2 and p2 say, leave an
    anti Hermitian remainder of the size of the discretization error. Dropping it keeps T
    Hermitian to round-off whenever Q21 == Q12.
    """
    t11 = hermitian_part(realize(entry.q11, prim, k))
    t12 = hermitian_part(realize(entry.q12, prim, k))
    t21 = t12 if entry.q21 == entry.q12 else hermitian_part(realize(entry.q21, prim, k))
    t22 = hermitian_part(realize(entry.q22, prim, k))

    return DiracOp(t11, t12 @ prim.B, prim.Bdag @ t21, prim.Bdag @ t22 @ prim.B,
                   name=entry.name)


def build_L(prim):
    """
    Orbital block operator [[l, 0], [0, B^+ (Pinv2 l) B]].
    """
    return build_T(hdl.generators.builtin_generators().L, prim, 0.0)


def build_nonrel(k, prim):
    """
    Scalar p^2 / 2 + V_sw, its levels tend to N + 3/2 + sqrt(k + 1/4).
    """
    return prim.Psq / 2 + realize(hdl.symalg.sw_potential(), prim, k)


class EigenSystem():
    """
    Ascending eigenvalues with orthonormal eigenvector columns.

    Attributes:
        values: 1D real array.
        vectors: Columns match values.
        residual: max_j ||A v_j - E_j v_j|| / ||A||, None when not measured.
    """
    def __init__(self, values, vectors, residual=None):
        self.values = values
        self.vectors = vectors
        self.residual = residual

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return "{}(size={}, residual={})".format(self.__class__.__name__, len(self),
                                                 self.residual)


class EigenSpace():
    """
    A cluster of nearly equal eigenvalues.
    """
    def __init__(self, values, vectors):
        self.values = values
        self.vectors = vectors

    @property
    def energy(self):
        return float(np.mean(self.values))

    @property
    def multiplicity(self):
        return len(self.values)

    @property
    def spread(self):
        return float(self.values[-1] - self.values[0])

    def projector(self):
        return self.vectors @ self.vectors.conj().T

    def __repr__(self):
        return "{}(energy={:.6f}, multiplicity={})".format(self.__class__.__name__, self.energy,
                                                           self.multiplicity)


def eigh(op, *, residual_tol=None):
    """
    Dense Hermitian eigensolve of a DiracOp or matrix after symmetrizing (A + A^+) / 2.

    The eigenpair residual is measured and logged, a WARNING is emitted above residual_tol.
    """
    log = logging.getLogger(__name__)
    mat = as_matrix(op)
    sym = (mat + mat.conj().T) / 2
    norm = np.linalg.norm(mat)
    if norm:
        log.debug("Hermiticity defect before solve: %.3e",
                  np.linalg.norm(mat - mat.conj().T) / norm)

    values, vectors = scipy.linalg.eigh(sym)
    residual = 0.0
    if norm:
        residual = float(np.max(np.linalg.norm(sym @ vectors - vectors * values, axis=0)) / norm)
    log.debug("Eigen residual %.3e over %d pairs", residual, len(values))
    if residual_tol is not None and residual > residual_tol:
        log.warning("Eigen residual %.3e above %.1e", residual, residual_tol)

    return EigenSystem(values, vectors, residual)


def positive_branch(esys, threshold=1.0):
    """
    The E > threshold part of a Dirac spectrum, the particle levels.
    """
    mask = esys.values > threshold
    return EigenSystem(esys.values[mask], esys.vectors[:, mask], esys.residual)


def cluster_levels(esys, tol=CLUSTER_TOL, *, limit=None):
    """
    Group ascending eigenvalues whose neighbours lie closer than tol.

    Args:
        esys: An EigenSystem.
        tol: Clustering tolerance.
        limit: Stop after this many clusters.

    Raises:
        SpectralGapError: A cluster spreads over tol or more, so no gap separates its levels.
    """
    spaces = []
    values = esys.values
    start = 0
    for ind in range(1, len(values) + 1):
        if ind < len(values) and values[ind] - values[ind - 1] < tol:
            continue

        space = EigenSpace(values[start:ind], esys.vectors[:, start:ind])
        if space.spread >= tol:
            raise hdl.exc.SpectralGapError(
                "no spectral gap at tolerance {:g}: cluster near {:.6f} spreads {:.3g}. "
                "Refine the grid or adjust the cluster tolerance.".format(
                    tol, space.energy, space.spread))
        spaces += [space]
        start = ind
        if limit and len(spaces) == limit:
            break

    return spaces


def stack_vectors(spaces):
    """ Columns of all given eigenspaces side by side. """
    return np.hstack([space.vectors for space in spaces])


def commutator_residual(op, ham, space=None):
    """
    Relative size of [A, H].

    Args:
        op: DiracOp or matrix A.
        ham: DiracOp or matrix H.
        space: EigenSpace, list of them, or a matrix of orthonormal columns to project on.

    Returns:
        dict with full = ||AH - HA|| / (||A|| ||H||) and projected, the same measure for the
        matrices compressed to the span of space (None without one). Frobenius norms.
    """
    amat, hmat = as_matrix(op), as_matrix(ham)
    comm = amat @ hmat - hmat @ amat
    denom = np.linalg.norm(amat) * np.linalg.norm(hmat)
    result = {
        'full': float(np.linalg.norm(comm) / denom) if denom else 0.0,
        'projected': None,
    }

    if space is not None:
        if isinstance(space, EigenSpace):
            basis = space.vectors
        elif isinstance(space, (list, tuple)):
            basis = stack_vectors(space)
        else:
            basis = np.asarray(space)
        comp = basis.conj().T @ comm @ basis
        denom = np.linalg.norm(basis.conj().T @ amat @ basis) * \
            np.linalg.norm(basis.conj().T @ hmat @ basis)
        result['projected'] = float(np.linalg.norm(comp) / denom) if denom else 0.0

    return result


def merge_spaces(spaces):
    """
    One EigenSpace spanning all given ones, values kept ascending.
    """
    spaces = sorted(spaces, key=lambda space: space.energy)
    return EigenSpace(np.concatenate([space.values for space in spaces]), stack_vectors(spaces))


def match_levels(spaces, exact):
    """
    Assign every cluster to the level with the nearest exact energy.

    A level whose states split over several clusters collects all of them, clusters near a
    level beyond the given ones go to that level and should be dropped by the caller.

    Args:
        spaces: EigenSpace list.
        exact: dict level -> exact energy.

    Returns: dict level -> list of EigenSpace, levels nothing landed on are absent.
    """
    matched = {}
    for space in spaces:
        num = min(exact, key=lambda key: abs(exact[key] - space.energy))
        matched.setdefault(num, []).append(space)

    return matched


def window_basis(esys, center, width):
    """
    Eigenvector columns with |E - center| <= width, the part of the spectrum a grid resolves
    around one level.
    """
    mask = np.abs(esys.values - center) <= width
    return esys.vectors[:, mask]
