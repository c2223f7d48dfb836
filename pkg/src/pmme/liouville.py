"""Liouville-space linear algebra: states, superoperators, damping bases.

Conventions
-----------
Operators on a d-dimensional Hilbert space are (d, d) complex ndarrays.
Vectorization is column-stacking: ``vectorize(A)`` stacks the columns of
``A``, so the superoperator of ``X -> B X C`` has matrix ``kron(C.T, B)``.

A damping basis consists of right eigenoperators ``R_i`` and left
eigenoperators ``L_i`` of a generator, biorthonormal under the pairing
``Tr[L_j R_i] = delta_ij`` (no conjugation on ``L``).

All returned arrays are frozen (non-writeable); every function here is
pure, so concurrent use needs no synchronization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, InitVar

import numpy as np

from .errors import (
    DefectiveGeneratorError,
    DimensionMismatchError,
    GeneratorSpectrumWarning,
    InternalInvariantError,
    NonHermitianError,
)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
BIORTHONORMALITY_TOL = 1e-12
EIGEN_RESIDUAL_TOL = 1e-10
DEGENERACY_RTOL = 1e-9
COND_THRESHOLD = 1e8

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, SIGMA_MINUS, SIGMA_PLUS, IDENTITY_2):
    _m.setflags(write=False)


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def vectorize(op):
    """Column-stack an operator into a length d**2 vector."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {op.shape}")
    return op.reshape(-1, order="F")


def devectorize(vec):
    """Inverse of :func:`vectorize`."""
    vec = np.asarray(vec)
    d = int(round(np.sqrt(vec.size)))
    if d * d != vec.size:
        raise DimensionMismatchError(f"vector length {vec.size} is not a perfect square")
    return vec.reshape(d, d, order="F")


def hermitian_operator_basis(d):
    """Canonical Hilbert-Schmidt-orthonormal Hermitian operator basis.

    Order: normalized identity; then for each index pair i < j (lexicographic)
    the symmetric and antisymmetric combinations; then the diagonal
    (generalized Gell-Mann) operators.  For d = 2 this is exactly
    ``{I, sigma_x, sigma_y, sigma_z} / sqrt(2)``.
    """
    ops = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for i in range(d):
        for j in range(i + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[i, j] = sym[j, i] = 1.0 / np.sqrt(2.0)
            ops.append(sym)
            asym = np.zeros((d, d), dtype=complex)
            asym[i, j] = -1.0j / np.sqrt(2.0)
            asym[j, i] = 1.0j / np.sqrt(2.0)
            ops.append(asym)
    for k in range(1, d):
        diag = np.zeros(d, dtype=complex)
        diag[:k] = 1.0
        diag[k] = -k
        ops.append(np.diag(diag) / np.sqrt(k * (k + 1)))
    return ops


@dataclass(frozen=True)
class BlochVector:
    """Real 3-vector (x, y, z) parameterizing a qubit state rho = (I + v.sigma)/2."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.norm > 1.0 + 1e-12:
            raise ValueError(f"Bloch vector norm {self.norm} exceeds 1")

    @property
    def norm(self):
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def to_density_matrix(self):
        m = 0.5 * (IDENTITY_2 + self.x * SIGMA_X + self.y * SIGMA_Y + self.z * SIGMA_Z)
        return DensityMatrix(m)


@dataclass(frozen=True)
class DensityMatrix:
    """A d x d density matrix: Hermitian, unit trace, positive semidefinite.

    Validation tolerances: Hermiticity and trace to 1e-12, minimum
    eigenvalue >= -psd_tol (default 1e-10).  Pass ``validate=False`` to
    wrap a matrix that intentionally breaks positivity (CP-violating
    dynamics); the other invariants are still enforced.
    """

    matrix: np.ndarray
    validate: InitVar[bool] = True
    psd_tol: InitVar[float] = PSD_TOL

    def __post_init__(self, validate, psd_tol):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got {m.shape}")
        scale = max(1.0, float(np.abs(m).max()))
        herm = float(np.abs(m - m.conj().T).max())
        if herm > HERMITICITY_TOL * scale:
            raise NonHermitianError(f"density matrix Hermiticity residual {herm:.3e}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL * scale:
            raise ValueError(f"density matrix trace {tr} is not 1")
        if validate:
            mineig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
            if mineig < -psd_tol:
                raise ValueError(f"density matrix minimum eigenvalue {mineig:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, ket):
        ket = np.asarray(ket, dtype=complex)
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()))

    @classmethod
    def maximally_mixed(cls, d):
        return cls(np.eye(d, dtype=complex) / d)

    @classmethod
    def from_bloch(cls, x, y, z):
        return BlochVector(float(x), float(y), float(z)).to_density_matrix()

    def bloch_vector(self):
        if self.dim != 2:
            raise DimensionMismatchError("Bloch vector defined for qubits only")
        m = self.matrix
        return BlochVector(
            float(np.trace(m @ SIGMA_X).real),
            float(np.trace(m @ SIGMA_Y).real),
            float(np.trace(m @ SIGMA_Z).real),
        )

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.matrix).min())


def trace_distance(rho1, rho2):
    """Trace distance D = (1/2) sum |eigenvalues of (rho1 - rho2)|, in [0, 1]."""
    m1 = rho1.matrix if isinstance(rho1, DensityMatrix) else np.asarray(rho1, dtype=complex)
    m2 = rho2.matrix if isinstance(rho2, DensityMatrix) else np.asarray(rho2, dtype=complex)
    if m1.shape != m2.shape:
        raise DimensionMismatchError(f"state shapes differ: {m1.shape} vs {m2.shape}")
    return 0.5 * float(np.abs(np.linalg.eigvalsh(m1 - m2)).sum())


@dataclass(frozen=True)
class Superoperator:
    """A linear map on operators, stored as a d**2 x d**2 matrix.

    Acts on column-stacked operators; compose with ``@``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = int(round(np.sqrt(m.shape[0])))
        if m.ndim != 2 or m.shape[0] != m.shape[1] or d * d != m.shape[0]:
            raise DimensionMismatchError(f"superoperator matrix shape {m.shape} invalid")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self):
        return int(round(np.sqrt(self.matrix.shape[0])))

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d * d, dtype=complex))

    def apply(self, op):
        """Apply the map to an operator (or DensityMatrix), returning an ndarray."""
        m = op.matrix if isinstance(op, DensityMatrix) else np.asarray(op, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"operand shape {m.shape}, expected {(self.dim, self.dim)}")
        return devectorize(self.matrix @ vectorize(m))

    def __matmul__(self, other):
        if isinstance(other, Superoperator):
            return Superoperator(self.matrix @ other.matrix)
        return NotImplemented

    def trace_annihilation_residual(self):
        """max_j |Tr[L(E_j)]| over the canonical operator basis (scale-free)."""
        d = self.dim
        tr_row = vectorize(np.eye(d, dtype=complex))  # Tr[X] = vec(I) . vec(X)
        return float(np.abs(tr_row @ self.matrix).max())


def build_gksl_generator(hamiltonian, dissipators=()):
    """Build the GKSL generator as a superoperator.

    L(rho) = -i[H, rho] + sum_k rate_k (A_k rho A_k^dag - {A_k^dag A_k, rho}/2)

    Parameters
    ----------
    hamiltonian : (d, d) Hermitian array.
    dissipators : sequence of (operator, rate) with rate >= 0.
    """
    H = np.asarray(hamiltonian, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionMismatchError(f"Hamiltonian must be square, got {H.shape}")
    d = H.shape[0]
    scale = max(1.0, float(np.abs(H).max()))
    if float(np.abs(H - H.conj().T).max()) > HERMITICITY_TOL * scale:
        raise NonHermitianError("Hamiltonian is not Hermitian to 1e-12")
    eye = np.eye(d, dtype=complex)
    M = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for op, rate in dissipators:
        A = np.asarray(op, dtype=complex)
        if A.shape != (d, d):
            raise DimensionMismatchError(f"dissipator shape {A.shape}, expected {(d, d)}")
        rate = float(rate)
        if rate < 0.0:
            raise ValueError(f"dissipator rate {rate} must be nonnegative")
        AdA = A.conj().T @ A
        M += rate * (np.kron(A.conj(), A) - 0.5 * np.kron(eye, AdA) - 0.5 * np.kron(AdA.T, eye))
    return Superoperator(M)


@dataclass(frozen=True)
class DampingBasis:
    """Eigenvalues and biorthonormal left/right eigenoperator pairs of a generator.

    Indices are sorted by (Re descending, Im ascending).  Eigenvalues equal
    within relative tolerance 1e-9 are grouped; within a real-eigenvalue
    degenerate group a Hermitian operator basis is chosen.
    """

    eigenvalues: np.ndarray
    right_ops: np.ndarray  # (n, d, d)
    left_ops: np.ndarray   # (n, d, d)
    degeneracy_groups: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(np.asarray(self.eigenvalues, dtype=complex)))
        object.__setattr__(self, "right_ops", _frozen(np.asarray(self.right_ops, dtype=complex)))
        object.__setattr__(self, "left_ops", _frozen(np.asarray(self.left_ops, dtype=complex)))

    @property
    def dim(self):
        return self.right_ops.shape[1]

    @property
    def size(self):
        return self.eigenvalues.size

    def coefficients(self, op):
        """Expansion coefficients alpha_i = Tr[L_i op]."""
        m = op.matrix if isinstance(op, DensityMatrix) else np.asarray(op, dtype=complex)
        return np.einsum("ijk,kj->i", self.left_ops, m)

    def reconstruct(self, coeffs):
        """sum_i coeffs_i R_i."""
        return np.einsum("i,ijk->jk", np.asarray(coeffs, dtype=complex), self.right_ops)

    def propagator(self, t):
        """exp(L t) as a superoperator, from the spectral decomposition."""
        phases = np.exp(self.eigenvalues * t)
        rcols = np.stack([vectorize(r) for r in self.right_ops], axis=1)
        lrows = np.stack([vectorize(l.T) for l in self.left_ops], axis=0)
        return Superoperator((rcols * phases[None, :]) @ lrows)

    def biorthonormality_residual(self):
        gram = np.einsum("ijk,lkj->il", self.left_ops, self.right_ops)
        return float(np.abs(gram - np.eye(self.size)).max())


def _canonical_phase(op):
    """Rotate a matrix by a global phase so its largest-|.| entry is real positive."""
    flat = op.reshape(-1)
    val = flat[int(np.argmax(np.abs(flat)))]
    if abs(val) == 0.0:
        return op
    return op * (abs(val) / val)


def _hermitian_group_ops(Vg, Wg, candidates, m):
    """Choose a Hermitian HS-orthonormal basis of a degenerate right eigenspace.

    Projects the canonical Hermitian basis through the group's spectral
    projector Vg @ Wg and Gram-Schmidts the results.  Returns None when the
    eigenspace does not admit m independent Hermitian directions.
    """
    accepted = []
    for B in candidates:
        y = Wg @ vectorize(B)
        X = devectorize(Vg @ y)
        for A in accepted:
            X = X - np.trace(A.conj().T @ X) * A
        nrm = float(np.linalg.norm(X))
        if nrm > 1e-8:
            X = X / nrm
            if float(np.abs(X - X.conj().T).max()) > 1e-10:
                return None
            # sign convention: align with the first canonical op X overlaps
            for C in candidates:
                ov = float(np.trace(C.conj().T @ X).real)
                if abs(ov) > 1e-8:
                    if ov < 0.0:
                        X = -X
                    break
            accepted.append(0.5 * (X + X.conj().T))
        if len(accepted) == m:
            return accepted
    return None


def damping_basis(generator, *, cond_threshold=COND_THRESHOLD, degeneracy_rtol=DEGENERACY_RTOL):
    """Diagonalize a generator into its damping basis.

    Raises :class:`DefectiveGeneratorError` when the eigenvector matrix is
    ill-conditioned beyond ``cond_threshold`` (defective generator).  Warns
    when an eigenvalue has positive real part (not a valid GKSL generator).
    """
    M = generator.matrix
    d = generator.dim
    n = d * d
    evals, V = np.linalg.eig(M)
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > cond_threshold:
        raise DefectiveGeneratorError(
            f"eigenvector condition number {cond:.3e} exceeds {cond_threshold:.1e}"
        )
    order = np.lexsort((evals.imag, -evals.real))
    evals = evals[order]
    V = V[:, order]
    W = np.linalg.inv(V)

    scale = max(1.0, float(np.abs(evals).max()))
    if float(evals.real.max()) > 1e-10 * scale:
        warnings.warn(
            f"generator eigenvalue with positive real part {evals.real.max():.3e}",
            GeneratorSpectrumWarning,
            stacklevel=2,
        )

    groups = []
    for i in range(n):
        if groups:
            ref = evals[groups[-1][0]]
            if abs(evals[i] - ref) <= degeneracy_rtol * max(1.0, abs(ref), abs(evals[i])):
                groups[-1].append(i)
                continue
        groups.append([i])

    candidates = hermitian_operator_basis(d)
    right = [None] * n
    left = [None] * n
    done = []  # (mean eigenvalue, group indices)

    for g in groups:
        lam = complex(evals[g].mean())
        m = len(g)
        Vg = V[:, g]
        Wg = W[g, :]
        if abs(lam.imag) <= degeneracy_rtol * max(1.0, abs(lam)):
            ops = _hermitian_group_ops(Vg, Wg, candidates, m)
        else:
            ops = None
            partner = next(
                (pg for plam, pg in done
                 if abs(np.conj(lam) - plam) <= degeneracy_rtol * max(1.0, abs(lam)) and len(pg) == m),
                None,
            )
            if partner is not None:
                for i, j in zip(g, partner):
                    right[i] = right[j].conj().T
                    left[i] = left[j].conj().T
                done.append((lam, g))
                continue
        if ops is not None:
            C = np.stack([Wg @ vectorize(X) for X in ops], axis=1)
            Wg_new = np.linalg.solve(C, Wg)
            for k, i in enumerate(g):
                right[i] = ops[k]
                left[i] = devectorize(Wg_new[k]).T
        else:
            # raw eigenvectors with canonical phase and HS norm
            for k, i in enumerate(g):
                R = devectorize(Vg[:, k])
                Rfix = _canonical_phase(R / np.linalg.norm(R))
                idx = int(np.argmax(np.abs(Rfix)))
                s = Rfix.reshape(-1)[idx] / R.reshape(-1)[idx]  # R_new = s * R
                right[i] = Rfix
                left[i] = devectorize(Wg[k] / s).T
        done.append((lam, g))

    right = np.stack(right)
    left = np.stack(left)

    # polish: enforce Tr[L_i R_j] = delta_ij exactly via one linear solve
    lrows = np.stack([vectorize(l.T) for l in left])
    rcols = np.stack([vectorize(r) for r in right], axis=1)
    gram = lrows @ rcols
    lrows = np.linalg.solve(gram, lrows)
    left = np.stack([devectorize(row).T for row in lrows])

    basis = DampingBasis(
        eigenvalues=evals,
        right_ops=right,
        left_ops=left,
        degeneracy_groups=tuple(tuple(g) for g in groups),
    )
    resid = basis.biorthonormality_residual()
    if resid > BIORTHONORMALITY_TOL:
        raise InternalInvariantError(f"biorthonormality residual {resid:.3e}")
    rres = max(
        float(np.abs(M @ vectorize(basis.right_ops[i]) - evals[i] * vectorize(basis.right_ops[i])).max())
        for i in range(n)
    )
    lres = max(
        float(np.abs(vectorize(basis.left_ops[i].T) @ M - evals[i] * vectorize(basis.left_ops[i].T)).max())
        for i in range(n)
    )
    if max(rres, lres) > EIGEN_RESIDUAL_TOL * max(1.0, float(np.abs(M).max())):
        raise InternalInvariantError(f"eigenoperator residual {max(rres, lres):.3e}")
    return basis
