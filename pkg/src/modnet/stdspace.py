"""Standard subspaces and finite-dimensional modular theory.

A complex Hilbert space C^n is handled as the real space R^{2n} with the
multiplication by i represented by a fixed orthogonal block matrix J_i.
Real subspaces are matrices with orthonormal columns; antilinear
operators are ordinary real matrices anticommuting with J_i, which turns
the whole Tomita machinery (S = J Delta^{1/2}, modular flows,
half-sided inclusions) into finite linear algebra.
"""

from __future__ import annotations

import dataclasses
import math
import struct
import warnings

import numpy as np
import scipy.linalg as sla

#: relative singular-value threshold for rank/kernel decisions
RANK_REL_TOL = 1e-8
#: tolerance on structural invariants (orthogonality, involutivity, ...)
INVARIANT_TOL = 1e-10
#: relative tolerance for the modular balance J Delta J = Delta^{-1}
BALANCE_TOL = 1e-9
#: default tolerance on subspace distances
SUBSPACE_TOL = 1e-8
#: smallest principal angle counted as nonzero (separating test)
ANGLE_TOL = 1e-8
#: kernel-extraction conditioning gap below which a warning is issued
GAP_WARN = 1e2

#: logarithmic ladder of modular flow times used by takesaki_check
TAKESAKI_LADDER = tuple(s * 0.1 * 2.0 ** k for k in range(7) for s in (1, -1))

_TWO_PI = 2.0 * math.pi


class HalperinNonConvergence(RuntimeError):
    """Cyclic projection iteration failed to settle within the budget."""

    def __init__(self, residual, iterations):
        super().__init__(
            f"alternating projections did not converge: residual {residual:.3e} "
            f"after {iterations} effective iterations"
        )
        self.residual = residual
        self.iterations = iterations


class ConditioningWarning(UserWarning):
    """Kernel extraction performed near its conditioning limit."""


class ComplexSpace:
    """The complex space C^n in its real form R^{2n}.

    Vectors are stacked as [Re; Im]; ``J_i`` implements multiplication
    by i and is orthogonal with J_i^2 = -1 by construction.
    """

    __slots__ = ("n", "J_i")

    def __init__(self, n):
        if n < 1:
            raise ValueError("complex dimension must be positive")
        self.n = int(n)
        eye = np.eye(n)
        zero = np.zeros((n, n))
        self.J_i = np.block([[zero, -eye], [eye, zero]])
        self.J_i.setflags(write=False)

    @property
    def real_dim(self):
        return 2 * self.n

    def embed(self, vector):
        """Real form of a complex vector."""
        v = np.asarray(vector, dtype=complex).reshape(self.n)
        return np.concatenate([v.real, v.imag])

    def extract(self, real_vector):
        r = np.asarray(real_vector, dtype=float).reshape(2 * self.n)
        return r[: self.n] + 1j * r[self.n:]

    def realify_linear(self, c_matrix):
        """Real 2n x 2n form of a complex-linear operator."""
        c = np.asarray(c_matrix, dtype=complex)
        x, y = c.real, c.imag
        return np.block([[x, -y], [y, x]])

    def realify_antilinear(self, c_matrix):
        """Real form of the antilinear map xi -> C conj(xi)."""
        c = np.asarray(c_matrix, dtype=complex)
        x, y = c.real, c.imag
        return np.block([[x, y], [y, -x]])

    def complexify_linear(self, r_matrix):
        r = np.asarray(r_matrix, dtype=float)
        n = self.n
        return r[:n, :n] + 1j * r[n:, :n]

    def __eq__(self, other):
        return isinstance(other, ComplexSpace) and other.n == self.n

    def __hash__(self):
        return hash(("ComplexSpace", self.n))

    def __repr__(self):
        return f"ComplexSpace(n={self.n})"


class RealSubspace:
    """A real-linear subspace of C^n given by an orthonormal real basis."""

    __slots__ = ("parent", "basis")

    def __init__(self, parent, basis):
        b = np.asarray(basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != parent.real_dim:
            raise ValueError("basis must be a (2n x k) matrix")
        if b.shape[1] > parent.real_dim:
            raise ValueError("more basis columns than the real dimension")
        if b.shape[1]:
            gram = b.T @ b
            if np.max(np.abs(gram - np.eye(b.shape[1]))) > INVARIANT_TOL:
                raise ValueError("basis columns are not orthonormal")
        self.parent = parent
        self.basis = b
        self.basis.setflags(write=False)

    @classmethod
    def zero(cls, parent):
        return cls(parent, np.zeros((parent.real_dim, 0)))

    @classmethod
    def full(cls, parent):
        return cls(parent, np.eye(parent.real_dim))

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        return self.basis @ self.basis.T

    def transform(self, op):
        """Image under an orthogonal (or unitary real-form) operator."""
        return RealSubspace(self.parent, _orthonormal_basis(op @ self.basis,
                                                            self.parent))

    def __repr__(self):
        return f"RealSubspace(dim={self.dim} of R^{self.parent.real_dim})"


def _orthonormal_basis(columns, parent):
    """Orthonormal basis of the column span, rank by relative threshold."""
    a = np.asarray(columns, dtype=float)
    if a.size == 0:
        return np.zeros((parent.real_dim, 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((parent.real_dim, 0))
    rank = int(np.sum(s > RANK_REL_TOL * s[0]))
    return u[:, :rank]


def make_subspace(vectors, parent):
    """Real span of a family of complex vectors, as a RealSubspace."""
    cols = [parent.embed(v) for v in vectors]
    if not cols:
        return RealSubspace.zero(parent)
    return RealSubspace(parent, _orthonormal_basis(np.column_stack(cols), parent))


def subspace_distance(h1, h2):
    """Operator norm of the difference of the orthogonal projections."""
    return float(np.linalg.norm(h1.projector() - h2.projector(), 2))


def contains_subspace(big, small, tol=SUBSPACE_TOL):
    """Whether small is contained in big, up to tolerance."""
    if small.dim == 0:
        return True
    if small.dim > big.dim:
        return False
    defect = small.basis - big.projector() @ small.basis
    return float(np.linalg.norm(defect, 2)) < tol


def symplectic_complement(h):
    """H' = {xi : Im<xi, eta> = 0 for all eta in H} = (i H)^perp."""
    if h.dim == 0:
        return RealSubspace.full(h.parent)
    rotated = h.parent.J_i @ h.basis
    kernel = sla.null_space(rotated.T, rcond=RANK_REL_TOL)
    return RealSubspace(h.parent, kernel)


@dataclasses.dataclass(frozen=True)
class StandardnessReport:
    cyclic: bool
    separating: bool
    minimal_angle: float

    @property
    def standard(self):
        return self.cyclic and self.separating


def standardness(h):
    """Cyclicity (H + iH dense), separation (H with iH trivial), angles."""
    parent = h.parent
    if h.dim == 0:
        return StandardnessReport(False, True, math.pi / 2)
    paired = np.hstack([h.basis, parent.J_i @ h.basis])
    s = np.linalg.svd(paired, compute_uv=False)
    cyclic = bool(np.sum(s > RANK_REL_TOL * s[0]) == parent.real_dim)
    angles = sla.subspace_angles(h.basis, parent.J_i @ h.basis)
    minimal = float(np.min(angles)) if angles.size else math.pi / 2
    return StandardnessReport(cyclic, bool(minimal > ANGLE_TOL), minimal)


def is_standard(h):
    return standardness(h).standard


# ---------------------------------------------------------------------------
# modular data
# ---------------------------------------------------------------------------


class ModularData:
    """Modular pair (J, Delta) of a standard subspace.

    J is the real form of the antiunitary modular conjugation, Delta the
    complex-linear positive modular operator; the defining invariants are
    validated at construction.
    """

    __slots__ = ("parent", "J", "Delta", "_eig")

    def __init__(self, parent, J, Delta, atol=INVARIANT_TOL):
        J = np.asarray(J, dtype=float)
        Delta = np.asarray(Delta, dtype=float)
        d = parent.real_dim
        if J.shape != (d, d) or Delta.shape != (d, d):
            raise ValueError("J and Delta must be 2n x 2n")
        ji = parent.J_i
        checks = {
            "J orthogonal": np.max(np.abs(J.T @ J - np.eye(d))),
            "J involutive": np.max(np.abs(J @ J - np.eye(d))),
            "J antilinear": np.max(np.abs(J @ ji + ji @ J)),
            "Delta symmetric": np.max(np.abs(Delta - Delta.T)),
            "Delta complex-linear": np.max(np.abs(Delta @ ji - ji @ Delta)),
        }
        for name, err in checks.items():
            if err > atol:
                raise ValueError(f"modular invariant violated: {name} "
                                 f"(error {err:.3e})")
        w = np.linalg.eigvalsh((Delta + Delta.T) / 2)
        if w[0] <= 0.0:
            raise ValueError("modular invariant violated: Delta positive "
                             f"(min eigenvalue {w[0]:.3e})")
        self.parent = parent
        self.J = J
        self.Delta = (Delta + Delta.T) / 2
        self._eig = None
        balance = self.J @ self.Delta @ self.J @ self.Delta - np.eye(d)
        rel = np.linalg.norm(balance, 2)
        if rel > BALANCE_TOL * np.linalg.norm(self.Delta, 2):
            raise ValueError(
                "modular invariant violated: J Delta J = Delta^-1 "
                f"(relative error {rel:.3e})"
            )

    def _complex_eig(self):
        if self._eig is None:
            dc = self.parent.complexify_linear(self.Delta)
            w, v = np.linalg.eigh((dc + dc.conj().T) / 2)
            self._eig = (w, v)
        return self._eig

    def delta_power(self, p):
        """Delta^p as a real (complex-linear) matrix, p real."""
        w, v = self._complex_eig()
        c = (v * w ** p) @ v.conj().T
        return self.parent.realify_linear(c)

    def delta_it(self, t):
        """The modular unitary Delta^{it}, as a real orthogonal matrix."""
        w, v = self._complex_eig()
        c = (v * np.exp(1j * t * np.log(w))) @ v.conj().T
        return self.parent.realify_linear(c)

    def tomita(self):
        """S = J Delta^{1/2}."""
        return self.J @ self.delta_power(0.5)

    def __repr__(self):
        return f"ModularData(parent={self.parent!r})"


def modular_data(h):
    """Tomita operator and modular pair of a standard subspace.

    Returns ``(S, ModularData)`` where S is the real form of the closed
    antilinear involution fixing H pointwise.
    """
    rep = standardness(h)
    if not rep.cyclic:
        raise ValueError("subspace is not cyclic: H + iH does not span")
    if not rep.separating:
        raise ValueError(
            "subspace is not separating: H meets iH at angle "
            f"{rep.minimal_angle:.3e}"
        )
    parent = h.parent
    b = h.basis
    m = np.hstack([b, parent.J_i @ b])
    target = np.hstack([b, -(parent.J_i @ b)])
    s_op = sla.solve(m.T, target.T).T
    delta = s_op.T @ s_op
    delta = (delta + delta.T) / 2
    w, v = np.linalg.eigh(delta)
    inv_sqrt = (v / np.sqrt(w)) @ v.T
    j_raw = s_op @ inv_sqrt
    # snap the polar factor to an exact orthogonal matrix; its structure
    # (antilinearity, involutivity) is then asserted by ModularData
    uu, _, vv = np.linalg.svd(j_raw)
    j_op = uu @ vv
    return s_op, ModularData(parent, j_op, delta)


def subspace_from_modular(m):
    """The standard subspace with the given modular data.

    Computed as the kernel of (S - 1) with S = J Delta^{1/2}; the
    conditioning of the split is monitored and a small spectral gap
    triggers :class:`ConditioningWarning`.
    """
    d = m.parent.real_dim
    s_op = m.tomita()
    u, sv, vt = np.linalg.svd(s_op - np.eye(d))
    cut = RANK_REL_TOL * sv[0] if sv[0] > 0 else np.inf
    kernel_mask = sv <= cut
    if not np.any(kernel_mask):
        raise ValueError("S - 1 has trivial kernel; modular data degenerate")
    kept = sv[~kernel_mask]
    dropped = sv[kernel_mask]
    if kept.size and dropped.size and dropped.max() > 0:
        gap = kept.min() / dropped.max()
        if gap < GAP_WARN:
            warnings.warn(
                f"kernel split gap {gap:.1e} below {GAP_WARN:.0e}; "
                "fixed points of S are poorly resolved",
                ConditioningWarning,
                stacklevel=2,
            )
    basis = vt[kernel_mask.nonzero()[0], :].T
    return RealSubspace(m.parent, basis)


# ---------------------------------------------------------------------------
# lattice operations
# ---------------------------------------------------------------------------


def _common_parent(subspaces):
    if not subspaces:
        raise ValueError("need at least one subspace")
    parent = subspaces[0].parent
    if any(h.parent != parent for h in subspaces):
        raise ValueError("subspaces live in different parent spaces")
    return parent


def intersect(subspaces, method="exact", max_iter=5000, tol=1e-9):
    """Intersection of real subspaces.

    ``exact`` stacks the complementary projections and takes the kernel;
    ``halperin`` iterates the cyclic product of the orthogonal
    projections (by repeated squaring) and extracts the near-1 spectral
    subspace of the limit.
    """
    parent = _common_parent(subspaces)
    d = parent.real_dim
    if method == "exact":
        rows = np.vstack([np.eye(d) - h.projector() for h in subspaces])
        kernel = sla.null_space(rows, rcond=RANK_REL_TOL)
        return RealSubspace(parent, kernel)
    if method != "halperin":
        raise ValueError(f"unknown method {method!r}")
    t = np.eye(d)
    for h in subspaces:
        t = h.projector() @ t
    iters = 1
    residual = np.inf
    while iters <= max_iter:
        t2 = t @ t
        residual = float(np.linalg.norm(t2 - t, 2))
        t = t2
        iters *= 2
        if residual <= tol:
            break
    else:
        raise HalperinNonConvergence(residual, iters)
    sym = (t + t.T) / 2
    w, v = np.linalg.eigh(sym)
    basis = v[:, w > 0.5]
    return RealSubspace(parent, _orthonormal_basis(basis, parent))


def sum_closure(subspaces):
    """Closed real span of a family of subspaces."""
    parent = _common_parent(subspaces)
    cols = np.hstack([h.basis for h in subspaces])
    return RealSubspace(parent, _orthonormal_basis(cols, parent))


# ---------------------------------------------------------------------------
# modular-theoretic checks
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class TakesakiResult:
    invariant: bool
    first_violation: float | None
    deviation: float

    def __bool__(self):
        return self.invariant


def takesaki_check(k, h, t_samples=TAKESAKI_LADDER, tol=SUBSPACE_TOL):
    """Modular invariance forces equality for standard K inside H.

    Returns a truthy result iff Delta_H^{it} K = K on the sampled ladder;
    in that case K = H is asserted (a counterexample would contradict
    the uniqueness of modular-invariant standard subspaces and raises).
    """
    if not contains_subspace(h, k, tol):
        raise ValueError("K is not contained in H")
    if not is_standard(k):
        raise ValueError("K is not standard")
    _, m = modular_data(h)
    for t in t_samples:
        moved = k.transform(m.delta_it(t))
        d = subspace_distance(moved, k)
        if d > tol:
            return TakesakiResult(False, t, d)
    eq = subspace_distance(k, h)
    if eq > tol:
        raise ArithmeticError(
            "found a modular-invariant proper standard subspace "
            f"(distance to H: {eq:.3e}); this contradicts uniqueness"
        )
    return TakesakiResult(True, None, eq)


@dataclasses.dataclass(frozen=True)
class BorchersReport:
    scaling_residual: float
    reflection_residual: float
    spectrum_sign: int

    @property
    def max_residual(self):
        return max(self.scaling_residual, self.reflection_residual)


def borchers_check(h, translations, spectrum_sign=1,
                   t_samples=(0.5, 1.0, 2.0), s_samples=(-0.4, 0.25, 0.6),
                   tol=SUBSPACE_TOL):
    """Covariance of a half-sided translation semigroup with the modular flow.

    ``translations`` maps t to the (real form of the) unitary U(t); the
    semigroup must satisfy U(t) H inside H for t >= 0.  The report carries
    the worst residuals of Delta^{is} U(t) Delta^{-is} = U(e^{-sign 2 pi s} t)
    and of J U(t) J = U(-t).
    """
    for t in t_samples:
        if not contains_subspace(h, h.transform(translations(abs(t))), tol):
            raise ValueError(
                f"semigroup precondition fails: U({abs(t)}) H is not inside H"
            )
    _, m = modular_data(h)
    worst_scale = 0.0
    for s in s_samples:
        ds, dsi = m.delta_it(s), m.delta_it(-s)
        for t in t_samples:
            lhs = ds @ translations(t) @ dsi
            rhs = translations(math.exp(-spectrum_sign * _TWO_PI * s) * t)
            worst_scale = max(worst_scale,
                              float(np.linalg.norm(lhs - rhs, 2)))
    worst_flip = 0.0
    for t in t_samples:
        lhs = m.J @ translations(t) @ m.J
        worst_flip = max(worst_flip,
                         float(np.linalg.norm(lhs - translations(-t), 2)))
    return BorchersReport(worst_scale, worst_flip, spectrum_sign)


@dataclasses.dataclass(frozen=True)
class HsmiReport:
    inclusion_ok: bool
    first_violation: float | None
    commutation_residual: float
    pairs_checked: int

    def __bool__(self):
        return self.inclusion_ok


def hsmi_check(k, h, sign=1, t_samples=(0.05, 0.1, 0.2, 0.4),
               tol=SUBSPACE_TOL):
    """Half-sided modular inclusion test for standard K inside H.

    With sign=+1 the defining property is Delta_H^{-it} K inside K for
    t >= 0 (sign=-1 flips the half-line), and the two modular flows must
    satisfy the interval-dilation commutation law in modular parameters:
    Delta_H^{it} Delta_K^{is} = Delta_K^{is'} Delta_H^{it'}.
    """
    if not contains_subspace(h, k, tol):
        raise ValueError("K is not contained in H")
    _, mh = modular_data(h)
    _, mk = modular_data(k)
    first_violation = None
    for t in t_samples:
        moved = k.transform(mh.delta_it(-sign * t))
        if not contains_subspace(k, moved, tol):
            first_violation = sign * t
            break
    worst = 0.0
    pairs = 0
    for t in t_samples:
        for s in t_samples:
            te, se = sign * t, sign * s
            if sign > 0:
                arg = math.exp(-_TWO_PI * (te + se)) + 1.0 - math.exp(-_TWO_PI * te)
                if arg <= 0.0:
                    continue
                sp = -math.log(arg) / _TWO_PI
            else:
                arg = math.exp(_TWO_PI * (te + se)) + 1.0 - math.exp(_TWO_PI * te)
                if arg <= 0.0:
                    continue
                sp = math.log(arg) / _TWO_PI
            tp = te + se - sp
            lhs = mh.delta_it(te) @ mk.delta_it(se)
            rhs = mk.delta_it(sp) @ mh.delta_it(tp)
            worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
            pairs += 1
    return HsmiReport(first_violation is None, first_violation, worst, pairs)


@dataclasses.dataclass(frozen=True)
class SymmetryReport:
    s_residual: float
    delta_residual: float
    j_residual: float

    @property
    def max_residual(self):
        return max(self.s_residual, self.delta_residual, self.j_residual)


def symmetry_commutation_check(h, u, tol=SUBSPACE_TOL):
    """A unitary preserving H commutes with its whole modular family."""
    u = np.asarray(u, dtype=float)
    d = subspace_distance(h, h.transform(u))
    if d > tol:
        raise ValueError(f"U does not preserve H (subspace distance {d:.3e})")
    s_op, m = modular_data(h)
    delta_norm = float(np.linalg.norm(m.Delta, 2))
    return SymmetryReport(
        float(np.linalg.norm(u @ s_op @ u.T - s_op, 2)),
        float(np.linalg.norm(u @ m.Delta @ u.T - m.Delta, 2)) / delta_norm,
        float(np.linalg.norm(u @ m.J @ u.T - m.J, 2)),
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def subspace_to_dict(h):
    return {
        "n": h.parent.n,
        "rows": h.basis.shape[0],
        "cols": h.basis.shape[1],
        "data": [float(x) for x in h.basis.ravel(order="C")],
    }


def subspace_from_dict(data):
    parent = ComplexSpace(data["n"])
    basis = np.array(data["data"], dtype=float).reshape(
        data["rows"], data["cols"]
    )
    return RealSubspace(parent, basis)


def subspace_to_bytes(h):
    rows, cols = h.basis.shape
    head = struct.pack("<QQQ", h.parent.n, rows, cols)
    return head + np.ascontiguousarray(h.basis, dtype="<f8").tobytes()


def subspace_from_bytes(blob):
    n, rows, cols = struct.unpack_from("<QQQ", blob, 0)
    data = np.frombuffer(blob, dtype="<f8", offset=24, count=rows * cols)
    return RealSubspace(ComplexSpace(n), data.reshape(rows, cols))
