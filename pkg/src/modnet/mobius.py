"""Mobius group of the (compactified) line, its universal cover, and
interval dilation flows.

Elements of the Mobius group are kept as canonical-sign matrices in
SL(2, R) acting on the extended real line by fractional linear maps

    g . x = (a x + b) / (c x + d),        det = a d - b c = 1.

The circle picture is reached through the Cayley map

    C(x) = -(x - i) / (x + i),            C(0) = 1, C(1) = i, C(inf) = -1,

which identifies the extended line with the unit circle.  The universal
cover is parametrised by a base element together with a lifted rotation
angle ``phi`` (the Iwasawa angle tracked continuously), and the
two-dimensional group is the quotient of two cover copies by the deck
element (rho_{-2 pi}, rho_{2 pi}).
"""

from __future__ import annotations

import math

import numpy as np

INF = math.inf

#: tolerance for the unit-determinant invariant
DET_TOL = 1e-12
#: tolerance used by equality tests on canonical matrices
EQ_TOL = 1e-9
#: consistency tolerance between phi and the Iwasawa angle of the base
PHI_TOL = 1e-8
#: base number of samples when tracking the Iwasawa angle along a path
TRACK_SAMPLES = 64

_TWO_PI = 2.0 * math.pi

# complex matrix of the Cayley map and (projective) inverse
_CAYLEY = np.array([[-1.0, 1.0j], [1.0, 1.0j]])
_CAYLEY_INV = np.array([[1.0j, -1.0j], [-1.0, -1.0]])


class MobiusDomainError(ValueError):
    """Raised when parameters leave the admissible domain of an identity."""


def wrap_angle(u):
    """Reduce an angle to the interval (-pi, pi]."""
    v = math.fmod(u, _TWO_PI)
    if v > math.pi:
        v -= _TWO_PI
    elif v <= -math.pi:
        v += _TWO_PI
    return v


def cayley(x):
    """Cayley transform of an extended real number, as a point on S^1."""
    if x == INF or x == -INF:
        return complex(-1.0, 0.0)
    return -(x - 1j) / (x + 1j)


def cayley_inverse(z):
    """Inverse Cayley transform; the point -1 maps to infinity."""
    if abs(z + 1.0) < 1e-300:
        return INF
    return float((-1j * (z - 1.0) / (z + 1.0)).real)


def angle_of_point(x):
    """Circle angle of an extended real number, in (-pi, pi].

    Equals ``arg(cayley(x))``; computed as ``2*atan(x)``, monotone
    increasing in ``x`` with the two infinities pinned to +-pi.
    """
    if x == INF:
        return math.pi
    if x == -INF:
        return -math.pi
    return 2.0 * math.atan(x)


def point_of_angle(u):
    """Extended real number with the given circle angle."""
    v = wrap_angle(u)
    if abs(abs(v) - math.pi) < 1e-15:
        return INF
    return math.tan(0.5 * v)


def _canonical_sign(mat):
    """Flip the overall sign so the first nonzero of (a, b, c, d) is > 0.

    Entries below a relative threshold count as zero, so that roundoff
    in a structurally vanishing entry cannot flip the representative.
    """
    flat = (mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1])
    scale = max(abs(v) for v in flat)
    for v in flat:
        if abs(v) > 1e-8 * scale:
            if v < 0.0:
                return -mat
            return mat
    raise ValueError("zero matrix cannot represent a Mobius element")


class MobiusElement:
    """An element of the Mobius group PSL(2, R), stored canonically.

    Parameters
    ----------
    mat : array_like, shape (2, 2)
        Real matrix with positive determinant; it is rescaled to
        determinant one and sign-canonicalised.
    """

    __slots__ = ("mat",)

    def __init__(self, mat):
        m = np.asarray(mat, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        # the determinant of a near-unimodular matrix with large entries
        # cancels catastrophically in double precision; extended precision
        # keeps the rescaling meaningful up to entry sizes around 1e9
        ml = m.astype(np.longdouble)
        det = ml[0, 0] * ml[1, 1] - ml[0, 1] * ml[1, 0]
        if not np.isfinite(det) or det <= 0.0:
            scale2 = float(np.max(np.abs(m))) ** 2
            if np.isfinite(det) and abs(det) < 64.0 * scale2 * 2.3e-16:
                raise ValueError(
                    "matrix is numerically singular: entries of size ~%.1e "
                    "with a unit determinant exhaust double precision"
                    % np.max(np.abs(m))
                )
            raise ValueError("matrix must have positive determinant")
        m = np.asarray(ml / np.sqrt(det), dtype=float)
        self.mat = _canonical_sign(m)
        self.mat.setflags(write=False)

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls):
        return cls(np.eye(2))

    @classmethod
    def rotation(cls, theta):
        """Rotation by ``theta`` in the circle picture."""
        if not math.isfinite(theta):
            raise ValueError("rotation parameter must be finite")
        c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
        return cls(np.array([[c, s], [-s, c]]))

    @classmethod
    def dilation(cls, s):
        """The map x -> exp(s) x."""
        if not math.isfinite(s):
            raise ValueError("dilation parameter must be finite")
        e = math.exp(0.5 * s)
        return cls(np.array([[e, 0.0], [0.0, 1.0 / e]]))

    @classmethod
    def translation(cls, t):
        """The map x -> x + t."""
        if not math.isfinite(t):
            raise ValueError("translation parameter must be finite")
        return cls(np.array([[1.0, t], [0.0, 1.0]]))

    # -- group structure ----------------------------------------------

    def compose(self, other):
        return MobiusElement(self.mat @ other.mat)

    __matmul__ = compose

    def inverse(self):
        a, b, c, d = self.mat.ravel()
        return MobiusElement(np.array([[d, -b], [-c, a]]))

    def __eq__(self, other):
        if not isinstance(other, MobiusElement):
            return NotImplemented
        d = min(np.max(np.abs(self.mat - other.mat)),
                np.max(np.abs(self.mat + other.mat)))
        return bool(d < EQ_TOL)

    def __hash__(self):  # canonical matrices are not reliable hash keys
        raise TypeError("MobiusElement is not hashable")

    def __repr__(self):
        a, b, c, d = self.mat.ravel()
        return f"MobiusElement([[{a:.6g}, {b:.6g}], [{c:.6g}, {d:.6g}]])"

    # -- predicates ----------------------------------------------------

    def is_identity(self, tol=EQ_TOL):
        d = min(np.max(np.abs(self.mat - np.eye(2))),
                np.max(np.abs(self.mat + np.eye(2))))
        return bool(d < tol)

    def is_rotation(self, tol=1e-12):
        a, b, c, d = self.mat.ravel()
        return abs(a - d) <= tol and abs(b + c) <= tol

    def fixes_infinity(self, tol=1e-12):
        return abs(self.mat[1, 0]) <= tol

    # -- actions --------------------------------------------------------

    def act_line(self, x):
        """Fractional linear action on the extended real line."""
        a, b, c, d = self.mat.ravel()
        if x == INF or x == -INF:
            if abs(c) < 1e-300:
                return INF
            return a / c
        num = a * x + b
        den = c * x + d
        if den == 0.0:
            return INF
        # rescale for stability when |x| is very large
        if abs(x) > 1.0:
            num = a + b / x
            den = c + d / x
            if den == 0.0:
                return INF
        return num / den

    def act_circle(self, z):
        """Action on the unit circle (complex points of modulus one)."""
        m = _CAYLEY @ self.mat.astype(complex) @ _CAYLEY_INV
        den = m[1, 0] * z + m[1, 1]
        num = m[0, 0] * z + m[0, 1]
        w = num / den
        return w / abs(w)

    def act_angle(self, u):
        """Action on circle angles, result in (-pi, pi]."""
        z = self.act_circle(complex(math.cos(u), math.sin(u)))
        return math.atan2(z.imag, z.real)

    # -- Iwasawa decomposition -----------------------------------------

    def iwasawa(self):
        """Decompose as K(theta) A(a) N(n); returns ``(theta, a, n)``.

        ``theta`` lies in (-pi, pi] and ``K(theta) A(a) N(n)`` reproduces
        the element (as a projective matrix) to high accuracy.
        """
        a0, b0, c0, d0 = self.mat.ravel()
        r = math.hypot(a0, c0)
        theta = 2.0 * math.atan2(-c0, a0)
        if theta > math.pi:
            theta -= _TWO_PI
        elif theta <= -math.pi:
            theta += _TWO_PI
        # R = K(theta)^-1 g is upper triangular with R00 = r > 0
        ch, sh = math.cos(0.5 * theta), math.sin(0.5 * theta)
        r01 = ch * b0 - sh * d0
        a_par = 2.0 * math.log(r)
        n_par = r01 / r
        return theta, a_par, n_par


def kan_matrix(theta, a, n):
    """Matrix of K(theta) A(a) N(n)."""
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    e = math.exp(0.5 * a)
    # A(a) N(n) = [[e, e*n], [0, 1/e]]
    return np.array([[c * e, c * e * n + s / e], [-s * e, -s * e * n + c / e]])


def _theta_mod_2pi(mat):
    """Iwasawa angle mod 2 pi of an (un-normalised) positive-det matrix."""
    m = _canonical_sign(mat)
    return 2.0 * math.atan2(-m[1, 0], m[0, 0])


class CoverElement:
    """Element of the universal cover: a base element plus a lifted angle.

    ``phi`` reduces, modulo 2 pi, to the Iwasawa angle of the base
    element; distinct choices of ``phi`` differing by 2 pi k describe the
    k-th deck translate.
    """

    __slots__ = ("base", "phi")

    def __init__(self, base, phi, check=True):
        self.base = base
        self.phi = float(phi)
        if check:
            theta = base.iwasawa()[0]
            d = wrap_angle(self.phi - theta)
            if min(abs(d), abs(abs(d) - _TWO_PI)) > PHI_TOL:
                raise ValueError(
                    "phi = %r is not a lift of the Iwasawa angle %r" % (phi, theta)
                )

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls):
        return cls(MobiusElement.identity(), 0.0, check=False)

    @classmethod
    def from_base(cls, base):
        """The lift with phi in (-pi, pi]."""
        return cls(base, base.iwasawa()[0], check=False)

    @classmethod
    def rotation(cls, t):
        """Lifted rotation; phi equals the parameter itself."""
        return cls(MobiusElement.rotation(t), t, check=False)

    @classmethod
    def dilation(cls, s):
        return cls(MobiusElement.dilation(s), 0.0, check=False)

    @classmethod
    def translation(cls, t):
        return cls(MobiusElement.translation(t), 0.0, check=False)

    # -- group structure ----------------------------------------------

    def compose(self, other):
        """Product in the cover; the winding of phi is tracked numerically."""
        if self.base.is_rotation() and other.base.is_rotation():
            return CoverElement(
                self.base.compose(other.base), self.phi + other.phi, check=False
            )
        theta_h, a_h, n_h = other.base.iwasawa()
        m = round((other.phi - theta_h) / _TWO_PI)
        phi = _track_phi(self.base.mat, self.phi, theta_h, a_h, n_h)
        phi += _TWO_PI * m
        return CoverElement(self.base.compose(other.base), phi, check=False)

    __matmul__ = compose

    def inverse(self):
        base_inv = self.base.inverse()
        lift = CoverElement.from_base(base_inv)
        p0 = self.compose(lift).phi
        return CoverElement(base_inv, lift.phi - _TWO_PI * round(p0 / _TWO_PI),
                            check=False)

    def project(self):
        return self.base

    def __eq__(self, other):
        if not isinstance(other, CoverElement):
            return NotImplemented
        return self.base == other.base and abs(self.phi - other.phi) < 1e-7

    def __hash__(self):
        raise TypeError("CoverElement is not hashable")

    def __repr__(self):
        return f"CoverElement({self.base!r}, phi={self.phi:.6g})"

    def is_identity(self, tol=EQ_TOL):
        return self.base.is_identity(tol) and abs(self.phi) < 1e-7

    # -- lifted circle action ------------------------------------------

    def act_lifted(self, u):
        """Action on the universal cover of the circle (lifted angles).

        The lift is pinned by two requirements: lifted rotations act as
        ``u -> u + t``, and the contractible subgroup fixing infinity
        preserves each fundamental interval (pi + 2 pi (k-1), pi + 2 pi k].
        """
        _, a, n = self.base.iwasawa()
        k = round(u / _TWO_PI)
        v = u - _TWO_PI * k
        if v <= -math.pi:
            v += _TWO_PI
            k -= 1
        elif v > math.pi:
            v -= _TWO_PI
            k += 1
        if abs(v - math.pi) < 1e-14:
            res = math.pi
        else:
            x = point_of_angle(v)
            e = math.exp(a)
            y = e * x + e * n  # affine action of A(a) N(n)
            res = angle_of_point(y)
        return self.phi + res + _TWO_PI * k


def _track_phi(g_mat, phi0, theta_h, a_h, n_h):
    """Track the Iwasawa angle of g * K(tau theta) A(tau a) N(tau n).

    Starts from ``phi0`` (a lift of the angle of g) and unwraps the angle
    continuously along tau in [0, 1], bisecting adaptively whenever a
    step is too large to unwrap unambiguously.
    """

    def theta_at(tau):
        return _theta_mod_2pi(g_mat @ kan_matrix(tau * theta_h, tau * a_h, tau * n_h))

    def advance(c0, t0, t1, th1, depth):
        d = wrap_angle(th1 - c0)
        if abs(d) <= 0.5 * math.pi or depth >= 40:
            return c0 + d
        tm = 0.5 * (t0 + t1)
        cm = advance(c0, t0, tm, theta_at(tm), depth + 1)
        return advance(cm, tm, t1, th1, depth + 1)

    c = phi0
    prev = 0.0
    for j in range(1, TRACK_SAMPLES + 1):
        tau = j / TRACK_SAMPLES
        c = advance(c, prev, tau, theta_at(tau), 0)
        prev = tau
    return c


# ---------------------------------------------------------------------------
# intervals of the extended line / arcs of the circle
# ---------------------------------------------------------------------------


class Interval:
    """A nonempty, nondense open arc of the circle.

    Stored as a pair of angles ``lo < hi`` with ``hi - lo < 2 pi``; the
    arc runs counterclockwise from ``lo`` to ``hi``.  In the line picture
    the left endpoint is the one reached first when traversing the
    interval in the direction of increasing angle.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("angles must be finite")
        if not (lo < hi < lo + _TWO_PI):
            raise ValueError("need lo < hi < lo + 2 pi")
        self.lo = float(lo)
        self.hi = float(hi)

    @classmethod
    def from_line(cls, a, b):
        """Interval of the extended line from a to b (counterclockwise).

        ``from_line(0, 1)`` is the open unit interval, ``from_line(0, inf)``
        the positive half-line, ``from_line(-inf, 0)`` the negative one;
        ``from_line(1, -1)`` is the arc through infinity.
        """
        lo = angle_of_point(a)
        if a == -INF:
            lo = -math.pi
        hi = angle_of_point(b)
        while hi <= lo:
            hi += _TWO_PI
        return cls(lo, hi)

    @classmethod
    def from_circle(cls, lo, hi):
        h = hi
        while h <= lo:
            h += _TWO_PI
        while h > lo + _TWO_PI:
            h -= _TWO_PI
        return cls(lo, h)

    # -- endpoints ------------------------------------------------------

    @property
    def left(self):
        """Left endpoint in the line picture (may be +-inf)."""
        u = wrap_angle(self.lo)
        if abs(u - math.pi) < 1e-15 and self.lo < self.hi:
            # the arc leaves the point at angle pi moving counterclockwise,
            # entering the line from -inf
            return -INF
        return point_of_angle(u)

    @property
    def right(self):
        u = wrap_angle(self.hi)
        if abs(u - math.pi) < 1e-15:
            return INF
        return point_of_angle(u)

    def midpoint(self):
        """The line point at the angular midpoint of the arc."""
        return point_of_angle(wrap_angle(0.5 * (self.lo + self.hi)))

    def length_angle(self):
        return self.hi - self.lo

    # -- predicates -----------------------------------------------------

    def contains_point(self, x):
        u = angle_of_point(x)
        for shift in (0.0, _TWO_PI, -_TWO_PI):
            if self.lo < u + shift < self.hi:
                return True
        return False

    def contains(self, other, tol=1e-12):
        for shift in (0.0, _TWO_PI, -_TWO_PI):
            if (other.lo + shift >= self.lo - tol
                    and other.hi + shift <= self.hi + tol):
                return True
        return False

    def complement(self):
        """The complementary arc."""
        return Interval(self.hi, self.lo + _TWO_PI)

    def transform(self, g):
        """Image under a Mobius element (an arc again)."""
        lo = g.act_angle(wrap_angle(self.lo))
        hi = g.act_angle(wrap_angle(self.hi))
        return Interval.from_circle(lo, hi)

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        if abs(self.length_angle() - other.length_angle()) > 1e-9:
            return False
        d = wrap_angle(self.lo - other.lo)
        return abs(d) < 1e-9 or abs(abs(d) - _TWO_PI) < 1e-9

    def __hash__(self):
        raise TypeError("Interval is not hashable")

    def __repr__(self):
        return f"Interval(line=({self.left!r}, {self.right!r}))"


def mobius_through(p0, p1, pinf):
    """The Mobius element sending 0, 1, inf to the given ordered triple.

    The triple must be counterclockwise on the circle, which makes the
    constructed matrix orientation preserving.
    """
    if pinf == INF or pinf == -INF:
        mat = np.array([[p1 - p0, p0], [0.0, 1.0]])
    elif p0 == INF or p0 == -INF:
        mat = np.array([[pinf, p1 - pinf], [1.0, 0.0]])
    elif p1 == INF or p1 == -INF:
        mat = np.array([[pinf, -p0], [1.0, -1.0]])
    else:
        mat = np.array(
            [[pinf * (p1 - p0), p0 * (pinf - p1)], [p1 - p0, pinf - p1]]
        )
    return MobiusElement(mat)


def dilation_conjugator(interval, third=None):
    """A Mobius element g with g(R_+) = interval.

    Sends 0 to the left endpoint, infinity to the right endpoint and 1 to
    ``third`` (the angular midpoint when omitted).  Different choices of
    ``third`` inside the interval give the same conjugated dilation flow.
    """
    mid = interval.midpoint() if third is None else third
    return mobius_through(interval.left, mid, interval.right)


def interval_dilation(interval, t, third=None):
    """The dilation flow of an interval at time ``t``, as a cover element.

    Defined as g delta(-t) g^{-1} for any g taking the positive half-line
    onto the interval; for the half-lines this reduces to
    Lambda_{R_+}(t) = delta(-t) and Lambda_{R_-}(t) = delta(t).
    """
    g = CoverElement.from_base(dilation_conjugator(interval, third))
    return g.compose(CoverElement.dilation(-t)).compose(g.inverse())


def _interval_dilation_mat(interval, t):
    """Matrix-only fast path for :func:`interval_dilation`."""
    g = dilation_conjugator(interval).mat
    e = math.exp(-0.5 * t)
    d = np.array([[e, 0.0], [0.0, 1.0 / e]])
    gi = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])
    return MobiusElement(g @ d @ gi)


# ---------------------------------------------------------------------------
# commutation relations between nested interval dilations
# ---------------------------------------------------------------------------

#: interval pairs for which the parameter transformation is implemented:
#: ``halfline_bounded`` is (R_+, (0,1)) (endpoint shared on the left),
#: ``halfline_shifted`` is (R_+, R_+ + 1) (endpoint shared on the right).
COMMUTATION_PAIRS = ("halfline_bounded", "halfline_shifted")


def commutation_parameters(t, s, pair):
    """Parameters (s', t') with Lambda_I(t) Lambda_J(s) = Lambda_J(s') Lambda_I(t').

    Raises :class:`MobiusDomainError` outside the admissible domain.
    """
    if pair == "halfline_bounded":
        arg = math.exp(t + s) + 1.0 - math.exp(t)
        if arg <= 0.0:
            raise MobiusDomainError(
                "inadmissible parameters for the (R_+, (0,1)) relation"
            )
        s_p = math.log(arg)
    elif pair == "halfline_shifted":
        arg = math.exp(-t - s) + 1.0 - math.exp(-t)
        if arg <= 0.0:
            raise MobiusDomainError(
                "inadmissible parameters for the (R_+, R_+ + 1) relation"
            )
        s_p = -math.log(arg)
    else:
        raise ValueError(f"unknown pair {pair!r}")
    return s_p, t + s - s_p


_PAIR_INTERVALS = {
    "halfline_bounded": (lambda: Interval.from_line(0.0, INF),
                         lambda: Interval.from_line(0.0, 1.0)),
    "halfline_shifted": (lambda: Interval.from_line(0.0, INF),
                         lambda: Interval.from_line(1.0, INF)),
}


def commutation_residual(t, s, pair):
    """Matrix norm of (LHS - RHS) of the commutation relation.

    LHS is Lambda_I(t) Lambda_J(s) and RHS uses the transformed
    parameters from :func:`commutation_parameters`.
    """
    s_p, t_p = commutation_parameters(t, s, pair)
    mk_i, mk_j = _PAIR_INTERVALS[pair]
    big, small = mk_i(), mk_j()
    lhs = _interval_dilation_mat(big, t).mat @ _interval_dilation_mat(small, s).mat
    rhs = _interval_dilation_mat(small, s_p).mat @ _interval_dilation_mat(big, t_p).mat
    lhs = _canonical_sign(lhs)
    rhs = _canonical_sign(rhs)
    return float(np.linalg.norm(lhs - rhs))


def shared_endpoint_kind(big, small, tol=1e-9):
    """Classify a nested pair sharing exactly one endpoint.

    Returns ``"left"`` or ``"right"`` according to which endpoint (in arc
    orientation) is shared; raises ValueError otherwise.
    """
    if not big.contains(small):
        raise ValueError("pair is not nested")
    dlo = abs(wrap_angle(big.lo - small.lo))
    dhi = abs(wrap_angle(big.hi - small.hi))
    if dlo < tol and dhi >= tol:
        return "left"
    if dhi < tol and dlo >= tol:
        return "right"
    raise ValueError("pair must share exactly one endpoint")


def nested_commutation_parameters(big, small, t, s):
    """Parameter transformation for a general nested shared-endpoint pair.

    Conjugation carries any such pair onto one of the two implemented
    model pairs without rescaling the flow parameters, so only the kind
    of the shared endpoint matters.
    """
    kind = shared_endpoint_kind(big, small)
    pair = "halfline_bounded" if kind == "left" else "halfline_shifted"
    return commutation_parameters(t, s, pair)


# ---------------------------------------------------------------------------
# the two-dimensional group
# ---------------------------------------------------------------------------


class GElement:
    """Element of the two-dimensional Mobius group.

    A pair of cover elements modulo the deck identification
    ``(g rho_{-2 pi}, h rho_{2 pi}) ~ (g, h)``; the canonical form places
    ``left.phi`` in [0, 2 pi), transferring whole turns to the right
    factor.
    """

    __slots__ = ("left", "right")

    def __init__(self, left, right):
        k = math.floor(left.phi / _TWO_PI)
        self.left = CoverElement(left.base, left.phi - _TWO_PI * k, check=False)
        self.right = CoverElement(right.base, right.phi + _TWO_PI * k, check=False)

    @classmethod
    def identity(cls):
        return cls(CoverElement.identity(), CoverElement.identity())

    def compose(self, other):
        return GElement(self.left.compose(other.left),
                        self.right.compose(other.right))

    __matmul__ = compose

    def inverse(self):
        return GElement(self.left.inverse(), self.right.inverse())

    def act_cylinder(self, u_left, u_right):
        """Action on a point of the cylinder cover, in lifted lightray angles."""
        return self.left.act_lifted(u_left), self.right.act_lifted(u_right)

    def __eq__(self, other):
        if not isinstance(other, GElement):
            return NotImplemented
        return self.left == other.left and self.right == other.right

    def __hash__(self):
        raise TypeError("GElement is not hashable")

    def __repr__(self):
        return f"GElement(left={self.left!r}, right={self.right!r})"


def to_G(left, right):
    """Quotient a pair of cover elements to the two-dimensional group."""
    return GElement(left, right)
