"""Grid realizations of the one-particle representations.

Chiral fibers live on log-momentum grids (so dilations are exact weighted
shifts), massive fibers on periodic rapidity grids (so boosts are exact
cyclic shifts); translations are diagonal phase multiplications in either
picture.  All shift actions carry the quadrature-weight Jacobian
sqrt(w_src / w_dst) per slot, which makes them exactly unitary for the
grid inner product -- including the wrap-around slots, whose contribution
is quantified separately by :func:`boundary_leakage`.
"""

from __future__ import annotations

import dataclasses
import math
import struct
from typing import Mapping

import numpy as np

from .mobius import CoverElement, GElement, MobiusElement

UNITARITY_TOL = 1e-10
GROUP_LAW_TOL = 1e-10
CHARGE_COMMUTATION_TOL = 1e-12
AFFINE_TOL = 1e-12
STEP_TOL = 1e-9

_SQRT2 = math.sqrt(2.0)


class ChiralGrid:
    """Log-spaced momentum grid for L^2(R_+, p dp).

    Points u_j = u0 + j h carry momenta p_j = e^{u_j} and quadrature
    weights w_j = p_j^2 h (the measure p dp in log coordinates).
    """

    __slots__ = ("n", "h", "u0", "points", "momenta", "weights")

    def __init__(self, n, h, u0):
        if n < 2:
            raise ValueError("grid needs at least 2 points")
        if h <= 0:
            raise ValueError("grid spacing must be positive")
        self.n = int(n)
        self.h = float(h)
        self.u0 = float(u0)
        self.points = self.u0 + self.h * np.arange(self.n)
        self.momenta = np.exp(self.points)
        self.weights = self.momenta**2 * self.h

    def inner(self, x, y):
        return complex(np.sum(self.weights * np.conj(x) * y))

    def norm(self, x):
        return math.sqrt(max(self.inner(x, x).real, 0.0))

    def __repr__(self):
        return f"ChiralGrid(n={self.n}, h={self.h}, u0={self.u0})"


class RapidityGrid:
    """Periodic rapidity grid for a mass-m fiber L^2(R, dp1 / 2 omega).

    theta_j = theta0 + j h with p1 = m sinh(theta), omega = m cosh(theta);
    the measure dp1/(2 omega) becomes d(theta)/2, so all weights are h/2.
    """

    __slots__ = ("n", "h", "theta0", "mass", "theta", "p1", "omega", "weights")

    def __init__(self, n, h, theta0, mass):
        if n < 2 or n % 2:
            raise ValueError("rapidity grid size must be even and >= 2")
        if h <= 0:
            raise ValueError("grid spacing must be positive")
        if mass <= 0:
            raise ValueError("mass must be positive")
        self.n = int(n)
        self.h = float(h)
        self.theta0 = float(theta0)
        self.mass = float(mass)
        self.theta = self.theta0 + self.h * np.arange(self.n)
        self.p1 = self.mass * np.sinh(self.theta)
        self.omega = self.mass * np.cosh(self.theta)
        self.weights = np.full(self.n, self.h / 2.0)

    def lightray_momenta(self):
        """(p_L, p_R) = (m e^{theta}, m e^{-theta}) / sqrt(2)."""
        p_l = self.mass * np.exp(self.theta) / _SQRT2
        p_r = self.mass * np.exp(-self.theta) / _SQRT2
        return p_l, p_r

    def inner(self, x, y):
        return complex(np.sum(self.weights * np.conj(x) * y))

    def __repr__(self):
        return (f"RapidityGrid(n={self.n}, h={self.h}, "
                f"theta0={self.theta0}, mass={self.mass})")


@dataclasses.dataclass(frozen=True)
class InnerSymmetryCharge:
    """One-parameter inner symmetry V(s) = e^{i s q} on every fiber."""

    q: float

    def phase(self, s):
        return complex(np.exp(1j * self.q * s))


KINDS = ("chiral", "massive", "productChiralSum", "productChiralTensor",
         "directIntegral")


class LatticeRep:
    """A grid-realized unitary representation of (a subgroup of) G.

    The implemented subgroup is generated by arbitrary lightray
    translations together with dilations/boosts whose parameters are
    integer multiples of the grid spacings.  ``apply`` realizes group
    elements; everything is immutable and pure.
    """

    __slots__ = ("kind", "grids", "mass_weights", "mass_spacing",
                 "twist_charge")

    def __init__(self, kind, grids, mass_weights=None, mass_spacing=None,
                 twist_charge=0.0):
        if kind not in KINDS:
            raise ValueError(f"unknown representation kind {kind!r}")
        self.kind = kind
        self.grids = tuple(grids)
        self.mass_weights = mass_weights
        self.mass_spacing = mass_spacing
        self.twist_charge = float(twist_charge)

    # -- geometry ----------------------------------------------------------

    @property
    def shape(self):
        if self.kind == "chiral":
            return (self.grids[0].n,)
        if self.kind == "massive":
            return (self.grids[0].n,)
        if self.kind == "productChiralSum":
            return (self.grids[0].n + self.grids[1].n,)
        if self.kind == "productChiralTensor":
            return (self.grids[0].n, self.grids[1].n)
        return (len(self.grids), self.grids[0].n)

    def weight_array(self):
        """Quadrature weights, shaped like the vectors."""
        if self.kind in ("chiral", "massive"):
            return self.grids[0].weights
        if self.kind == "productChiralSum":
            return np.concatenate([self.grids[0].weights,
                                   self.grids[1].weights])
        if self.kind == "productChiralTensor":
            return np.outer(self.grids[0].weights, self.grids[1].weights)
        theta_w = self.grids[0].weights
        return self.mass_weights[:, None] * theta_w[None, :]

    def inner(self, x, y):
        return complex(np.sum(self.weight_array() * np.conj(x) * y))

    def norm(self, x):
        return math.sqrt(max(self.inner(x, x).real, 0.0))

    def random_vector(self, rng):
        re = rng.normal(size=self.shape)
        im = rng.normal(size=self.shape)
        return re + 1j * im

    def apply(self, g, xi):
        return apply(self, g, xi)

    def __repr__(self):
        return f"LatticeRep(kind={self.kind!r}, shape={self.shape})"


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _chiral_grid(params):
    return ChiralGrid(params["n"], params["h"], params["u0"])


def build_rep(params: Mapping) -> LatticeRep:
    """Build a lattice representation from a configuration mapping.

    Recognized kinds: chiral {n, h, u0}; massive {n, h, theta0, mass};
    productChiralSum / productChiralTensor {left, right}; directIntegral
    {mass_min, mass_max, mass_count, theta: {n, h, theta0},
    spacing: "uniform" | "geometric"}.
    """
    kind = params.get("kind")
    if kind == "chiral":
        return LatticeRep(kind, (_chiral_grid(params),))
    if kind == "massive":
        grid = RapidityGrid(params["n"], params["h"], params["theta0"],
                            params["mass"])
        return LatticeRep(kind, (grid,))
    if kind in ("productChiralSum", "productChiralTensor"):
        return LatticeRep(kind, (_chiral_grid(params["left"]),
                                 _chiral_grid(params["right"])))
    if kind == "directIntegral":
        count = int(params["mass_count"])
        lo, hi = float(params["mass_min"]), float(params["mass_max"])
        if not 0 < lo < hi:
            raise ValueError("mass window must satisfy 0 < mass_min < mass_max")
        if count < 1:
            raise ValueError("need at least one mass")
        spacing = params.get("spacing", "uniform")
        if spacing == "uniform":
            # midpoint masses; d(mu) = dm/4 makes the product
            # identification with its factor 2 an exact isometry
            dm = (hi - lo) / count
            masses = lo + dm * (np.arange(count) + 0.5)
            mass_weights = masses**3 * (dm / 4.0)
        elif spacing == "geometric":
            hm = (math.log(hi) - math.log(lo)) / count
            masses = np.exp(math.log(lo) + hm * (np.arange(count) + 0.5))
            mass_weights = masses**3 * (masses * hm / 4.0)
        else:
            raise ValueError(f"unknown mass spacing {spacing!r}")
        if np.unique(masses).size != masses.size:
            raise ValueError("masses must be distinct")
        t = params["theta"]
        grids = tuple(RapidityGrid(t["n"], t["h"], t["theta0"], m)
                      for m in masses)
        return LatticeRep(kind, grids, mass_weights=mass_weights,
                          mass_spacing=spacing)
    raise ValueError(f"unknown representation kind {kind!r}")


# ---------------------------------------------------------------------------
# group elements: affine data extraction
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class _Affine:
    """One factor of the translation-dilation subgroup: x -> e^sigma x + t."""

    t: float
    sigma: float


def _affine_of(element, side=""):
    if isinstance(element, CoverElement):
        element = element.base
    if not isinstance(element, MobiusElement):
        raise TypeError(f"expected a group element, got {type(element)!r}")
    m = element.mat
    scale = np.max(np.abs(m))
    if abs(m[1, 0]) > AFFINE_TOL * scale:
        where = f"{side} factor " if side else ""
        raise ValueError(
            f"{where}has a rotation/special-conformal part; only the "
            "translation-dilation subgroup acts on a momentum lattice"
        )
    a, b = float(m[0, 0]), float(m[0, 1])
    if a <= 0:
        a, b = -a, -b
    return _Affine(t=a * b, sigma=2.0 * math.log(a))


def _shift_steps(sigma, h, what):
    steps = sigma / h
    k = round(steps)
    if abs(steps - k) > STEP_TOL:
        raise ValueError(
            f"{what} parameter {sigma:.6g} is not an integer multiple "
            f"of the grid spacing {h:.6g}"
        )
    return int(k)


def _pair_of(g):
    if isinstance(g, GElement):
        return _affine_of(g.left, "left"), _affine_of(g.right, "right")
    raise TypeError(
        "two-dimensional representations act through paired elements; "
        f"got {type(g)!r}"
    )


# ---------------------------------------------------------------------------
# elementary actions
# ---------------------------------------------------------------------------


def _weighted_shift(weights, xi, k, axis=0):
    """Cyclic shift by k source slots with the exact measure Jacobian."""
    if k == 0:
        return xi.copy()
    src = np.roll(np.arange(weights.size), -k)
    jac = np.sqrt(weights[src] / weights)
    out = np.take(xi, src, axis=axis)
    shape = [1] * out.ndim
    shape[axis] = weights.size
    return out * jac.reshape(shape)


def _chiral_factor_action(grid, aff, xi, axis=0):
    k = _shift_steps(aff.sigma, grid.h, "dilation")
    out = _weighted_shift(grid.weights, xi, k, axis=axis)
    phase = np.exp(1j * aff.t * grid.momenta)
    shape = [1] * out.ndim
    shape[axis] = grid.n
    return out * phase.reshape(shape)


def _massive_fiber_action(grid, t_l, t_r, boost, xi):
    k = _shift_steps(boost, grid.h, "boost")
    out = np.roll(xi, k, axis=-1) if k else xi.copy()
    p_l, p_r = grid.lightray_momenta()
    return out * np.exp(1j * (t_l * p_l + t_r * p_r))


def apply(rep: LatticeRep, g, xi):
    """Act with a group element (or ``"j"``) on a vector.

    ``g`` may be a MobiusElement/CoverElement (chiral kind), a GElement
    (all two-dimensional kinds), or the string ``"j"`` for the antiunitary
    reflection, which is componentwise complex conjugation in every
    momentum picture here.
    """
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != rep.shape:
        raise ValueError(f"vector shape {xi.shape} != rep shape {rep.shape}")
    if isinstance(g, str):
        if g == "j":
            return np.conj(xi)
        raise ValueError(f"unknown symbolic element {g!r}")

    if rep.kind == "chiral":
        if isinstance(g, GElement):
            raise TypeError(
                "a chiral fiber implements a single translation-dilation "
                "factor; got a paired element"
            )
        aff = _affine_of(g)
        out = _chiral_factor_action(rep.grids[0], aff, xi)
        return _twist_phase(rep, aff.sigma) * out

    left, right = _pair_of(g)
    twist = _twist_phase(rep, (left.sigma + right.sigma) / 2.0)

    if rep.kind == "productChiralSum":
        gl, gr = rep.grids
        out = np.empty_like(xi)
        out[:gl.n] = _chiral_factor_action(gl, left, xi[:gl.n])
        out[gl.n:] = _chiral_factor_action(gr, right, xi[gl.n:])
        return twist * out

    if rep.kind == "productChiralTensor":
        out = _chiral_factor_action(rep.grids[0], left, xi, axis=0)
        out = _chiral_factor_action(rep.grids[1], right, out, axis=1)
        return twist * out

    # massive kinds: split delta(s_L) x delta(s_R) into a boost
    # (antisymmetric part) and an overall dilation (symmetric part)
    boost = (right.sigma - left.sigma) / 2.0
    dilation = (right.sigma + left.sigma) / 2.0

    if rep.kind == "massive":
        if abs(dilation) > AFFINE_TOL:
            raise ValueError(
                "overall dilation component not implementable on a "
                "fixed-mass fiber"
            )
        out = _massive_fiber_action(rep.grids[0], left.t, right.t, boost, xi)
        return twist * out

    out = np.empty_like(xi)
    for i, grid in enumerate(rep.grids):
        out[i] = _massive_fiber_action(grid, left.t, right.t, boost, xi[i])
    if abs(dilation) > AFFINE_TOL:
        if rep.mass_spacing != "geometric" or len(rep.grids) < 2:
            raise ValueError(
                "overall dilation component not implementable on a "
                "uniformly spaced mass family"
            )
        hm = math.log(rep.grids[1].mass / rep.grids[0].mass)
        k = _shift_steps(dilation, hm, "dilation")
        out = _weighted_shift(rep.mass_weights, out, k, axis=0)
    return twist * out


def _twist_phase(rep, dilation_parameter):
    if rep.twist_charge == 0.0:
        return 1.0
    return complex(np.exp(1j * rep.twist_charge * dilation_parameter))


# ---------------------------------------------------------------------------
# inner symmetry and twisting
# ---------------------------------------------------------------------------


def charge_commutation_deviation(rep, charge, g_samples, rng):
    """Worst norm of [U(g), V(s)] xi over the given elements."""
    worst = 0.0
    for g in g_samples:
        xi = rep.random_vector(rng)
        s = float(rng.uniform(-2.0, 2.0))
        v = charge.phase(s)
        a = apply(rep, g, v * xi)
        b = v * apply(rep, g, xi)
        worst = max(worst, rep.norm(a - b) / rep.norm(xi))
    return worst


def twist(rep: LatticeRep, charge: InnerSymmetryCharge) -> LatticeRep:
    """Deform the rep by the inner symmetry along the dilation direction.

    The Poincare subgroup is untouched; a group element whose overall
    dilation parameter is sigma acquires the extra phase e^{i q sigma}.
    The result is again an exact representation because overall dilation
    parameters add under composition.
    """
    return LatticeRep(rep.kind, rep.grids, mass_weights=rep.mass_weights,
                      mass_spacing=rep.mass_spacing,
                      twist_charge=rep.twist_charge + charge.q)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------


def central_support_mask(rep):
    """Boolean array marking the central half along wrap-prone axes.

    Vectors supported here see no wrap-around under moderate shifts, so
    on them the cyclic actions agree with the continuum formulas; this
    is the support requirement for every approximate-model test vector.
    """

    def inner_mask(n):
        m = np.zeros(n, dtype=bool)
        m[n // 4:(3 * n) // 4] = True
        return m

    if rep.kind in ("chiral", "massive"):
        return inner_mask(rep.grids[0].n)
    if rep.kind == "productChiralSum":
        gl, gr = rep.grids
        return np.concatenate([inner_mask(gl.n), inner_mask(gr.n)])
    if rep.kind == "productChiralTensor":
        return (inner_mask(rep.grids[0].n)[:, None]
                & inner_mask(rep.grids[1].n)[None, :])
    mask = np.broadcast_to(inner_mask(rep.grids[0].n)[None, :],
                           rep.shape).copy()
    if rep.mass_spacing == "geometric":
        mask &= inner_mask(len(rep.grids))[:, None]
    return mask


def boundary_leakage(rep, xi):
    """Norm fraction outside the central half along wrap-prone axes.

    Shift actions are exactly unitary but wrap cyclically; a vector with
    mass near the grid boundary sees unphysical wrap-around, so every
    approximate-model check should report this number alongside.
    """
    xi = np.asarray(xi, dtype=complex)
    w = rep.weight_array()
    total = float(np.sum(w * np.abs(xi) ** 2))
    if total == 0.0:
        return 0.0
    leaked = float(np.sum((w * np.abs(xi) ** 2)[~central_support_mask(rep)]))
    return math.sqrt(leaked / total)


def unitarity_deviation(rep, g, rng, samples=5):
    """max_i | ||U(g) xi_i|| - ||xi_i|| | / ||xi_i|| on random vectors."""
    worst = 0.0
    for _ in range(samples):
        xi = rep.random_vector(rng)
        worst = max(worst,
                    abs(rep.norm(apply(rep, g, xi)) - rep.norm(xi))
                    / rep.norm(xi))
    return worst


def translation_spectrum(rep):
    """Joint spectrum of the translation generators, as point arrays.

    Chiral kinds return lightray momentum coordinates; massive kinds
    return (omega, p1) points on their mass shells.
    """
    if rep.kind == "chiral":
        return (rep.grids[0].momenta.copy(),)
    if rep.kind == "productChiralSum":
        gl, gr = rep.grids
        zero_l = np.zeros(gl.n)
        zero_r = np.zeros(gr.n)
        return (np.concatenate([gl.momenta, zero_r]),
                np.concatenate([zero_l, gr.momenta]))
    if rep.kind == "productChiralTensor":
        pl, pr = np.meshgrid(rep.grids[0].momenta, rep.grids[1].momenta,
                             indexing="ij")
        return pl.ravel(), pr.ravel()
    if rep.kind == "massive":
        return rep.grids[0].omega.copy(), rep.grids[0].p1.copy()
    omega = np.concatenate([g.omega for g in rep.grids])
    p1 = np.concatenate([g.p1 for g in rep.grids])
    return omega, p1


def axis_spectrum_points(rep):
    """Number of nonzero joint-spectrum points on a lightray axis.

    A two-dimensional representation has a chiral component exactly when
    the joint translation spectrum charges R_+ x {0} or {0} x R_+ in
    lightray momentum coordinates (p_L, p_R) = ((omega + p1),
    (omega - p1)) / sqrt(2); on the tensor and direct-integral grids this
    count is zero by construction, while the direct-sum model consists of
    nothing else.
    """
    if rep.kind in ("massive", "directIntegral"):
        omega, p1 = translation_spectrum(rep)
        a, b = (omega + p1) / _SQRT2, (omega - p1) / _SQRT2
    else:
        spec = translation_spectrum(rep)
        if len(spec) != 2:
            raise ValueError("axis check needs a two-dimensional spectrum")
        a, b = spec
    on_a = (b == 0.0) & (a != 0.0)
    on_b = (a == 0.0) & (b != 0.0)
    return int(np.sum(on_a) + np.sum(on_b))


# ---------------------------------------------------------------------------
# the product <-> direct integral identification
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class IdentificationReport:
    norm_source: float
    norm_target: float
    coverage: float

    @property
    def norm_ratio(self):
        return self.norm_target / self.norm_source if self.norm_source else 1.0


def product_to_direct_integral(xi, source: LatticeRep, target: LatticeRep):
    """Resample a tensor vector onto the (mass, rapidity) fibration.

    The change of variables 2 p_L p_R = m^2, p_1 = (p_L - p_R)/sqrt(2)
    reads u_L = log(m/sqrt 2) + theta, u_R = log(m/sqrt 2) - theta in log
    coordinates, where it is sampled by bilinear interpolation; the
    factor 2 makes the continuum map an isometry for the uniform mass
    measure dm/4 used by directIntegral grids.  Returns the resampled
    vector and a report with the measured norm ratio and the fraction of
    target weight whose preimage lies inside the source grid.
    """
    if source.kind != "productChiralTensor":
        raise ValueError("source must be a productChiralTensor rep")
    if target.kind != "directIntegral":
        raise ValueError("target must be a directIntegral rep")
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != source.shape:
        raise ValueError("vector does not match the source grids")
    gl, gr = source.grids
    masses = np.array([g.mass for g in target.grids])
    theta = target.grids[0].theta
    log_m = np.log(masses / _SQRT2)
    u_l = log_m[:, None] + theta[None, :]
    u_r = log_m[:, None] - theta[None, :]

    def sample(u, grid):
        x = (u - grid.u0) / grid.h
        inside = (x >= 0.0) & (x <= grid.n - 1)
        x = np.clip(x, 0.0, grid.n - 1)
        j = np.minimum(x.astype(int), grid.n - 2)
        return j, x - j, inside

    jl, fl, in_l = sample(u_l, gl)
    jr, fr, in_r = sample(u_r, gr)
    vals = ((1 - fl) * (1 - fr) * xi[jl, jr]
            + fl * (1 - fr) * xi[jl + 1, jr]
            + (1 - fl) * fr * xi[jl, jr + 1]
            + fl * fr * xi[jl + 1, jr + 1])
    inside = in_l & in_r
    out = np.where(inside, 2.0 * vals, 0.0)
    w = target.weight_array()
    coverage = float(np.sum(w[inside]) / np.sum(w))
    return out, IdentificationReport(source.norm(xi), target.norm(out),
                                     coverage)


def translation_intertwining_residual(source, target, xi, a_pair):
    """|| T U(tau) xi - U'(tau) T xi || / ||xi|| for a lightray pair."""
    t_l, t_r = a_pair
    g = GElement(CoverElement.from_base(MobiusElement.translation(t_l)),
                 CoverElement.from_base(MobiusElement.translation(t_r)))
    moved, _ = product_to_direct_integral(apply(source, g, xi), source, target)
    mapped, _ = product_to_direct_integral(xi, source, target)
    return target.norm(moved - apply(target, g, mapped)) / source.norm(xi)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def vector_to_bytes(xi):
    """Interleaved re/im little-endian float64, with a shape header."""
    xi = np.asarray(xi, dtype=complex)
    head = struct.pack("<Q", xi.ndim) + struct.pack(
        f"<{xi.ndim}Q", *xi.shape
    )
    flat = np.empty(2 * xi.size)
    flat[0::2] = xi.real.ravel()
    flat[1::2] = xi.imag.ravel()
    return head + flat.astype("<f8").tobytes()


def vector_from_bytes(blob):
    (ndim,) = struct.unpack_from("<Q", blob, 0)
    shape = struct.unpack_from(f"<{ndim}Q", blob, 8)
    offset = 8 + 8 * ndim
    flat = np.frombuffer(blob, dtype="<f8", offset=offset)
    return (flat[0::2] + 1j * flat[1::2]).reshape(shape)
