"""Tests for standard subspaces, modular data and subspace lattices."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from modnet.stdspace import (
    TAKESAKI_LADDER,
    ComplexSpace,
    ConditioningWarning,
    HalperinNonConvergence,
    ModularData,
    RealSubspace,
    borchers_check,
    contains_subspace,
    hsmi_check,
    intersect,
    is_standard,
    make_subspace,
    modular_data,
    standardness,
    subspace_distance,
    subspace_from_bytes,
    subspace_from_dict,
    subspace_from_modular,
    subspace_to_bytes,
    subspace_to_dict,
    sum_closure,
    symmetry_commutation_check,
    symplectic_complement,
    takesaki_check,
)

ATOL = 1e-10
LOOSE = 1e-8


def real_slice(parent):
    """The subspace R^n of C^n (conjugation-fixed vectors)."""
    return make_subspace(list(np.eye(parent.n)), parent)


def random_subspace(rng, parent, k):
    vecs = rng.normal(size=(k, parent.n)) + 1j * rng.normal(size=(k, parent.n))
    return make_subspace(list(vecs), parent)


def random_standard(rng, parent):
    """Generic n-dimensional real subspaces are standard."""
    while True:
        h = random_subspace(rng, parent, parent.n)
        if is_standard(h):
            return h


def random_modular_pair(rng, parent):
    """Random admissible (J, Delta) with paired eigenvalues (lam, 1/lam)."""
    n = parent.n
    m = n // 2
    lam = np.exp(rng.uniform(-1.5, 1.5, size=m))
    d_eigs = np.concatenate([lam, 1.0 / lam])
    perm = np.zeros((n, n))
    perm[:m, m:] = np.eye(m)
    perm[m:, :m] = np.eye(m)
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    v, _ = np.linalg.qr(z)
    delta_c = v @ np.diag(d_eigs).astype(complex) @ v.conj().T
    u_j = v @ perm @ v.T
    return ModularData(parent,
                       parent.realify_antilinear(u_j),
                       parent.realify_linear(delta_c))


# ---------------------------------------------------------------------------
# the real form of C^n
# ---------------------------------------------------------------------------


def test_multiplication_by_i_block():
    sp = ComplexSpace(3)
    assert_allclose(sp.J_i @ sp.J_i, -np.eye(6), atol=0)
    assert_allclose(sp.J_i.T @ sp.J_i, np.eye(6), atol=0)


def test_embed_extract_roundtrip():
    sp = ComplexSpace(4)
    rng = np.random.default_rng(1)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert_allclose(sp.extract(sp.embed(v)), v, atol=ATOL)
    assert_allclose(sp.embed(1j * v), sp.J_i @ sp.embed(v), atol=ATOL)


def test_imaginary_form_identity():
    sp = ComplexSpace(5)
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = rng.normal(size=5) + 1j * rng.normal(size=5)
        y = rng.normal(size=5) + 1j * rng.normal(size=5)
        im = sp.embed(x) @ sp.J_i.T @ sp.embed(y)
        assert_allclose(im, np.vdot(x, y).imag, atol=ATOL)


def test_realify_structures():
    sp = ComplexSpace(3)
    rng = np.random.default_rng(3)
    c = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    lin = sp.realify_linear(c)
    anti = sp.realify_antilinear(c)
    assert_allclose(lin @ sp.J_i, sp.J_i @ lin, atol=ATOL)
    assert_allclose(anti @ sp.J_i, -sp.J_i @ anti, atol=ATOL)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    assert_allclose(sp.extract(lin @ sp.embed(v)), c @ v, atol=ATOL)
    assert_allclose(sp.extract(anti @ sp.embed(v)), c @ v.conj(), atol=ATOL)
    assert_allclose(sp.complexify_linear(lin), c, atol=ATOL)


# ---------------------------------------------------------------------------
# building subspaces
# ---------------------------------------------------------------------------


def test_make_subspace_zero_vector():
    sp = ComplexSpace(3)
    h = make_subspace([np.zeros(3)], sp)
    assert h.dim == 0
    assert make_subspace([], sp).dim == 0


def test_make_subspace_complex_line():
    sp = ComplexSpace(2)
    e1 = np.array([1.0, 0.0])
    h = make_subspace([e1, 1j * e1], sp)
    assert h.dim == 2


def test_make_subspace_generic_rank():
    sp = ComplexSpace(10)
    rng = np.random.default_rng(5)
    vecs = rng.normal(size=(50, 10)) + 1j * rng.normal(size=(50, 10))
    assert make_subspace(list(vecs), sp).dim == 20


def test_subspace_validation():
    sp = ComplexSpace(2)
    with pytest.raises(ValueError):
        RealSubspace(sp, np.ones((4, 2)))
    with pytest.raises(ValueError):
        RealSubspace(sp, np.eye(3))


# ---------------------------------------------------------------------------
# symplectic complement
# ---------------------------------------------------------------------------


def test_complement_of_everything_and_nothing():
    sp = ComplexSpace(3)
    full = RealSubspace.full(sp)
    assert symplectic_complement(full).dim == 0
    assert symplectic_complement(RealSubspace.zero(sp)).dim == 6


def test_real_slice_is_self_complementary():
    sp = ComplexSpace(4)
    h = real_slice(sp)
    assert subspace_distance(symplectic_complement(h), h) < ATOL


def test_complement_dimension_and_involution():
    rng = np.random.default_rng(7)
    sp = ComplexSpace(4)
    for _ in range(30):
        h = random_subspace(rng, sp, rng.integers(0, 5))
        hp = symplectic_complement(h)
        assert hp.dim == sp.real_dim - h.dim
        assert subspace_distance(symplectic_complement(hp), h) < 1e-9


# ---------------------------------------------------------------------------
# standardness
# ---------------------------------------------------------------------------


def test_real_slice_standard_with_right_angle():
    rep = standardness(real_slice(ComplexSpace(3)))
    assert rep.cyclic and rep.separating
    assert_allclose(rep.minimal_angle, math.pi / 2, atol=1e-9)


def test_complex_line_not_standard():
    sp = ComplexSpace(2)
    h = make_subspace([np.array([1.0, 0.0]), np.array([1j, 0.0])], sp)
    rep = standardness(h)
    assert not rep.cyclic
    assert not rep.separating


def test_frozen_example_is_standard():
    sp = ComplexSpace(2)
    h = make_subspace([np.array([1.0, 2.0]), np.array([1j, -2j])], sp)
    assert standardness(h).standard


# ---------------------------------------------------------------------------
# modular data
# ---------------------------------------------------------------------------


def test_real_slice_has_trivial_modular_operator():
    sp = ComplexSpace(3)
    s_op, m = modular_data(real_slice(sp))
    conj = np.block([[np.eye(3), np.zeros((3, 3))],
                     [np.zeros((3, 3)), -np.eye(3)]])
    assert_allclose(s_op, conj, atol=1e-9)
    assert_allclose(m.Delta, np.eye(6), atol=1e-9)
    assert_allclose(m.J, conj, atol=1e-9)


def test_one_dimensional_subspaces_have_trivial_delta():
    sp = ComplexSpace(1)
    rng = np.random.default_rng(11)
    for _ in range(10):
        theta = rng.uniform(0, 2 * math.pi)
        h = make_subspace([np.array([np.exp(1j * theta)])], sp)
        _, m = modular_data(h)
        assert_allclose(m.Delta, np.eye(2), atol=1e-9)


def test_frozen_c2_modular_pair():
    # H = {(w, 2 conj(w))} has Delta = diag(4, 1/4) and J = swap o conj
    sp = ComplexSpace(2)
    h = make_subspace([np.array([1.0, 2.0]), np.array([1j, -2j])], sp)
    _, m = modular_data(h)
    assert_allclose(m.Delta, sp.realify_linear(np.diag([4.0, 0.25])),
                    atol=1e-9)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert_allclose(m.J, sp.realify_antilinear(swap), atol=1e-9)


def test_modular_rejects_non_standard_with_named_reason():
    sp = ComplexSpace(2)
    line = make_subspace([np.array([1.0, 0.0]), np.array([1j, 0.0])], sp)
    with pytest.raises(ValueError, match="cyclic"):
        modular_data(line)
    crowded = make_subspace(
        [np.array([1.0, 0.0]), np.array([1j, 0.0]), np.array([0.0, 1.0])], sp
    )
    with pytest.raises(ValueError, match="separating"):
        modular_data(crowded)


def test_tomita_invariants_on_random_standard_subspaces():
    rng = np.random.default_rng(13)
    sp = ComplexSpace(3)
    eye = np.eye(6)
    for _ in range(15):
        h = random_standard(rng, sp)
        s_op, m = modular_data(h)
        # S fixes H pointwise and squares to one
        assert_allclose(s_op @ h.basis, h.basis, atol=1e-8)
        assert_allclose(s_op @ s_op, eye, atol=1e-8)
        assert_allclose(s_op @ sp.J_i, -sp.J_i @ s_op, atol=1e-8)
        # polar pieces reproduce S
        assert_allclose(m.tomita(), s_op, atol=1e-8)
        # J H = H' and the commutant's Tomita operator is the adjoint
        hp = symplectic_complement(h)
        assert subspace_distance(h.transform(m.J), hp) < 1e-8
        sp_op, _ = modular_data(hp)
        assert_allclose(sp_op, s_op.T, atol=1e-7)
        # modular flow preserves H
        for t in (-5.0, -1.0, -0.1, 0.1, 1.0, 5.0):
            assert subspace_distance(h.transform(m.delta_it(t)), h) < 1e-8


def test_delta_flow_is_a_one_parameter_unitary_group():
    rng = np.random.default_rng(17)
    sp = ComplexSpace(3)
    _, m = modular_data(random_standard(rng, sp))
    u, v = m.delta_it(0.7), m.delta_it(-0.3)
    assert_allclose(u.T @ u, np.eye(6), atol=1e-10)
    assert_allclose(u @ v, m.delta_it(0.4), atol=1e-10)
    assert_allclose(m.delta_it(0.0), np.eye(6), atol=ATOL)


# ---------------------------------------------------------------------------
# subspace from modular data
# ---------------------------------------------------------------------------


def test_trivial_modular_data_gives_real_slice():
    sp = ComplexSpace(3)
    m = ModularData(sp, sp.realify_antilinear(np.eye(3)), np.eye(6))
    h = subspace_from_modular(m)
    assert subspace_distance(h, real_slice(sp)) < ATOL


def test_frozen_c2_fixed_points():
    sp = ComplexSpace(2)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    m = ModularData(sp, sp.realify_antilinear(swap),
                    sp.realify_linear(np.diag([4.0, 0.25])))
    h = subspace_from_modular(m)
    expect = make_subspace([np.array([1.0, 2.0]), np.array([1j, -2j])], sp)
    assert h.dim == 2
    assert subspace_distance(h, expect) < 1e-9


def test_modular_roundtrip_on_random_pairs():
    rng = np.random.default_rng(19)
    sp = ComplexSpace(4)
    for _ in range(10):
        m = random_modular_pair(rng, sp)
        h = subspace_from_modular(m)
        assert h.dim == sp.n
        assert is_standard(h)
        _, m2 = modular_data(h)
        assert np.linalg.norm(m2.Delta - m.Delta, 2) < 1e-8 * np.linalg.norm(
            m.Delta, 2
        )
        assert np.linalg.norm(m2.J - m.J, 2) < 1e-8


def test_modular_data_validation_messages():
    sp = ComplexSpace(2)
    good_j = sp.realify_antilinear(np.eye(2))
    with pytest.raises(ValueError, match="orthogonal"):
        ModularData(sp, 2.0 * good_j, np.eye(4))
    with pytest.raises(ValueError, match="antilinear"):
        ModularData(sp, np.eye(4), np.eye(4))
    with pytest.raises(ValueError, match="positive"):
        ModularData(sp, good_j, -np.eye(4))
    with pytest.raises(ValueError, match="Delta"):
        ModularData(sp, good_j, sp.realify_linear(np.diag([2.0, 0.25])))


def test_badly_conditioned_kernel_warns():
    # With a very wide modular spectrum the relative rank threshold
    # swallows genuine non-fixed directions (singular value 5.2 vs cut
    # 1e-8 * 1e9 = 10), so the kernel is overcounted and flagged.
    sp = ComplexSpace(6)
    eigs = [1e18, 1e4, 25.0]
    delta_c = np.diag(eigs + [1.0 / e for e in eigs]).astype(complex)
    perm = np.zeros((6, 6))
    perm[:3, 3:] = np.eye(3)
    perm[3:, :3] = np.eye(3)
    m = ModularData(sp, sp.realify_antilinear(perm),
                    sp.realify_linear(delta_c))
    with pytest.warns(ConditioningWarning):
        h = subspace_from_modular(m)
    assert h.dim == 8  # true fixed-point dimension is 6


# ---------------------------------------------------------------------------
# intersections and sums
# ---------------------------------------------------------------------------


def test_intersect_coordinate_planes():
    sp = ComplexSpace(2)  # real dimension 4
    e = np.eye(4)
    h1 = RealSubspace(sp, e[:, [0, 1]])
    h2 = RealSubspace(sp, e[:, [1, 2]])
    got = intersect([h1, h2])
    assert got.dim == 1
    assert subspace_distance(got, RealSubspace(sp, e[:, [1]])) < ATOL
    assert subspace_distance(intersect([h1, h1]), h1) < ATOL


@pytest.mark.parametrize("method", ["exact", "halperin"])
def test_intersect_with_shared_core(method):
    rng = np.random.default_rng(23)
    sp = ComplexSpace(4)
    core = rng.normal(size=(8, 2))
    h1 = RealSubspace(sp, np.linalg.qr(
        np.hstack([core, rng.normal(size=(8, 2))]))[0][:, :4])
    h2 = RealSubspace(sp, np.linalg.qr(
        np.hstack([core, rng.normal(size=(8, 2))]))[0][:, :4])
    got = intersect([h1, h2], method=method)
    assert got.dim == 2
    for col in core.T:
        v = col / np.linalg.norm(col)
        assert np.linalg.norm(got.projector() @ v - v) < 1e-6


def test_halperin_matches_exact_on_random_pairs():
    rng = np.random.default_rng(29)
    sp = ComplexSpace(8)
    for _ in range(100):
        shared = rng.integers(0, 3)
        core = rng.normal(size=(16, shared)) if shared else np.zeros((16, 0))
        mats = []
        for _ in range(2):
            extra = rng.normal(size=(16, 6 - shared))
            mats.append(np.linalg.qr(np.hstack([core, extra]))[0][:, :6])
        h1, h2 = (RealSubspace(sp, b) for b in mats)
        a = intersect([h1, h2], method="exact")
        b = intersect([h1, h2], method="halperin", max_iter=5000, tol=1e-9)
        assert subspace_distance(a, b) < 1e-7


def test_halperin_nonconvergence_reports_residual():
    sp = ComplexSpace(1)
    eps = 1e-4
    h1 = RealSubspace(sp, np.array([[1.0], [0.0]]))
    h2 = RealSubspace(sp, np.array([[math.cos(eps)], [math.sin(eps)]]))
    with pytest.raises(HalperinNonConvergence) as err:
        intersect([h1, h2], method="halperin", max_iter=64, tol=1e-12)
    assert err.value.residual > 0.0


def test_sum_closure_basics():
    rng = np.random.default_rng(31)
    sp = ComplexSpace(3)
    h = random_subspace(rng, sp, 2)
    assert subspace_distance(sum_closure([h, RealSubspace.zero(sp)]), h) < ATOL
    chain = [RealSubspace(sp, h.basis[:, :1]), h]
    assert subspace_distance(sum_closure(chain), h) < ATOL


def test_de_morgan_laws():
    rng = np.random.default_rng(37)
    sp = ComplexSpace(4)
    for _ in range(20):
        h1 = random_subspace(rng, sp, rng.integers(1, 4))
        h2 = random_subspace(rng, sp, rng.integers(1, 4))
        lhs = symplectic_complement(sum_closure([h1, h2]))
        rhs = intersect([symplectic_complement(h1), symplectic_complement(h2)])
        assert subspace_distance(lhs, rhs) < 1e-8
        lhs = symplectic_complement(intersect([h1, h2]))
        rhs = sum_closure([symplectic_complement(h1),
                           symplectic_complement(h2)])
        assert subspace_distance(lhs, rhs) < 1e-8


# ---------------------------------------------------------------------------
# modular-theoretic checks
# ---------------------------------------------------------------------------


def test_takesaki_equal_subspaces():
    rng = np.random.default_rng(41)
    h = random_standard(rng, ComplexSpace(3))
    res = takesaki_check(h, h)
    assert res
    assert res.first_violation is None


def test_takesaki_detects_moving_subspace():
    # A rotated copy of H passes the containment pre-check only at loose
    # tolerance, and the modular flow of H then visibly moves it: the
    # rotation mixes the eigendirections of Delta, so the flow amplifies
    # the misalignment beyond the containment defect.
    import scipy.linalg as sla

    sp = ComplexSpace(2)
    h = make_subspace([np.array([1.0, 2.0]), np.array([1j, -2j])], sp)
    rot = sp.realify_linear(sla.expm(0.2j * np.array([[0.0, 1.0],
                                                      [1.0, 0.0]])))
    k = h.transform(rot)
    res = takesaki_check(k, h, tol=0.27)
    assert not res
    assert res.first_violation == pytest.approx(0.8)
    assert res.deviation > 0.27


def test_takesaki_requires_containment():
    rng = np.random.default_rng(47)
    sp = ComplexSpace(3)
    h = random_standard(rng, sp)
    k = random_standard(rng, sp)
    with pytest.raises(ValueError, match="not contained"):
        takesaki_check(k, h, tol=1e-8)


def test_takesaki_ladder_shape():
    assert len(TAKESAKI_LADDER) == 14
    assert max(TAKESAKI_LADDER) == pytest.approx(6.4)
    assert min(TAKESAKI_LADDER) == pytest.approx(-6.4)


def test_borchers_trivial_translations():
    rng = np.random.default_rng(53)
    h = random_standard(rng, ComplexSpace(3))
    rep = borchers_check(h, lambda t: np.eye(6), spectrum_sign=1)
    assert rep.max_residual < 1e-12


def test_borchers_precondition_failure():
    rng = np.random.default_rng(59)
    sp = ComplexSpace(3)
    h = random_standard(rng, sp)
    z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    u = sp.realify_linear(np.linalg.qr(z)[0])
    with pytest.raises(ValueError, match="semigroup"):
        borchers_check(h, lambda t: u if t != 0 else np.eye(6))


def test_hsmi_trivial_inclusion():
    rng = np.random.default_rng(61)
    h = random_standard(rng, ComplexSpace(3))
    for sign in (1, -1):
        rep = hsmi_check(h, h, sign=sign)
        assert rep
        assert rep.commutation_residual < 1e-9
        assert rep.pairs_checked > 0


def test_symmetry_commutation_trivial_and_modular():
    rng = np.random.default_rng(67)
    h = random_standard(rng, ComplexSpace(3))
    rep = symmetry_commutation_check(h, np.eye(6))
    assert rep.max_residual < 1e-12
    _, m = modular_data(h)
    rep = symmetry_commutation_check(h, m.delta_it(0.8))
    assert rep.max_residual < 1e-8


def test_symmetry_commutation_rejects_moving_unitary():
    rng = np.random.default_rng(71)
    sp = ComplexSpace(3)
    h = random_standard(rng, sp)
    z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    u = sp.realify_linear(np.linalg.qr(z)[0])
    with pytest.raises(ValueError, match="preserve"):
        symmetry_commutation_check(h, u)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_subspace_dict_roundtrip():
    rng = np.random.default_rng(73)
    h = random_subspace(rng, ComplexSpace(3), 2)
    again = subspace_from_dict(subspace_to_dict(h))
    assert subspace_distance(h, again) < ATOL
    assert again.parent.n == 3


def test_subspace_bytes_roundtrip():
    rng = np.random.default_rng(79)
    h = random_subspace(rng, ComplexSpace(4), 3)
    blob = subspace_to_bytes(h)
    again = subspace_from_bytes(blob)
    assert subspace_distance(h, again) < ATOL
    assert len(blob) == 24 + 8 * 8 * 3
