import numpy as np
import pytest

from mtower import linalg as la
from mtower.errors import NotASubgroup, NotInvolution
from mtower.fp import Presentation
from mtower.gmodules import (GModule, endomorphism_basis, fitting_decompose,
                             fox_matrix, frobenius_check, hopf_tensor, induce,
                             indecomposable_summands, invariant_vectors,
                             involution_pairing, is_indecomposable,
                             loewy_layers, loewy_plain_layers, radical,
                             regular_module, socle, submodule_module,
                             trivial_module)
from mtower.groups import FiniteGroup, cyclic_group
from mtower.perms import Perm


@pytest.fixture(scope="module")
def d5sub_module(a5):
    """The 1-dimensional F5 module of the Sylow-5 normalizer inside A5."""
    rot = Perm.from_cycles([[0, 1, 2, 3, 4]], 5)
    ri = a5.lookup(rot.as_array())
    s = next(x for x in range(a5.order)
             if a5.element_order(x) == 2 and a5.conj(ri, x) == int(a5.inv[ri]))
    D5 = FiniteGroup([rot, a5.perm(s)], name="N(P5)")
    D5.presentation = Presentation(2, ((1,) * 5, (2, 2), (1, 2, 1, 2)))
    return GModule(D5, 5, [np.array([[1]]), np.array([[4]])])


def test_action_verified_on_construction(a5):
    bad = [np.array([[1, 0], [0, 1]]), np.array([[1, 1], [0, 1]])]
    with pytest.raises(Exception):
        GModule(a5, 2, bad)


def test_induce_dims(a5, d5sub_module):
    ind = induce(d5sub_module, a5)
    assert ind.dim == 6  # dim M' * (G : G')
    a4sub = FiniteGroup([Perm.from_cycles([[0, 1, 2]], 5),
                         Perm.from_cycles([[1, 2, 3]], 5)])
    ind5 = induce(trivial_module(a4sub, 2), a5)
    assert ind5.dim == 5
    for m in ind5.mats:  # permutation module on the cosets
        assert (m.sum(axis=0) == 1).all() and (m.sum(axis=1) == 1).all()
    with pytest.raises(NotASubgroup):
        induce(trivial_module(cyclic_group(7), 2), a5)


def test_induced_a5_p5_module(a5, d5sub_module):
    ind = induce(d5sub_module, a5)
    assert is_indecomposable(ind)
    ld = loewy_layers(ind)
    assert len(ld.layers) == 2
    assert [lab[0] for lab in ld.layers[0]] == [3]
    assert ld.layers[0] == ld.layers[1]
    named = loewy_layers(ind, {ld.layers[0][0]: "U_3"})
    assert named.display() == "U_3 -> U_3"


def test_loewy_trivial_module(a5):
    ld = loewy_layers(trivial_module(a5, 2))
    assert len(ld.layers) == 1 and ld.layers[0][0][0] == 1


def test_loewy_a4_split_module(a4_tower):
    M0 = a4_tower.level.kernel_module
    ld = loewy_layers(M0)
    dims = [sorted(lab[0] for lab in layer) for layer in ld.layers]
    assert dims == [[2], [1, 2]]  # socle K4H, head K4H + trivial
    assert ld.total_dim == 5
    assert is_indecomposable(M0)
    # radical strictly decreasing
    r1 = radical(M0)
    assert 0 < r1.shape[0] < M0.dim
    r2 = radical(submodule_module(M0, r1))
    assert r2.shape[0] == 0


def test_decomposable_sum_detected(a5):
    two = trivial_module(a5, 2, 2)
    assert not is_indecomposable(two)
    parts = indecomposable_summands(two)
    assert sorted(b.shape[0] for b in parts) == [1, 1]


def test_fitting_nilpotent_and_idempotent(a4_tower):
    M0 = a4_tower.level.kernel_module
    nil = np.zeros((5, 5), dtype=np.int64)
    ker, img = fitting_decompose(M0, nil)
    assert ker.shape[0] == 5 and img.shape[0] == 0
    ident = la.identity(5)
    ker, img = fitting_decompose(M0, ident)
    assert ker.shape[0] == 0 and img.shape[0] == 5


def test_endomorphisms_commute(a4_tower):
    M0 = a4_tower.level.kernel_module
    basis = endomorphism_basis(M0)
    assert basis.shape[0] >= 1
    for row in basis:
        X = row.reshape(5, 5)
        for A in M0.mats:
            assert ((X @ A - A @ X) % 2 == 0).all()


def test_invariant_vectors():
    Z3 = FiniteGroup([Perm.from_cycles([[0, 1, 2]], 3)])
    M = GModule(Z3, 2, [np.array([[0, 1], [1, 1]])], check=False)
    assert invariant_vectors(M, Z3.gen_indices).shape[0] == 0
    triv = trivial_module(Z3, 2, 4)
    assert invariant_vectors(triv, Z3.gen_indices).shape[0] == 4


def test_p_perfect_dual_criterion(a4_tower):
    # split base is 2-perfect iff the dual of the Sylow quotient has no
    # invariant vector under the complement action
    from mtower.groups import is_p_perfect

    G0 = a4_tower.g0
    h = G0.gen_indices[2]
    V = GModule(G0, 2, [la.identity(2), la.identity(2),
                        np.array([[0, 1], [1, 1]])], check=False)
    dual = V.dual()
    assert is_p_perfect(G0, 2) == (invariant_vectors(dual, [h]).shape[0] == 0)


def test_involution_pairing_and_frobenius(a4):
    assert involution_pairing([1, 2, 3], [1, 1, 1], (0, 1, 2), 5) == 1
    h = (1, 0, 2)
    assert involution_pairing([1, 0, 0], [0, 1, 0], h, 3) == 1
    with pytest.raises(NotInvolution):
        involution_pairing([1, 0, 0], [0, 1, 0], (1, 2, 0), 3)
    assert frobenius_check(a4, 2)
    assert frobenius_check(a4, 3)


def test_hopf_tensor_unit(a5):
    M = trivial_module(a5, 2, 3)
    one = trivial_module(a5, 2, 1)
    T = hopf_tensor(one, M)
    assert T.dim == 3
    assert all((a == b).all() for a, b in zip(T.mats, M.mats))


def test_projective_socle_equals_head(a4):
    """Principal indecomposables of F2[A4]: socle and head agree."""
    reg = regular_module(a4, 2)
    parts = indecomposable_summands(reg)
    assert sum(b.shape[0] for b in parts) == 12
    for b in parts:
        P = submodule_module(reg, b)
        layers = loewy_plain_layers(P)
        assert sorted(layers[0]) == sorted(layers[-1])


def test_fox_matrix_identities():
    Z2 = FiniteGroup([Perm.from_cycles([[0, 1]], 2)])
    fox = fox_matrix(Presentation(1, ((1, 1),)), trivial_module(Z2, 2))
    assert (fox == 0).all()  # 1 + x acts as 2 = 0 on the trivial F2 module
    K4 = FiniteGroup([Perm.from_cycles([[0, 1], [2, 3]], 4),
                      Perm.from_cycles([[0, 2], [1, 3]], 4)])
    foxc = fox_matrix(Presentation(2, ((-1, -2, 1, 2),)), trivial_module(K4, 2))
    assert (foxc == 0).all()  # commutators abelianize to zero


def test_fox_matrix_against_split_extension(a4_tower):
    """Tail of r under lifts x_j -> (x_j, m_j) equals the Fox block action."""
    M0 = a4_tower.level.kernel_module
    P = a4_tower.g0.presentation
    fox = fox_matrix(P, M0)
    rng = np.random.default_rng(3)
    m = rng.integers(0, 2, size=3 * 5)
    tails = (fox @ m) % 2
    # independent evaluation through the explicit split product
    def eval_tail(rel):
        vec = np.zeros(5, dtype=np.int64)
        for letter in rel:
            gi = abs(letter) - 1
            A = M0.mats[gi]
            if letter > 0:
                vec = (vec @ A + m[gi * 5:(gi + 1) * 5]) % 2
            else:
                Ainv = M0._invert(A)
                vec = ((vec - m[gi * 5:(gi + 1) * 5]) @ Ainv) % 2
        return vec
    for i, rel in enumerate(P.relators):
        assert (tails[i * 5:(i + 1) * 5] == eval_tail(rel)).all()


def test_module_file_roundtrip(a4_tower):
    from mtower.gmodules import format_module_file, parse_module_file

    M0 = a4_tower.level.kernel_module
    text = format_module_file(M0)
    again = parse_module_file(text, a4_tower.g0)
    assert again.dim == 5 and again.p == 2
    assert all((a == b).all() for a, b in zip(again.mats, M0.mats))
    assert text.startswith("p: 2\ndim: 5\n")


def test_module_map_type(a5, g1a5):
    from mtower.gmodules import ModuleMap
    import numpy as np
    from mtower import linalg as la

    ind = g1a5.module_data.induced
    M0 = g1a5.module
    # the summand inclusion is a genuine module map, and the projection onto
    # the summand coordinates is the surjection the construction promises
    basis = next(b for b in g1a5.module_data.summand_bases if b.shape[0] == 5)
    inc = ModuleMap(basis.T % 2, M0, ind) if False else None
    # inclusion: 5 -> 25 given by the basis rows
    inc = ModuleMap(basis, M0, ind)
    assert not inc.is_surjective()
    with pytest.raises(Exception):
        ModuleMap(np.ones((5, 25), dtype=int), M0, ind)
