import numpy as np
import pytest

from mtower.errors import OrderExceeded
from mtower.groups import (FiniteGroup, alternating_group, cyclic_group,
                           dihedral_group, find_isomorphism, is_center_free,
                           is_p_perfect, klein_four, special_linear_2)
from mtower.perms import Perm, parse_perm, parse_group_file


def test_perm_parse_and_format():
    q = parse_perm("(1 2 3 4 5)")
    assert q.images == (1, 2, 3, 4, 0)
    assert str(q) == "(1 2 3 4 5)"
    assert parse_perm("(2 5)(3 4)", 5).order() == 2
    r = parse_perm("(1 2)(3 4)")
    assert (r * r).is_identity()
    assert r.inverse() == r


def test_group_orders_from_generators():
    G = FiniteGroup([parse_perm("(1 2 3 4 5)"), parse_perm("(1 2 3)", 5)])
    assert G.order == 60
    assert FiniteGroup([Perm.identity(3)]).order == 1
    D5 = FiniteGroup([parse_perm("(1 2 3 4 5)"), parse_perm("(2 5)(3 4)", 5)])
    assert D5.order == 10


def test_order_budget():
    with pytest.raises(OrderExceeded):
        FiniteGroup([parse_perm("(1 2 3 4 5)"), parse_perm("(1 2 3)", 5)],
                    max_order=30)


def test_multiplication_table_consistency(a5):
    rng = np.random.default_rng(0)
    for _ in range(300):
        a, b, c = rng.integers(0, a5.order, size=3)
        assert a5.mul(a5.mul(int(a), int(b)), int(c)) == \
            a5.mul(int(a), a5.mul(int(b), int(c)))
    for x in range(a5.order):
        assert a5.mul(x, int(a5.inv[x])) == 0


def test_conjugacy_classes(a5, a4):
    sizes = [c.size for c in a5.conjugacy_classes()]
    assert sizes == [1, 15, 20, 12, 12]
    assert sum(sizes) == 60
    assert all(60 % s == 0 for s in sizes)
    d5 = dihedral_group(5)
    assert sorted(c.size for c in d5.conjugacy_classes()) == [1, 2, 2, 5]
    triv = FiniteGroup([Perm.identity(2)])
    assert [c.size for c in triv.conjugacy_classes()] == [1]
    # class members closed under conjugation by generators
    for cl in a4.conjugacy_classes():
        mem = set(cl.members)
        for x in cl.members:
            for g in a4.gen_indices:
                assert a4.conj(x, g) in mem


def test_is_p_perfect(a5):
    assert is_p_perfect(a5, 2) and is_p_perfect(a5, 3) and is_p_perfect(a5, 5)
    d5 = dihedral_group(5)
    assert is_p_perfect(d5, 5) and not is_p_perfect(d5, 2)
    z7 = cyclic_group(7)
    assert not is_p_perfect(z7, 7)
    a4 = alternating_group(4)
    assert is_p_perfect(a4, 2) and not is_p_perfect(a4, 3)


def test_center(a5):
    assert is_center_free(a5)
    assert len(klein_four().center()) == 4
    assert len(special_linear_2(5).center()) == 2


def test_find_isomorphism():
    d5a = dihedral_group(5)
    d5b = FiniteGroup([parse_perm("(1 2 3 4 5)"), parse_perm("(2 5)(3 4)", 5)])
    phi = find_isomorphism(d5a, d5b)
    assert phi is not None
    for x in range(10):
        for y in range(10):
            assert phi[d5a.mul(x, y)] == d5b.mul(phi[x], phi[y])
    assert find_isomorphism(cyclic_group(4), klein_four()) is None


def test_subgroup_closure(a5):
    c3 = next(x for x in range(60) if a5.element_order(x) == 3)
    sub = a5.subgroup_closure([c3])
    assert len(sub) == 3
    assert a5.closure_size([c3]) == 3


def test_group_file_parse():
    text = "# A5 generators\n(1 2 3 4 5)\n\n(1 2 3)\n"
    gens = parse_group_file(text)
    assert FiniteGroup(gens).order == 60
