from fractions import Fraction

import pytest

from mtower.errors import NonIntegralGenus
from mtower.hurwitz import (check_goup, component_genus,
                            genus_lower_bound, level_compare,
                            moduli_tests, sh_incidence, shortening_detect)
from mtower.nielsen import middle_product, project_tuple

from modular_oracle import shadow


def test_component_genus_formula():
    assert component_genus(1, 0, 0, 0) == 0
    assert component_genus(18, 12, 9, 13) == 0
    assert component_genus(288, 192, 144, 262) == 12
    with pytest.raises(NonIntegralGenus):
        component_genus(4, 1, 1, 2)  # odd index sum


def test_level0_report(a5_level0):
    rep = a5_level0.reports[0]
    assert rep.size == 18 and rep.genus == 0 and rep.t_prime == 0
    assert rep.cusp_widths == [2, 3, 3, 5, 5]
    assert sum(rep.cusp_widths) == rep.size
    assert (rep.ind0 + rep.ind1 + rep.indinf) % 2 == 0
    assert not rep.gamma0_fixed and not rep.gamma1_fixed
    flags = moduli_tests(rep)
    assert flags == {"b_fine": False, "fine": False}
    d = rep.to_dict()
    assert d["hm_cusps"] == [3, 4]


def test_level1_reports(a5_level1):
    genera = sorted(r.genus for r in a5_level1.reports)
    assert genera == [9, 12]
    for rep in a5_level1.reports:
        assert rep.b_fine and rep.fine
        assert sum(rep.cusp_widths) == rep.size
        assert (rep.ind0 + rep.ind1 + rep.indinf) % 2 == 0
    # fine persists: (vacuous from level 0) and holds at level 1


def test_sh_incidence_blocks(a5_level0, a5_level1):
    inc0 = sh_incidence(a5_level0.reports, a5_level0.reducer)
    assert inc0.symmetric
    assert len(inc0.blocks) == 1
    assert inc0.matrix.sum(axis=1).tolist() == [c.width for r in
                                                a5_level0.reports for c in r.cusps]
    inc1 = sh_incidence(a5_level1.reports, a5_level1.reducer)
    assert inc1.symmetric and len(inc1.blocks) == 2
    csv = inc0.to_csv()
    assert csv.splitlines()[0].startswith(",O1.1,")


def test_dihedral_matches_oracle(dihedral_pair):
    want0 = shadow(5)
    rep0 = dihedral_pair.lvl0.reports[0]
    assert len(dihedral_pair.lvl0.reports) == want0["components"]
    assert rep0.genus == want0["genus"]
    assert sorted(rep0.cusp_widths) == want0["cusp_widths"]
    assert rep0.size == want0["index"]
    want1 = shadow(25)
    rep1 = dihedral_pair.lvl1.reports[0]
    assert len(dihedral_pair.lvl1.reports) == want1["components"]
    assert rep1.genus == want1["genus"]
    assert sorted(rep1.cusp_widths) == want1["cusp_widths"]
    assert rep1.size == want1["index"]


def test_dihedral_level_compare_equality(dihedral_pair):
    cmp = level_compare(dihedral_pair.lvl0.reports[0],
                        dihedral_pair.lvl1.reports[0],
                        dihedral_pair.level, dihedral_pair.lvl0.reducer)
    assert cmp.degree == 25
    assert cmp.u_counts == [4, 4]
    assert not cmp.elliptic_ramification and not cmp.shortened_cusps
    assert check_goup(cmp) == "equality"
    assert cmp.bound == Fraction(12)


def test_a5_level_compare(g1a5, a5_level0, a5_level1):
    L = g1a5.level
    for ui, rep1 in enumerate(a5_level1.reports):
        cmp = level_compare(a5_level0.reports[0], rep1, L,
                            a5_level0.reducer, 0, ui)
        assert cmp.degree == 16
        assert cmp.bound <= rep1.genus
        assert cmp.shortened_cusps  # width growth outruns mpr growth here
        assert not cmp.elliptic_ramification
        assert check_goup(cmp) == "hypotheses-unmet"


def test_mpr_multiplies_over_divisible_cusps(dihedral_pair):
    L = dihedral_pair.level
    red0 = dihedral_pair.lvl0.reducer
    rep0 = dihedral_pair.lvl0.reports[0]
    divisible = {t for c in rep0.cusps if c.p_divisible for t in c.members}
    for t in dihedral_pair.lvl1.orbits[0]:
        img = red0.canonical(project_tuple(L, t))
        if img in divisible:
            assert middle_product(t, L.total) == \
                5 * middle_product(img, L.base)


def test_bound_examples():
    assert genus_lower_bound(4, 2, [], 2) == 1   # (1/4*4 - 1)*2 + 1
    assert genus_lower_bound(0, 3, [], 2) == -2  # vacuous when t' = 0
    assert genus_lower_bound(2, 25, [4, 4], 5) == 12


def test_shortening_detector(a5_level1):
    flagged = [shortening_detect(rep) for rep in a5_level1.reports]
    # the genus-9 component folds q2 orbits of length 12 over width-6 cusps
    genera = [rep.genus for rep in a5_level1.reports]
    by_genus = dict(zip(genera, flagged))
    assert by_genus[9], "expected inner-orbit folding in the genus-9 component"
    assert not by_genus[12]


def test_r5_sh_incidence_not_required_symmetric(a5):
    from conftest import class_of_order, level_bundle
    from mtower.nielsen import NielsenSpec

    spec = NielsenSpec(a5, (class_of_order(a5, 3),) * 5, 2)
    bundle = level_bundle(spec)
    inc = sh_incidence(bundle.reports, bundle.reducer)
    assert len(inc.blocks) == len(bundle.reports)
    assert inc.matrix.sum() == sum(r.size for r in bundle.reports)
