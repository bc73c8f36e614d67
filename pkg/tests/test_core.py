import itertools
import random

import pytest

from racklab import (AxiomReport, MalformedTableError, NotAbelianError,
                     NotAGroupError, NotARackError, NotAutomorphismError, Rack,
                     RackParseError, Violation, alexander_quandle, axiom_report,
                     canonical_form, conjugation_quandle, cyclic_group_table,
                     dihedral_quandle, find_isomorphism, format_rack, is_subrack,
                     parse_rack_table, permutation_rack, rack_from_table,
                     symmetric_group_table, trivial_rack)
from racklab.core import _conjugation_violations_fast, _conjugation_violations_slow
from racklab.perms import compose, inverse

from _corpus import family_racks, random_relabeling, random_table


def test_trivial_rack():
    r = trivial_rack(1)
    assert r.maps == ((0,),)
    r4 = trivial_rack(4)
    assert all(m == (0, 1, 2, 3) for m in r4.maps)
    assert r4.is_quandle


def test_rack_from_table_trivial():
    table = [[x] * 3 for x in range(3)]
    r = rack_from_table(table)
    assert isinstance(r, Rack)
    assert r == trivial_rack(3)


def test_rack_from_table_id_swap_rejected():
    # maps f_0 = id, f_1 = swap; hand oracle: the pair (y=0, z=1) forces
    # f_{(0)f_1} = f_1 to equal f_1^-1 f_0 f_1 = id, and they differ at x=0
    table = ((0, 1), (1, 0))
    report = rack_from_table(table)
    assert isinstance(report, AxiomReport)
    assert not report.is_rack
    assert report.violations[0] == Violation("ConjugationFail", (0, 0, 1))


def test_dihedral_is_quandle():
    r = dihedral_quandle(3)
    assert r.table == ((0, 2, 1), (2, 1, 0), (1, 0, 2))
    assert r.is_quandle


def test_malformed_tables_raise():
    with pytest.raises(MalformedTableError):
        rack_from_table([[0, 1], [0]])
    with pytest.raises(MalformedTableError):
        rack_from_table([[0, 2], [1, 0]])
    with pytest.raises(MalformedTableError):
        rack_from_table([])


def test_conjugation_quandles():
    assert conjugation_quandle(cyclic_group_table(3)) == trivial_rack(3)
    assert conjugation_quandle(cyclic_group_table(1)) == trivial_rack(1)
    s3 = conjugation_quandle(symmetric_group_table(3))
    assert s3.n == 6
    assert s3.is_quandle


def test_not_a_group():
    bad = [[0, 1], [1, 1]]  # no inverse for 1
    with pytest.raises(NotAGroupError):
        conjugation_quandle(bad)
    no_id = [[1, 0], [0, 0]]
    with pytest.raises(NotAGroupError):
        conjugation_quandle(no_id)


def test_alexander_quandles():
    z3 = cyclic_group_table(3)
    assert alexander_quandle(z3, (0, 2, 1)) == dihedral_quandle(3)
    assert alexander_quandle(z3, (0, 1, 2)) == trivial_rack(3)
    z4 = cyclic_group_table(4)
    q = alexander_quandle(z4, (0, 3, 2, 1))
    assert q.is_quandle
    with pytest.raises(NotAbelianError):
        alexander_quandle(symmetric_group_table(3), tuple(range(6)))
    with pytest.raises(NotAutomorphismError):
        alexander_quandle(z4, (0, 2, 1, 3))


def test_is_subrack():
    d3 = dihedral_quandle(3)
    assert is_subrack(d3, range(3))
    assert is_subrack(d3, [0])
    # 0 > 1 = 2 escapes the pair
    assert d3.table[0][1] == 2
    assert not is_subrack(d3, [0, 1])
    with pytest.raises(ValueError):
        is_subrack(d3, [])


def test_find_isomorphism_identity_and_relabel():
    rng = random.Random(5)
    for _, rack in family_racks(5):
        phi = find_isomorphism(rack, rack)
        assert phi is not None
        other = random_relabeling(rng, rack)
        psi = find_isomorphism(rack, other)
        assert psi is not None
        for x in range(rack.n):
            for y in range(rack.n):
                assert psi[rack.table[x][y]] == other.table[psi[x]][psi[y]]


def test_find_isomorphism_rejects():
    t3 = trivial_rack(3)
    d3 = dihedral_quandle(3)
    assert find_isomorphism(t3, d3) is None
    # oracle: none of the 6 bijections is a homomorphism
    found = False
    for phi in itertools.permutations(range(3)):
        if all(phi[t3.table[x][y]] == d3.table[phi[x]][phi[y]]
               for x in range(3) for y in range(3)):
            found = True
    assert not found
    assert find_isomorphism(trivial_rack(2), trivial_rack(3)) is None


def test_canonical_form_invariance():
    rng = random.Random(11)
    for _, rack in family_racks(6):
        canon = canonical_form(rack)
        assert canonical_form(Rack.from_table(canon)) == canon  # idempotent
        for _ in range(3):
            assert canonical_form(random_relabeling(rng, rack)) == canon


def test_canonical_form_separates():
    assert canonical_form(trivial_rack(3)) != canonical_form(dihedral_quandle(3))
    assert canonical_form(trivial_rack(3)) == trivial_rack(3).table


def test_canonical_iff_isomorphic_small():
    from racklab import enumerate_labeled
    # all pairs at orders <= 3
    for n in (1, 2, 3):
        racks = list(enumerate_labeled(n))
        canon = [canonical_form(r) for r in racks]
        for i, r1 in enumerate(racks):
            for j, r2 in enumerate(racks):
                same = canon[i] == canon[j]
                assert same == (find_isomorphism(r1, r2) is not None)
    # order 4: within-class pairs are isomorphic, cross-class pairs are not
    rng = random.Random(41)
    racks4 = list(enumerate_labeled(4))
    by_class = {}
    for r in racks4:
        by_class.setdefault(canonical_form(r), []).append(r)
    classes = sorted(by_class)
    for members in by_class.values():
        r1, r2 = rng.choice(members), rng.choice(members)
        assert find_isomorphism(r1, r2) is not None
    for a, b in zip(classes, classes[1:]):
        assert find_isomorphism(by_class[a][0], by_class[b][0]) is None


def test_axiom_methods_agree_exhaustive_n2():
    perms = list(itertools.permutations(range(2)))
    for f0 in perms:
        for f1 in perms:
            table = tuple(tuple((f0, f1)[y][x] for y in range(2)) for x in range(2))
            a = axiom_report(table, "conjugation")
            b = axiom_report(table, "self-distributive")
            assert a.is_rack == b.is_rack
    # exactly two racks on two elements: both translations equal
    count = sum(axiom_report(tuple(tuple((f0, f1)[y][x] for y in range(2))
                                   for x in range(2))).is_rack
                for f0 in perms for f1 in perms)
    assert count == 2


def test_axiom_methods_agree_random():
    rng = random.Random(7)
    for _ in range(1500):
        n = rng.randrange(1, 6)
        table = random_table(rng, n)
        a = axiom_report(table, "conjugation")
        b = axiom_report(table, "self-distributive")
        assert a.is_rack == b.is_rack
    for _, rack in family_racks(5):
        assert axiom_report(rack.table, "self-distributive").is_rack


def test_fast_and_slow_conjugation_checks_match():
    # both checks require bijective columns, so perturb by swapping two
    # entries inside one column
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randrange(2, 9)
        perm = tuple(rng.sample(range(n), n))
        table = [list(row) for row in permutation_rack(perm).table]
        if rng.random() < 0.8:
            y = rng.randrange(n)
            x1, x2 = rng.randrange(n), rng.randrange(n)
            table[x1][y], table[x2][y] = table[x2][y], table[x1][y]
        slow = _conjugation_violations_slow(table, n)
        fast = _conjugation_violations_fast(table, n)
        assert slow == fast


def test_operator_word_conjugation():
    # for any word g in the translations and their inverses, the translation
    # of (y)g equals g^-1 f_y g
    rng = random.Random(13)
    for _, rack in family_racks(6):
        n = rack.n
        for _ in range(20):
            length = rng.randrange(0, 7)
            word = [(rng.randrange(n), rng.choice((1, -1))) for _ in range(length)]
            g = tuple(range(n))
            for c, e in word:
                step = rack.maps[c] if e == 1 else inverse(rack.maps[c])
                g = compose(g, step)
            for y in range(n):
                assert rack.maps[g[y]] == compose(compose(inverse(g), rack.maps[y]), g)


def test_relabel_produces_isomorphic_rack():
    rng = random.Random(2)
    d4 = dihedral_quandle(4)
    other = random_relabeling(rng, d4)
    assert isinstance(other, Rack)
    assert find_isomorphism(d4, other) is not None
    with pytest.raises(ValueError):
        d4.relabel((0, 1, 2))


def test_parse_and_format_round_trip():
    for _, rack in family_racks(5):
        assert rack_from_table(parse_rack_table(format_rack(rack))) == rack


def test_parse_errors_carry_location():
    with pytest.raises(RackParseError) as err:
        parse_rack_table("2\n0 1\n")
    assert err.value.line == 2
    with pytest.raises(RackParseError) as err:
        parse_rack_table("2\n0 1\n1 2\n")
    assert (err.value.line, err.value.col) == (3, 2)
    with pytest.raises(RackParseError) as err:
        parse_rack_table("2\n0 1 0\n1 0\n")
    assert err.value.line == 2
    with pytest.raises(RackParseError):
        parse_rack_table("x\n")
    with pytest.raises(RackParseError):
        parse_rack_table("")
    with pytest.raises(RackParseError):
        parse_rack_table("2\n0 1\n1 0\nextra\n")


def test_not_a_rack_error_from_constructor():
    with pytest.raises(NotARackError) as err:
        Rack(((0, 1), (1, 0)))  # the id/swap pair again, via the maps view
    assert not err.value.report.is_rack


def test_load_rack(tmp_path):
    from racklab import load_rack
    path = tmp_path / "d4.rack"
    path.write_text(format_rack(dihedral_quandle(4)))
    assert load_rack(path) == dihedral_quandle(4)
    bad = tmp_path / "bad.rack"
    bad.write_text("2\n0 1\n1 0\n")
    with pytest.raises(NotARackError):
        load_rack(bad)
