import pytest

from latticeplan.lattice import (
    AntisymmetryViolation,
    ForeignElement,
    NotALattice,
    NotBrouwerian,
    NotGenerating,
    ReflexivityViolation,
    TransitivityViolation,
    chain_lattice,
    generators_closure,
    powerset_lattice,
    subset_id,
    transitive_closure,
    verify_poset,
)


def diamond():
    return verify_poset(
        ["0", "x", "y", "1"],
        [("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")],
        covers=True,
    )


def m3():
    # three incomparable atoms between bottom and top
    return verify_poset(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
        covers=True,
    )


def n5():
    return verify_poset(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")],
        covers=True,
    )


def sample_lattices():
    return [
        verify_poset(["a"], [("a", "a")]),
        diamond(),
        chain_lattice(["0", "m", "1"]),
        m3(),
        n5(),
        powerset_lattice(["f1", "f2", "f3"]),
    ]


def test_single_element():
    lat = verify_poset(["a"], [("a", "a")])
    assert lat.top == "a" and lat.bottom == "a"
    assert lat.join("a", "a") == "a"


def test_diamond_join_meet():
    lat = diamond()
    assert lat.join("x", "y") == "1"
    assert lat.meet("x", "y") == "0"
    assert lat.top == "1" and lat.bottom == "0"


def test_antisymmetry_violation():
    with pytest.raises(AntisymmetryViolation):
        verify_poset(["a", "b"], [("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")])


def test_reflexivity_violation():
    with pytest.raises(ReflexivityViolation):
        verify_poset(["a", "b"], [("a", "a"), ("a", "b")])


def test_transitivity_violation():
    with pytest.raises(TransitivityViolation):
        verify_poset(
            ["a", "b", "c"],
            [("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")],
        )


def test_not_a_lattice():
    # two maximal elements: a and b have no join
    with pytest.raises(NotALattice):
        verify_poset(["0", "a", "b"], [("0", "a"), ("0", "b")], covers=True)


def test_foreign_element():
    lat = diamond()
    with pytest.raises(ForeignElement):
        lat.join("x", "nope")


def test_join_with_bottom_is_identity():
    for lat in sample_lattices():
        for e in lat.elements:
            assert lat.join(lat.bottom, e) == e
            assert lat.meet(lat.top, e) == e


def test_powerset_join_is_union():
    lat = powerset_lattice(["f1", "f2", "f3"])
    assert lat.join("{f1}", "{f2}") == "{f1,f2}"
    assert lat.meet("{f1,f2}", "{f2,f3}") == "{f2}"
    assert lat.top == "{f1,f2,f3}" and lat.bottom == "{}"


def test_join_set_conventions():
    lat = diamond()
    assert lat.join_set([]) == lat.bottom
    assert lat.join_set(lat.elements) == lat.top
    assert lat.meet_set([]) == lat.top
    # expected value from folding binary meets: 1 ^ x = x, x ^ y = 0, 0 ^ 1 = 0
    assert lat.meet_set(["x", "y", "1"]) == "0"


def brute_force_rpc(lat, a, b):
    """Independent oracle: scan for the greatest x with meet(a, x) <= b."""
    best = None
    for x in lat.elements:
        if lat.leq(lat.meet(a, x), b):
            if best is None or lat.leq(best, x):
                best = x
    if best is None:
        return None
    # confirm it really bounds every candidate, otherwise there is no greatest
    for x in lat.elements:
        if lat.leq(lat.meet(a, x), b) and not lat.leq(x, best):
            return None
    return best


def test_rpc_on_powerset():
    lat = powerset_lattice(["f1", "f2"])
    assert brute_force_rpc(lat, "{f1}", "{f2}") == "{f2}"
    assert lat.relative_pseudocomplement("{f1}", "{f2}") == "{f2}"


def test_rpc_of_bottom_is_top():
    for lat in sample_lattices():
        for b in lat.elements:
            assert lat.relative_pseudocomplement(lat.bottom, b) == lat.top


def test_m3_is_not_brouwer():
    lat = m3()
    assert lat.is_brouwer() is False
    with pytest.raises(NotBrouwerian):
        lat.relative_pseudocomplement("a", "b")


def test_brouwer_laws_where_applicable():
    for lat in [powerset_lattice(["f1", "f2", "f3"]), chain_lattice(["0", "m", "1"])]:
        assert lat.is_brouwer()
        for a in lat.elements:
            for b in lat.elements:
                r = lat.relative_pseudocomplement(a, b)
                assert r == brute_force_rpc(lat, a, b)
                assert lat.leq(lat.meet(a, r), b)
                for x in lat.elements:
                    assert lat.leq(x, r) == lat.leq(lat.meet(a, x), b)


def test_generators_closure():
    lat = diamond()
    assert generators_closure(lat, lat.elements)
    assert generators_closure(lat, ["x", "y"])
    chain = chain_lattice(["0", "m", "1"])
    assert not generators_closure(chain, ["0", "1"])


def test_declared_generators_are_checked():
    with pytest.raises(NotGenerating):
        verify_poset(
            ["0", "m", "1"],
            [("0", "m"), ("m", "1")],
            covers=True,
            generators=["0", "1"],
        )


def test_algebraic_laws_exhaustively():
    for lat in sample_lattices():
        for a in lat.elements:
            for b in lat.elements:
                assert lat.join(a, b) == lat.join(b, a)
                assert lat.meet(a, b) == lat.meet(b, a)
                assert lat.join(a, a) == a
                assert lat.meet(a, a) == a
                assert lat.meet(a, lat.join(a, b)) == a
                assert lat.join(a, lat.meet(a, b)) == a
                for c in lat.elements:
                    assert lat.join(lat.join(a, b), c) == lat.join(a, lat.join(b, c))
                    assert lat.meet(lat.meet(a, b), c) == lat.meet(a, lat.meet(b, c))


def test_join_is_least_upper_bound():
    # independent upper-bound scan for every pair
    for lat in sample_lattices():
        for a in lat.elements:
            for b in lat.elements:
                ubs = [x for x in lat.elements if lat.leq(a, x) and lat.leq(b, x)]
                j = lat.join(a, b)
                assert j in ubs
                assert all(lat.leq(j, x) for x in ubs)


def test_hasse_round_trip():
    for lat in sample_lattices():
        covers = lat.covers()
        closed = transitive_closure(covers, lat.elements)
        again = verify_poset(lat.elements, closed)
        assert again.leq_pairs == lat.leq_pairs


def test_dot_export_uses_cover_edges_only():
    lat = diamond()
    dot = lat.to_dot("diamond")
    assert '"x" -> "1";' in dot
    assert '"0" -> "1";' not in dot
    assert dot == lat.to_dot("diamond")
