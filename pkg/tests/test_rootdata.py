import math
from fractions import Fraction

import pytest

import oracles as O
from weyl_torus.errors import RankError, ResourceLimitError, ValidationError
from weyl_torus.rootdata import (
    RootSystemType,
    build_root_system,
    expected_fundamental_orbit_size,
    group_elements,
    identity_matrix,
    integer_det,
    is_orthogonal_in_weight_basis,
    mat_mul,
    orbit,
    root_system,
    simple_reflection_matrices,
    stabilizer_order,
    unit_vector,
)

SYSTEMS = [(f, r) for f in "ABC" for r in range(2, 6)] + [("D", r) for r in range(3, 6)] + [("A", 1)]


def F(*xs):
    return tuple(Fraction(x) for x in xs)


# [PAPER] planche data
def test_c2_planche():
    d = root_system("C", 2)
    assert d.simple_roots == (F(1, -1), F(0, 2))
    # the figure lists the same two vectors with the indices swapped; the
    # duality <omega_i, rho_j^vee> = delta_ij fixes the order used here
    assert d.fundamental_weights == (F(1, 0), F(1, 1))
    assert set(d.fundamental_weights) == {F(1, 1), F(1, 0)}


def test_a2_and_b2_weights():
    a2 = root_system("A", 2)
    assert a2.fundamental_weights == (
        tuple(Fraction(x, 3) for x in (2, -1, -1)),
        tuple(Fraction(x, 3) for x in (1, 1, -2)),
    )
    b2 = root_system("B", 2).fundamental_weights
    assert set(b2) == {F(Fraction(1, 2), Fraction(1, 2)), F(1, 0)}
    assert b2[1] == F(Fraction(1, 2), Fraction(1, 2))


def test_cartan_c2_from_roots():
    # [DERIVED] 2<r_i, r_j>/<r_j, r_j> from the printed roots
    roots = O.simple_roots("C", 2)
    expected = tuple(
        tuple(int(2 * O._dot(a, b) / O._dot(b, b)) for b in roots) for a in roots
    )
    assert root_system("C", 2).cartan == expected == ((2, -1), (-2, 2))


@pytest.mark.parametrize("fam,r", SYSTEMS)
def test_planche_matches_classical_oracle(fam, r):
    d = root_system(fam, r)
    assert [list(v) for v in d.simple_roots] == O.simple_roots(fam, r)
    assert [list(v) for v in d.fundamental_weights] == O.fundamental_weights(fam, r)
    assert d.group_order == O.group_order(fam, r)
    assert all(v == (1 if i == j else 0) for i, row in enumerate(d.rho_coroot_pairing) for j, v in enumerate(row))


HIGHEST = {
    "A": lambda m: [1] + [0] * (m - 2) + [-1],
    "B": lambda m: [1, 1] + [0] * (m - 2),
    "C": lambda m: [2] + [0] * (m - 1),
    "D": lambda m: [1, 1] + [0] * (m - 2),
}


@pytest.mark.parametrize("fam,r", SYSTEMS)
def test_highest_root(fam, r):
    d = root_system(fam, r)
    assert list(d.highest_root) == HIGHEST[fam](d.ambient_dim)


@pytest.mark.parametrize("fam,r", SYSTEMS)
def test_generators_are_orthogonal_involutions(fam, r):
    d = root_system(fam, r)
    ident = identity_matrix(r)
    for b in simple_reflection_matrices(d):
        assert mat_mul(b, b) == ident
        assert integer_det(b) == -1
        assert is_orthogonal_in_weight_basis(d, b)


def test_a1_generator():
    assert simple_reflection_matrices(root_system("A", 1)) == [((-1,),)]


def test_c2_generators_generate_dihedral_order_8():
    s1, s2 = simple_reflection_matrices(root_system("C", 2))
    p, ident = mat_mul(s1, s2), identity_matrix(2)
    powers = [ident]
    for _ in range(4):
        powers.append(mat_mul(powers[-1], p))
    assert powers[4] == ident and ident not in powers[1:4]
    assert len(group_elements(root_system("C", 2))) == 8


@pytest.mark.parametrize("fam,r,i,size", [("C", 2, 0, 4), ("A", 2, 0, 3), ("D", 4, 3, 8)])
def test_orbit_examples(fam, r, i, size):
    assert len(orbit(root_system(fam, r), unit_vector(r, i))) == size


@pytest.mark.parametrize("fam,r", SYSTEMS)
def test_fundamental_orbits_match_oracle(fam, r):
    d = root_system(fam, r)
    for i in range(r):
        orb = orbit(d, unit_vector(r, i))
        assert sorted(orb) == O.weight_orbit(fam, r, i)
        assert len(orb) == expected_fundamental_orbit_size(fam, r, i + 1)
        assert len(orb) * stabilizer_order(d, unit_vector(r, i)) == d.group_order


@pytest.mark.parametrize("fam,r", [("A", 3), ("B", 3), ("C", 3), ("D", 4)])
def test_group_elements_match_classical_group(fam, r):
    d = root_system(fam, r)
    els = group_elements(d)
    assert sorted(m for m, _ in els) == O.group_matrices(fam, r)
    assert all(integer_det(m) == s for m, s in els)


def test_rank_errors():
    for fam, r in [("A", 0), ("B", 1), ("D", 2), ("E", 6), ("C", 0)]:
        with pytest.raises(RankError):
            root_system(fam, r)
    with pytest.raises(RankError):
        RootSystemType("B", 1.5)
    assert build_root_system(RootSystemType("c", 1)).group_order == 2


def test_orbit_validation_and_cap():
    d = root_system("B", 4)
    with pytest.raises(ValidationError):
        orbit(d, (1, 0))
    with pytest.raises(ResourceLimitError):
        orbit(d, (1, 1, 1, 1), cap=10)
    with pytest.raises(ResourceLimitError):
        group_elements(d, cap=100)


def test_orbit_closed_form_all_weights():
    for fam, r in SYSTEMS:
        for i in range(1, r + 1):
            got = expected_fundamental_orbit_size(fam, r, i)
            if fam == "A":
                assert got == math.comb(r + 1, i)
            elif fam == "D" and i >= r - 1:
                assert got == 2 ** (r - 1)
            else:
                assert got == 2**i * math.comb(r, i)
