import pytest

from monoclif.linalg import matmul
from monoclif.multivector import Multivector
from monoclif.scalars import QI2
from monoclif.spinor import (
    block_decompose_even,
    build_phi,
    colon_apply,
    commutant_dimension,
    decompose_odd,
    endo_matrix,
    gamma_matrix,
    make_null_splitting,
    phi_identity_element,
    phi_intertwining_defect,
    spin_transport_blocks,
    volume_operator,
)

ZERO = QI2(0)
ONE = QI2(1)
SQ2 = QI2(0, 1)


def inner(u, v):
    return sum(a * b for a, b in zip(u.vector_components(), v.vector_components()))


class TestNullSplitting:
    def test_rejects_odd(self):
        with pytest.raises(ValueError):
            make_null_splitting(3)

    def test_n2_pairings(self):
        s = make_null_splitting(2)
        assert inner(s.u[0], s.u[0]) == ZERO
        assert inner(s.ustar[0], s.ustar[0]) == ZERO
        assert inner(s.u[0], s.ustar[0]) == ONE

    def test_n4_pairings(self):
        s = make_null_splitting(4)
        for j in range(2):
            for k in range(2):
                assert inner(s.u[j], s.u[k]) == ZERO
                assert inner(s.ustar[j], s.ustar[k]) == ZERO
                assert inner(s.u[j], s.ustar[k]) == (ONE if j == k else ZERO)

    def test_norm_equals_twice_pairing(self):
        # |alpha + beta|^2 = 2 * sum a_k b_k, e.g. u_1 + u*_2 is null
        s = make_null_splitting(4)
        v = s.u[0] + s.ustar[1]
        alphas, betas = s.decompose(v)
        assert inner(v, v) == 2 * s.pairing(alphas, betas)
        assert inner(v, v) == ZERO

    def test_decompose_recovers_basis(self):
        s = make_null_splitting(4)
        a, b = s.decompose(s.u[1])
        assert a == [ZERO, ONE] and b == [ZERO, ZERO]
        a, b = s.decompose(Multivector.basis_vector(4, 1))
        # e_1 = (u_1 + u*_1)/sqrt2
        assert a[0] * SQ2 == ONE and b[0] * SQ2 == ONE


class TestColonAction:
    def test_creation_on_vacuum(self):
        s = make_null_splitting(2)
        out = colon_apply(s, s.u[0], {0: ONE})  # 1 (x) 1
        assert out == {1 << 1: SQ2}  # sqrt2 * u_1 (x) 1

    def test_annihilation_of_vacuum(self):
        s = make_null_splitting(2)
        for t in range(2):
            out = colon_apply(s, s.ustar[0], {t: ONE})  # vacuum U-part
            assert out == {}

    def test_clifford_square(self):
        s = make_null_splitting(4)
        v = s.u[0] + s.ustar[0]
        elem = {(2 << 2) | 1: QI2(3)}  # arbitrary basis element with passenger
        out = colon_apply(s, v, colon_apply(s, v, elem))
        assert out == {k: -2 * c for k, c in elem.items()}

    def test_passenger_untouched(self):
        s = make_null_splitting(4)
        for t in range(4):
            out = colon_apply(s, s.u[1], {0 + t: ONE})
            assert set(out) == {(2 << 2) | t}


class TestGammaMatrices:
    def test_n2_shapes_and_relations(self):
        s = make_null_splitting(2)
        g1 = gamma_matrix(Multivector.basis_vector(2, 1), s)
        g2 = gamma_matrix(Multivector.basis_vector(2, 2), s)
        assert len(g1) == 2
        anti = matmul(g1, g2)
        ba = matmul(g2, g1)
        for i in range(2):
            for j in range(2):
                assert anti[i][j] + ba[i][j] == ZERO
        sq = matmul(g1, g1)
        assert sq[0][0] == QI2(-1) and sq[1][1] == QI2(-1)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_clifford_relations_all_pairs(self, n):
        s = make_null_splitting(n)
        basis = [Multivector.basis_vector(n, a) for a in range(1, n + 1)]
        gams = [gamma_matrix(v, s) for v in basis]
        dim = 1 << (n // 2)
        for i in range(n):
            for j in range(i, n):
                anti = matmul(gams[i], gams[j])
                ba = matmul(gams[j], gams[i])
                expect = QI2(-2) if i == j else ZERO
                for r in range(dim):
                    for c in range(dim):
                        val = anti[r][c] + ba[r][c]
                        assert val == (expect if r == c else ZERO)

    def test_complexified_relations(self):
        # <u_j, u*_k> = delta gives gamma(u_j)gamma(u*_k) + sym = -2 delta
        n = 4
        s = make_null_splitting(n)
        for j in range(2):
            for k in range(2):
                gj = gamma_matrix(s.u[j], s)
                gk = gamma_matrix(s.ustar[k], s)
                anti = matmul(gj, gk)
                ba = matmul(gk, gj)
                expect = QI2(-2) if j == k else ZERO
                for r in range(4):
                    for c in range(4):
                        val = anti[r][c] + ba[r][c]
                        assert val == (expect if r == c else ZERO)

    def test_traceless(self):
        s = make_null_splitting(4)
        for a in range(1, 5):
            g = gamma_matrix(Multivector.basis_vector(4, a), s)
            assert sum((g[i][i] for i in range(4)), ZERO) == ZERO

    def test_parity_exchange(self):
        s = make_null_splitting(4)
        for a in range(1, 5):
            g = gamma_matrix(Multivector.basis_vector(4, a), s)
            for r in range(4):
                for c in range(4):
                    if g[r][c] != ZERO:
                        assert (bin(r).count("1") + bin(c).count("1")) % 2 == 1


class TestPhi:
    def test_identity_element_n2(self):
        phi = build_phi(2)
        # Phi(1) = 1(x)1 + u_1(x)u*_1
        assert phi.cols[0] == {0: ONE, 3: ONE}

    def test_identity_is_identity_endo(self):
        for n in (2, 4):
            m = n // 2
            e = endo_matrix(phi_identity_element(m), m)
            for i in range(1 << m):
                for j in range(1 << m):
                    assert e[i][j] == (ONE if i == j else 0)

    def test_vector_images(self):
        # Phi(u_1) = sqrt2 (u_1 (x) 1 + (u_1^u_2) (x) u*_2) for n = 4
        n = 4
        phi = build_phi(n)
        s = phi.split
        img = phi.apply(s.u[0])
        assert img == {(1 << 2) | 0: SQ2, (3 << 2) | 2: SQ2}
        img_star = phi.apply(s.ustar[0])
        assert img_star == {(0 << 2) | 1: -SQ2, (2 << 2) | 3: -SQ2}

    def test_endo_of_vector_is_gamma(self):
        for n in (2, 4):
            phi = build_phi(n)
            m = n // 2
            for a in range(1, n + 1):
                v = Multivector.basis_vector(n, a)
                assert endo_matrix(phi.apply(v), m) == gamma_matrix(v, phi.split)

    @pytest.mark.parametrize("n", [2, 4])
    def test_intertwines_exactly(self, n):
        phi = build_phi(n)
        assert phi_intertwining_defect(phi) == 0
        s = phi.split
        assert phi_intertwining_defect(phi, vectors=list(s.u) + list(s.ustar)) == 0

    def test_construction_orders_coincide(self):
        for n in (2, 4):
            a, b = build_phi(n, "lex"), build_phi(n, "revlex")
            assert a.cols == b.cols

    def test_invertible(self):
        assert build_phi(4).is_invertible()

    def test_rejects_odd(self):
        with pytest.raises(ValueError):
            build_phi(3)

    def test_float_mode_matches_exact(self):
        exact = build_phi(4, exact=True)
        approx = build_phi(4, exact=False)
        for ce, ca in zip(exact.cols, approx.cols):
            assert set(ce) == set(ca)
            for k in ce:
                assert abs(complex(ce[k]) - complex(ca[k])) < 1e-9


class TestBlockDecomposition:
    @pytest.mark.parametrize("n", [2, 4])
    def test_exact(self, n):
        rep = block_decompose_even(n)
        assert rep["defect"] == 0
        assert rep["copies"] == 1 << (n // 2)
        assert rep["construction_orders_agree"]
        assert rep["dimension_identity"]

    def test_spin_transport_is_blockwise(self):
        for n in (2, 4):
            assert spin_transport_blocks(n) == 0

    def test_float_fallback_n8(self):
        rep = block_decompose_even(8, exact=False)
        assert rep["defect"] < 1e-9
        assert rep["copies"] == 16


class TestOddDecomposition:
    def test_volume_square_and_centrality(self):
        for n in (1, 3):
            rep = decompose_odd(n)
            assert rep["volume_square_defect"] == 0
            assert rep["centrality_defect"] == 0

    def test_n1_trivial(self):
        rep = decompose_odd(1)
        assert rep["eigenspaces"]["plus"]["dimension"] == 1
        assert rep["eigenspaces"]["minus"]["dimension"] == 1
        assert rep["copies"] == 2

    def test_n3_structure(self):
        rep = decompose_odd(3)
        for side in ("plus", "minus"):
            e = rep["eigenspaces"][side]
            assert e["dimension"] == 4
            assert e["multiplicity"] == 2
            assert e["invariant_defect"] == 0
            assert e["clifford_relation_defect"] == 0
        assert rep["spinor_dim"] == 2
        assert rep["copies"] == 4 == rep["copies_expected"]
        assert rep["dimension_identity"]

    def test_n3_commutant_certifies_multiplicity(self):
        # two copies of an absolutely irreducible module: commutant dim 4
        assert commutant_dimension(3, 1) == 4
        assert commutant_dimension(3, -1) == 4

    def test_rejects_even(self):
        with pytest.raises(ValueError):
            decompose_odd(4)


def test_volume_operator_even_anticommutes():
    # for even n the volume element is not central: sanity on the helper
    om = volume_operator(2)
    sq = om.compose(om)
    # (i e_1 e_2)^2 = -(e_1e_2)^2 = ... = +1? n=2: n(n+1)/2 = 3 odd, k=1:
    # overall (-1)^1 * (-1)^3 = +1, still involutive, but not central.
    from monoclif.linalg import SparseMap

    assert (sq - SparseMap.identity(4, QI2(1))).max_abs() == 0
