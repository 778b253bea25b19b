import pytest
from hypothesis import given, settings, strategies as st

from conftest import alternating_matrices, square_matrices
from hspgen.matrix import (
    PolyMatrix,
    ShapeError,
    SignMode,
    complement,
    det_bareiss,
    det_leibniz,
    det_minors,
    msf_det_assemble,
    msf_det_rhs,
    msf_pf_rhs,
    perfect_matchings,
    perm_sign,
    pf_antidiag,
    pfaffian_expansion,
    pfaffian_matchings,
    submatrix,
)
from hspgen.ring import ONE, U, ZERO, VariableId, var
from hspgen.verify import generic_msf_pf_matrix


def g(name, *idx):
    return var(VariableId(name, idx))


u, v = var(U), var(VariableId("v"))


def generic_alternating(n, name="a"):
    return PolyMatrix.build(
        n, n, lambda i, j: ZERO if i == j else (g(name, i + 1, j + 1) if i < j else -g(name, j + 1, i + 1))
    )


class TestDeterminants:
    def test_small_examples(self):
        assert det_bareiss(PolyMatrix.from_rows([[u]])) == u
        b, c = g("b"), g("c")
        m = PolyMatrix.from_rows([[u, b], [c, v]])
        assert det_bareiss(m) == det_leibniz(m) == u * v - b * c
        assert det_bareiss(PolyMatrix.identity(3)) == ONE

    def test_zero_row_and_scalar_diagonal(self):
        m = PolyMatrix.from_rows([[u, v, 1], [0, 0, 0], [v, u, 2]])
        assert det_bareiss(m) == ZERO
        assert det_bareiss(PolyMatrix.identity(4).scale(u)) == u**4

    def test_pivot_swap(self):
        # leading zero forces a row exchange
        m = PolyMatrix.from_rows([[0, u], [v, 1]])
        assert det_bareiss(m) == -u * v

    def test_non_square_rejected(self):
        with pytest.raises(ShapeError):
            det_bareiss(PolyMatrix.zeros(2, 3))

    def test_generic_four_by_four(self):
        m = PolyMatrix.build(4, 4, lambda i, j: g("m", i + 1, j + 1))
        assert det_bareiss(m) == det_leibniz(m)

    @settings(max_examples=50)
    @given(square_matrices(4))
    def test_bareiss_matches_leibniz(self, m):
        assert det_bareiss(m) == det_leibniz(m) == det_minors(m)

    def test_minor_expansion_edge_cases(self):
        assert det_minors(PolyMatrix.zeros(0, 0)) == ONE
        assert det_minors(PolyMatrix.from_rows([[0, u], [v, 1]])) == -u * v
        assert det_minors(PolyMatrix.from_rows([[u, v], [0, 0]])) == ZERO

    @given(square_matrices(3), st.sampled_from([ONE, u, v + 1]))
    def test_unipotent_conjugation_keeps_det(self, m, x):
        up = PolyMatrix.from_rows([[1, x, 0], [0, 1, 0], [0, 0, 1]])
        inv = PolyMatrix.from_rows([[1, -x, 0], [0, 1, 0], [0, 0, 1]])
        assert up @ inv == PolyMatrix.identity(3)
        assert det_bareiss(up @ m @ inv) == det_bareiss(m)


class TestPfaffians:
    def test_two_by_two(self):
        a = g("a")
        m = PolyMatrix.from_rows([[0, a], [-a, 0]])
        assert pfaffian_expansion(m) == pfaffian_matchings(m) == a

    def test_generic_four_by_four(self):
        m = generic_alternating(4)
        a = lambda i, j: g("a", i, j)  # noqa: E731
        expected = a(1, 2) * a(3, 4) - a(1, 3) * a(2, 4) + a(1, 4) * a(2, 3)
        assert pfaffian_matchings(m) == pfaffian_expansion(m) == expected
        assert expected**2 == det_bareiss(m)

    def test_empty(self):
        assert pfaffian_expansion(PolyMatrix.zeros(0, 0)) == ONE
        assert pfaffian_matchings(PolyMatrix.zeros(0, 0)) == ONE

    def test_odd_size_rejected(self):
        with pytest.raises(ShapeError):
            pfaffian_expansion(generic_alternating(3))

    def test_matching_count(self):
        assert len(list(perfect_matchings(list(range(6))))) == 15

    def test_block_diagonal_is_product(self):
        a, b = generic_alternating(2, "a"), generic_alternating(4, "b")
        m = PolyMatrix.blocks([[a, PolyMatrix.zeros(2, 4)], [PolyMatrix.zeros(4, 2), b]])
        assert pfaffian_expansion(m) == pfaffian_expansion(a) * pfaffian_expansion(b)

    def test_rejects_non_alternating(self):
        with pytest.raises(ValueError):
            pfaffian_expansion(PolyMatrix.from_rows([[u, 1], [-1, 0]]))

    def test_antidiagonal_convention(self):
        a = g("a")
        m = PolyMatrix.from_rows([[a, 0], [0, -a]])
        assert pf_antidiag(m) == pf_antidiag(m, backend="matchings") == a

    @settings(max_examples=30)
    @given(st.sampled_from([2, 4, 6]).flatmap(alternating_matrices))
    def test_expansion_matches_matchings_and_squares_to_det(self, m):
        pf = pfaffian_expansion(m)
        assert pf == pfaffian_matchings(m)
        assert pf**2 == det_bareiss(m)


class TestSubsets:
    def test_perm_sign_examples(self):
        assert perm_sign([1, 2], [3, 4]) == 1
        assert perm_sign([2], [1, 3]) == -1
        assert perm_sign([3, 4], [1, 2]) == 1

    def test_perm_sign_rejects_non_partition(self):
        with pytest.raises(ValueError):
            perm_sign([1, 2], [2, 3])

    def test_submatrix(self):
        m = generic_alternating(3, "z")
        assert submatrix(m, [1, 2, 3], [1, 2, 3]) == m
        assert submatrix(m, [2], [3]).shape == (1, 1)
        z13 = g("z", 1, 3)
        assert submatrix(m, [1, 3], [1, 3]) == PolyMatrix.from_rows([[0, z13], [-z13, 0]])

    def test_subset_validation(self):
        m = PolyMatrix.identity(3)
        with pytest.raises(ValueError):
            submatrix(m, [2, 1], [1, 2])
        with pytest.raises(IndexError):
            submatrix(m, [1, 4], [1, 2])
        assert complement([2], 3) == (1, 3)


class TestMinorSummation:
    def test_pf_n1(self):
        a = g("a", 1, 1)
        m = PolyMatrix.from_rows([[a, 0], [0, -a]])
        assert msf_pf_rhs(m) == pf_antidiag(m) == a

    @pytest.mark.parametrize("n", [2, 3])
    def test_pf_generic(self, n):
        m = generic_msf_pf_matrix(n)
        assert msf_pf_rhs(m) == pf_antidiag(m)

    def test_pf_without_off_blocks_is_det(self):
        m = generic_msf_pf_matrix(3)
        n = 3
        stripped = PolyMatrix.build(6, 6, lambda i, j: m[i, j] if (i < n) == (j < n) else ZERO)
        assert msf_pf_rhs(stripped) == det_bareiss(stripped.block(0, n, 0, n))

    def _bc(self, p, q):
        b = PolyMatrix.build(p, q, lambda i, j: g("b", i + 1, j + 1))
        c = PolyMatrix.build(p, q, lambda i, j: g("c", i + 1, j + 1))
        return b, c

    def test_det_one_by_one_modes(self):
        b, c = self._bc(1, 1)
        det = det_leibniz(msf_det_assemble(b, c, u, v))
        b11, c11 = g("b", 1, 1), g("c", 1, 1)
        assert det == u * v - b11 * c11
        assert msf_det_rhs(b, c, u, v, SignMode.CORRECTED) == det
        printed = msf_det_rhs(b, c, u, v, SignMode.PRINTED)
        assert printed == u * v + b11 * c11
        assert printed - det == 2 * b11 * c11

    @pytest.mark.parametrize("pq", [(2, 1), (2, 2), (3, 2)])
    def test_det_corrected_matches_leibniz(self, pq):
        b, c = self._bc(*pq)
        assert msf_det_rhs(b, c, u, v) == det_leibniz(msf_det_assemble(b, c, u, v))

    def test_det_signature_mode_fails(self):
        b, c = self._bc(2, 1)
        assert msf_det_rhs(b, c, u, v, SignMode.SIGNATURE) != det_bareiss(msf_det_assemble(b, c, u, v))

    def test_det_zero_off_blocks(self):
        p, q = 3, 2
        z = PolyMatrix.zeros(p, q)
        assert msf_det_rhs(z, z, u, v) == u**p * v**q

    def test_det_layout_mismatch(self):
        b, _ = self._bc(2, 1)
        with pytest.raises(ShapeError):
            msf_det_assemble(b, PolyMatrix.zeros(1, 2), u, v)
