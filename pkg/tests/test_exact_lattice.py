"""Exact-lattice operations against hand-computed values and brute-force
oracles.  Derived expectations are computed by an independent path (plain
box enumeration, rational elimination) and frozen here."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowdown_lab.errors import DomainError
from blowdown_lab.exact_lattice import (
    HomClass,
    IntLattice,
    RationalClass,
    brute_force_solve,
    expand_in_basis,
    express_in_basis,
    format_class,
    gram_of,
    integer_kernel,
    orthogonal_complement,
    pair,
    solve_class,
    span_lattice,
    square,
)


def blowup_lattice(k: int) -> IntLattice:
    """CP2 # k CP2-bar: <1> + k <-1> with labels H, E1..Ek."""
    return IntLattice.diagonal(
        [1] + [-1] * k, ["H"] + [f"E{i}" for i in range(1, k + 1)]
    )


def one_point_lattice(k: int) -> IntLattice:
    """Labels H, E, E1..Ek (the arrangement lattices)."""
    return IntLattice.diagonal(
        [1, -1] + [-1] * k, ["H", "E"] + [f"E{i}" for i in range(1, k + 1)]
    )


class TestLatticeConstruction:
    def test_gram_must_be_symmetric(self):
        with pytest.raises(DomainError, match="symmetric"):
            IntLattice.make([[0, 1], [2, 0]], ["a", "b"])

    def test_labels_must_be_distinct(self):
        with pytest.raises(DomainError, match="distinct"):
            IntLattice.diagonal([1, 1], ["a", "a"])

    def test_rank_zero(self):
        lat = IntLattice.make([], [])
        assert lat.rank == 0
        assert gram_of([]) == []

    def test_combo_and_basis(self):
        lat = blowup_lattice(2)
        h = lat.basis_class("H")
        assert h.coeffs == (1, 0, 0)
        cls = lat.combo({"H": 3, "E2": -1})
        assert cls.coeffs == (3, 0, -1)
        assert format_class(cls) == "3H-E2"

    def test_coefficient_length_checked(self):
        with pytest.raises(DomainError):
            HomClass(blowup_lattice(1), (1,))


class TestPairAndSquare:
    def test_h_squared_is_one(self):
        lat = blowup_lattice(3)
        assert square(lat.basis_class("H")) == 1

    def test_distinct_exceptionals_orthogonal(self):
        lat = blowup_lattice(3)
        assert pair(lat.basis_class("E1"), lat.basis_class("E2")) == 0

    def test_gamma_pairing_prop_setting(self):
        # gamma_1 = (2p-5) alpha + beta, gamma_2 = alpha - eps with p = 4,
        # alpha = H - E, beta = H - E1..E4, eps = E5
        lat = one_point_lattice(5)
        alpha = lat.combo({"H": 1, "E": -1})
        beta = lat.combo({"H": 1, "E1": -1, "E2": -1, "E3": -1, "E4": -1})
        eps = lat.basis_class("E5")
        assert pair(3 * alpha + beta, alpha - eps) == 1

    def test_pencil_square(self):
        # (qH - (q-2)E)^2 at q = 4: 16 - 4 by diagonal Gram arithmetic
        lat = one_point_lattice(0)
        assert square(lat.combo({"H": 4, "E": -2})) == 12

    def test_vertical_fiber_square_zero(self):
        lat = one_point_lattice(0)
        assert square(lat.combo({"H": 1, "E": -1})) == 0

    def test_s_curve_square(self):
        # (pH - (p-3)E)^2 = 6p - 9 at p = 5
        lat = one_point_lattice(0)
        assert square(lat.combo({"H": 5, "E": -2})) == 21

    def test_lattice_mismatch_rejected(self):
        a = blowup_lattice(1).basis_class("H")
        b = blowup_lattice(2).basis_class("H")
        with pytest.raises(DomainError, match="different lattices"):
            pair(a, b)


class TestGramOf:
    def gammas(self, p: int):
        count = 4 * p - 11
        lat = one_point_lattice(count)
        alpha = lat.combo({"H": 1, "E": -1})
        beta = lat.combo({"H": 1, **{f"E{i}": -1 for i in range(1, 2 * p - 3)}})
        eps = lat.combo({f"E{j}": 1 for j in range(2 * p - 3, 4 * p - 10)})
        return (2 * p - 5) * alpha + beta, alpha - eps

    def test_gamma_gram_p4(self):
        assert gram_of(self.gammas(4)) == [[3, 1], [1, -1]]

    def test_gamma_gram_p6(self):
        assert gram_of(self.gammas(6)) == [[7, 1], [1, -5]]


def box_kernel_oracle(lat: IntLattice, classes, bound: int):
    """All box vectors orthogonal to the given classes (plain enumeration)."""
    out = []
    for combo in itertools.product(range(-bound, bound + 1), repeat=lat.rank):
        cand = lat.from_coeffs(combo)
        if all(pair(cand, c) == 0 for c in classes):
            out.append(cand)
    return out


class TestOrthogonalComplement:
    def test_empty_input_gives_identity_basis(self):
        lat = blowup_lattice(2)
        comp = orthogonal_complement(lat, [])
        assert [v.coeffs for v in comp] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]

    def test_complement_of_one_exceptional(self):
        lat = blowup_lattice(2)
        comp = orthogonal_complement(lat, [lat.basis_class("E1")])
        assert sorted(v.coeffs for v in comp) == [(0, 0, 1), (1, 0, 0)]
        # brute-force oracle: every orthogonal box vector is an integral
        # combination of the returned basis
        for vec in box_kernel_oracle(lat, [lat.basis_class("E1")], 3):
            assert express_in_basis(vec, comp).is_integral()

    def test_prop_config_complement(self):
        # Q-lattice for p = 4: basis alpha, beta, E5 with beta^2 = 5 - 2p
        lat = IntLattice.make(
            [[0, 1, 0], [1, -3, 0], [0, 0, -1]], ["a", "b", "E5"]
        )
        s0 = lat.combo({"b": 1, "E5": -1})
        comp = orthogonal_complement(lat, [s0])
        assert len(comp) == 2
        gamma1 = lat.combo({"a": 3, "b": 1})
        gamma2 = lat.combo({"a": 1, "E5": -1})
        assert express_in_basis(gamma1, comp).is_integral()
        assert express_in_basis(gamma2, comp).is_integral()
        assert gram_of([gamma1, gamma2]) == [[3, 1], [1, -1]]

    def test_saturation(self):
        # kernel of (2, 4) must be the primitive (2, -1), not (4, -2)
        assert integer_kernel([[2, 4]], 2) == [[2, -1]]

    def test_rank_addition(self):
        # rank(complement) + rank(span) = lattice rank when the pairing is
        # nondegenerate on an independent input span
        lat = one_point_lattice(4)
        inputs = [
            lat.combo({"H": 1, "E": -1, "E1": -1}),
            lat.combo({"E2": 1, "E3": -1}),
        ]
        assert gram_of(inputs)[0][0] != 0  # nondegenerate on the span
        comp = orthogonal_complement(lat, inputs)
        assert len(comp) + len(inputs) == lat.rank

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_complement_against_box_oracle(self, data):
        rank = data.draw(st.integers(2, 4))
        entries = data.draw(
            st.lists(st.integers(-2, 2), min_size=rank * rank, max_size=rank * rank)
        )
        gram = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            for j in range(i, rank):
                gram[i][j] = gram[j][i] = entries[i * rank + j]
        lat = IntLattice.make(gram, [f"x{i}" for i in range(rank)])
        cls = lat.from_coeffs(
            data.draw(st.lists(st.integers(-2, 2), min_size=rank, max_size=rank))
        )
        comp = orthogonal_complement(lat, [cls])
        for v in comp:
            assert pair(v, cls) == 0
        for vec in box_kernel_oracle(lat, [cls], 2):
            if comp:
                assert express_in_basis(vec, comp).is_integral()
            else:
                assert vec.is_zero()


class TestExpressInBasis:
    def test_sigma_in_gamma_basis(self):
        lat = one_point_lattice(5)
        alpha = lat.combo({"H": 1, "E": -1})
        beta = lat.combo({"H": 1, "E1": -1, "E2": -1, "E3": -1, "E4": -1})
        eps = lat.basis_class("E5")
        gamma1, gamma2 = 3 * alpha + beta, alpha - eps
        sigma = 7 * alpha + 2 * beta - eps
        coords = express_in_basis(sigma, [gamma1, gamma2])
        assert coords.coeffs == (Fraction(2), Fraction(1))
        assert coords.is_integral()

    def test_rational_coords_for_e(self):
        # e = ((p-4) gamma_1 + (p-2) gamma_2) / (2p-6) at p = 5 -> (1/4, 3/4)
        lat = one_point_lattice(9)
        alpha = lat.combo({"H": 1, "E": -1})
        beta = lat.combo({"H": 1, **{f"E{i}": -1 for i in range(1, 7)}})
        eps = lat.combo({f"E{j}": 1 for j in range(7, 10)})
        gamma1, gamma2 = 5 * alpha + beta, alpha - eps
        target = (gamma1.to_rational() + 3 * gamma2.to_rational()) * Fraction(1, 4)
        coords = express_in_basis(target, [gamma1, gamma2])
        assert coords.coeffs == (Fraction(1, 4), Fraction(3, 4))

    def test_basis_vector_in_own_basis(self):
        lat = blowup_lattice(2)
        basis = [lat.basis_class("H"), lat.basis_class("E1")]
        coords = express_in_basis(basis[1], basis)
        assert coords.coeffs == (Fraction(0), Fraction(1))

    def test_expansion_inverts_expression(self):
        lat = one_point_lattice(3)
        basis = [
            lat.combo({"H": 1, "E": -1}),
            lat.combo({"H": 2, "E1": -1}),
            lat.basis_class("E2"),
        ]
        target = lat.combo({"H": 8, "E": -2, "E1": -3, "E2": 4})
        coords = express_in_basis(target, basis)
        assert expand_in_basis(coords, basis).coeffs == target.to_rational().coeffs

    def test_dependent_basis_rejected(self):
        lat = blowup_lattice(1)
        h = lat.basis_class("H")
        with pytest.raises(DomainError, match="dependent"):
            express_in_basis(h, [h, 2 * h])

    def test_target_outside_span_rejected(self):
        lat = blowup_lattice(2)
        with pytest.raises(DomainError, match="span"):
            express_in_basis(lat.basis_class("E2"), [lat.basis_class("H")])


def lemma_constraints(lat: IntLattice, q: int):
    cons = [(lat.combo({"H": 1, "E": -1}), 2)]
    for i in range(1, 2 * q + 1):
        cons.append((lat.combo({f"E{2 * i}": 1, f"E{2 * i - 1}": -1}), 0))
        cons.append(
            (lat.combo({"H": 1, "E": -1, f"E{2 * i - 1}": -1, f"E{2 * i}": -1}), 0)
        )
    return cons


def rational_elimination_oracle(lat, constraints, square_target, bound):
    """Independent solver: parametrize the affine solution set of the linear
    system by rational elimination, enumerate lattice points in the box, and
    filter by the square.  No tree search involved."""
    n = lat.rank
    rows = []
    rhs = []
    for v, t in constraints:
        rows.append(
            [
                sum(lat.gram[i][j] * v.coeffs[j] for j in range(n))
                for i in range(n)
            ]
        )
        rhs.append(t)
    mat = [[Fraction(x) for x in row] + [Fraction(t)] for row, t in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c] / pv
                for cc in range(c, n + 1):
                    mat[i][cc] -= f * mat[r][cc]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(mat)):
        assert mat[i][n] == 0, "inconsistent system"
    free_cols = [c for c in range(n) if c not in piv_cols]
    out = []
    for values in itertools.product(range(-bound, bound + 1), repeat=len(free_cols)):
        vec = [Fraction(0)] * n
        for c, v in zip(free_cols, values):
            vec[c] = Fraction(v)
        ok = True
        for row_idx, c in enumerate(piv_cols):
            acc = mat[row_idx][n]
            for fc, v in zip(free_cols, values):
                acc -= mat[row_idx][fc] * v
            acc /= mat[row_idx][c]
            if acc.denominator != 1 or abs(acc) > bound:
                ok = False
                break
            vec[c] = acc
        if not ok:
            continue
        cand = lat.from_coeffs([int(v) for v in vec])
        if square(cand) == square_target:
            out.append(cand)
    return out


class TestSolveClass:
    def test_lemma_q3(self):
        q = 3
        lat = one_point_lattice(4 * q)
        sols = solve_class(lat, lemma_constraints(lat, q), 0, coeff_bound=q + 2)
        assert len(sols) == 1
        expected = lat.combo(
            {"H": 4, "E": -2, **{f"E{i}": -1 for i in range(1, 13)}}
        )
        assert sols[0] == expected

    def test_lemma_q5_against_elimination_oracle(self):
        q = 5
        lat = one_point_lattice(4 * q)
        cons = lemma_constraints(lat, q)
        sols = solve_class(lat, cons, 0, coeff_bound=8)
        oracle = rational_elimination_oracle(lat, cons, 0, 8)
        assert [s.coeffs for s in sols] == [s.coeffs for s in oracle]
        assert len(sols) == 1
        assert sols[0].coeffs[0] == q + 1

    def test_impossible_square_gives_empty(self):
        lat = IntLattice.diagonal([1], ["x"])
        assert solve_class(lat, [], 2, coeff_bound=4) == []

    def test_up_to_sign_dedup(self):
        lat = IntLattice.diagonal([1], ["x"])
        sols = solve_class(lat, [], 4, coeff_bound=3)
        assert [s.coeffs for s in sols] == [(-2,), (2,)]
        deduped = solve_class(lat, [], 4, coeff_bound=3, up_to_sign=True)
        assert [s.coeffs for s in deduped] == [(-2,)]

    def test_negative_bound_rejected(self):
        lat = IntLattice.diagonal([1], ["x"])
        with pytest.raises(DomainError):
            solve_class(lat, [], 0, coeff_bound=-1)

    def test_matches_brute_force_rank6(self):
        lat = IntLattice.diagonal([1, -1, -1, -1, -1, -1], list("abcdef"))
        cons = [(lat.combo({"a": 1, "b": -1}), 1)]
        fast = solve_class(lat, cons, 0, coeff_bound=2)
        slow = brute_force_solve(lat, cons, 0, coeff_bound=2)
        assert [s.coeffs for s in fast] == [s.coeffs for s in slow]
        assert fast  # the search space is nonempty

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_matches_brute_force_random(self, data):
        rank = data.draw(st.integers(1, 4))
        diag = data.draw(
            st.lists(st.sampled_from([-2, -1, 1, 2]), min_size=rank, max_size=rank)
        )
        lat = IntLattice.diagonal(diag, [f"x{i}" for i in range(rank)])
        ncons = data.draw(st.integers(0, 2))
        cons = []
        for _ in range(ncons):
            coeffs = data.draw(
                st.lists(st.integers(-2, 2), min_size=rank, max_size=rank)
            )
            cons.append((lat.from_coeffs(coeffs), data.draw(st.integers(-3, 3))))
        target = data.draw(st.integers(-6, 6))
        fast = solve_class(lat, cons, target, coeff_bound=2)
        slow = brute_force_solve(lat, cons, target, coeff_bound=2)
        assert [s.coeffs for s in fast] == [s.coeffs for s in slow]


class TestAlgebraProperties:
    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_bilinear_symmetric(self, data):
        rank = data.draw(st.integers(1, 4))
        entries = data.draw(
            st.lists(st.integers(-3, 3), min_size=rank * rank, max_size=rank * rank)
        )
        gram = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            for j in range(i, rank):
                gram[i][j] = gram[j][i] = entries[i * rank + j]
        lat = IntLattice.make(gram, [f"x{i}" for i in range(rank)])
        vec = st.lists(st.integers(-4, 4), min_size=rank, max_size=rank)
        a = lat.from_coeffs(data.draw(vec))
        b = lat.from_coeffs(data.draw(vec))
        assert pair(a, b) == pair(b, a)
        assert square(a + b) == square(a) + 2 * pair(a, b) + square(b)

    def test_rational_class_arithmetic(self):
        lat = IntLattice.make([[3, 1], [1, -1]], ["g1", "g2"])
        h = RationalClass(lat, (Fraction(1, 2), Fraction(1, 2)))
        assert square(h) == 1
        e = RationalClass(lat, (Fraction(0), Fraction(1)))
        combo = 4 * h - 3 * e
        assert combo.coeffs == (Fraction(2), Fraction(-1))
        assert (h + h).to_hom().coeffs == (1, 1)
        with pytest.raises(DomainError, match="integral"):
            h.to_hom()

    def test_span_lattice_gram(self):
        lat = one_point_lattice(5)
        alpha = lat.combo({"H": 1, "E": -1})
        beta = lat.combo({"H": 1, **{f"E{i}": -1 for i in range(1, 5)}})
        span = span_lattice([3 * alpha + beta, alpha - lat.basis_class("E5")], ["g1", "g2"])
        assert span.gram == ((3, 1), (1, -1))
