import pytest

from motionfactor.dualquat import (
    DQ_ONE,
    DualQuaternion,
    Q_ONE,
    QI,
    QJ,
    QK,
    Quaternion,
    Rotation,
    classify_generator,
)
from motionfactor.errors import ConstantRemainder, NonInvertibleLeading, Unbounded
from motionfactor.factorization import (
    SUCCESS,
    Factorization,
    SearchSettings,
    all_factorizations,
    factor_bounded_with_multiplier,
    factor_generic,
    factor_quaternion,
    factor_with_backtracking,
    is_bounded,
    linear_zero,
    right_multiply_and_factor,
)
from motionfactor.polyring import DQPoly, RealPoly, quadratic_factors, validate_motion

from conftest import dq, norm_quadratic, product_of, random_generic_motion


class TestLinearZero:
    def test_simple(self):
        r = DQPoly.of([DualQuaternion(QI * -2.0), DualQuaternion(Quaternion(2.0))])
        assert (linear_zero(r) - DualQuaternion(QI)).is_zero(1e-12)

    def test_constant_remainder(self):
        with pytest.raises(ConstantRemainder):
            linear_zero(DQPoly.of([DualQuaternion(Quaternion(), QI)]))

    def test_non_invertible_leading(self):
        r = DQPoly.of([DualQuaternion(Quaternion(), QI), DualQuaternion(Quaternion(), QJ)])
        with pytest.raises(NonInvertibleLeading):
            linear_zero(r)


class TestFactorGeneric:
    def test_ij_product(self):
        c = validate_motion(product_of([DualQuaternion(QI), DualQuaternion(QJ)]))
        f = factor_generic(c)
        assert (f.factors[0] - DualQuaternion(QI)).max_abs() < 1e-6
        assert (f.factors[1] - DualQuaternion(QJ)).max_abs() < 1e-6
        assert f.residual_against(c.poly) < 1e-8

    def test_repeated_rotation(self):
        c = validate_motion(product_of([DualQuaternion(QI), DualQuaternion(QI)]))
        f = factor_generic(c)
        for h in f.factors:
            assert (h - DualQuaternion(QI)).max_abs() < 1e-6

    def test_random_roundtrip(self, rng):
        for _ in range(10):
            c, _ = random_generic_motion(rng, 2)
            f = factor_generic(c)
            assert f.residual_against(c.poly) < 1e-8

    def test_requires_monic(self):
        c = validate_motion(DQPoly.of([DualQuaternion(QI), DualQuaternion(Quaternion(2.0))]))
        with pytest.raises(ValueError):
            factor_generic(c)


class TestAllFactorizations:
    def test_generic_quadratic_has_two(self, rng):
        c, factors = random_generic_motion(rng, 2)
        fs = all_factorizations(c)
        assert len(fs) == 2
        assert any(
            all((a - b).max_abs() < 1e-7 for a, b in zip(f.factors, factors)) for f in fs
        )

    def test_generic_cubic_has_six(self, rng):
        c, _ = random_generic_motion(rng, 3)
        fs = all_factorizations(c)
        assert len(fs) == 6
        for f in fs:
            assert f.residual_against(c.poly) < 1e-8

    def test_repeated_norm_factor_single(self):
        with pytest.warns(Warning):
            c = validate_motion(product_of([DualQuaternion(QI), DualQuaternion(QI)]))
            fs = all_factorizations(c)
        assert len(fs) == 1

    def test_norm_bookkeeping(self, rng):
        c, _ = random_generic_motion(rng, 3)
        fs = all_factorizations(c)
        want = quadratic_factors(c.norm.monic())
        for f in fs:
            got = sorted(
                (norm_quadratic(h) for h in f.factors),
                key=lambda q: (round(q.coeff(1), 9), round(q.coeff(0), 9)),
            )
            for a, b in zip(got, want):
                assert (a - b).max_abs() < 1e-7


class TestBoundedness:
    def test_rotation_bounded(self):
        assert is_bounded(validate_motion(DQPoly.t_minus(DualQuaternion(QI))))

    def test_translation_unbounded(self):
        assert not is_bounded(validate_motion(DQPoly.t_minus(DualQuaternion(Quaternion(), QI))))

    def test_curvilinear_translation_bounded(self):
        c = DQPoly.of([
            DualQuaternion(Q_ONE, Quaternion(0, 1.5, 0, 0)),
            DualQuaternion(Quaternion(), Quaternion(0, 0, 0.5, 0)),
            DQ_ONE,
        ])
        assert is_bounded(validate_motion(c))


class TestFactorQuaternion:
    def test_ij(self):
        p = product_of([DualQuaternion(QI), DualQuaternion(QJ)])
        f = factor_quaternion(p)
        assert (f.factors[0] - DualQuaternion(QI)).max_abs() < 1e-8
        assert (f.factors[1] - DualQuaternion(QJ)).max_abs() < 1e-8

    def test_canonical_split_of_real_quadratic(self):
        with pytest.warns(Warning):
            f = factor_quaternion(DQPoly.of([1.0, 0.0, 1.0]))
        assert (f.factors[0] - DualQuaternion(QK)).max_abs() < 1e-8
        assert (f.factors[1] - DualQuaternion(-QK)).max_abs() < 1e-8

    def test_random_roundtrip(self, rng):
        for _ in range(10):
            qs = [DualQuaternion(Quaternion(*rng.normal(size=4))) for _ in range(4)]
            p = product_of(qs)
            f = factor_quaternion(p)
            assert len(f.factors) == 4
            assert f.residual_against(p) < 1e-8

    def test_rejects_dual_parts(self):
        with pytest.raises(ValueError):
            factor_quaternion(DQPoly.t_minus(dq(0, 1, 0, 0, 0, 0, 1, 0)))


class TestBacktrackingGeneric:
    def test_matches_all_factorizations(self, rng):
        c, _ = random_generic_motion(rng, 2)
        rep = factor_with_backtracking(c)
        assert rep.status == SUCCESS
        fs = all_factorizations(c)
        assert len(rep.factorizations) == len(fs)
        for f in rep.factorizations:
            assert f.residual_against(c.poly) < 1e-9

    def test_budget_exhaustion_reports(self, rng):
        c, _ = random_generic_motion(rng, 3)
        rep = factor_with_backtracking(c, SearchSettings(budget=2))
        assert rep.status in (SUCCESS, "needs_multiplier")
        assert any("budget" in d for d in rep.diagnostics)


class TestFactorBounded:
    def test_generic_reduces_to_trivial_multiplier(self, rng):
        c, _ = random_generic_motion(rng, 2)
        rep = factor_bounded_with_multiplier(c)
        assert rep.status == SUCCESS
        assert rep.multiplier.degree == 0
        assert len(rep.factorizations) == len(all_factorizations(c))

    def test_unbounded_raises(self):
        c = validate_motion(DQPoly.t_minus(DualQuaternion(Quaternion(), QI)))
        with pytest.raises(Unbounded):
            factor_bounded_with_multiplier(c)

    def test_all_factors_rotations(self, rng):
        c, _ = random_generic_motion(rng, 2)
        rep = factor_bounded_with_multiplier(c)
        for f in rep.factorizations:
            for h in f.factors:
                assert isinstance(classify_generator(h), Rotation)


class TestRightMultiply:
    def test_trivial_multiplier_equals_backtracking(self, rng):
        c, _ = random_generic_motion(rng, 2)
        rep1 = right_multiply_and_factor(c, DQPoly.of([1.0]))
        rep2 = factor_with_backtracking(c)
        assert rep1.status == rep2.status == SUCCESS
        assert len(rep1.factorizations) == len(rep2.factorizations)

    def test_square_of_rotation(self):
        c = validate_motion(DQPoly.t_minus(DualQuaternion(QI)))
        rep = right_multiply_and_factor(c, DQPoly.t_minus(DualQuaternion(QI)))
        assert rep.status == SUCCESS
        f = rep.factorizations[0]
        for h in f.factors:
            assert (h - DualQuaternion(QI)).max_abs() < 1e-7

    def test_rejects_dual_multiplier(self, rng):
        c, _ = random_generic_motion(rng, 2)
        with pytest.raises(ValueError):
            right_multiply_and_factor(c, DQPoly.t_minus(dq(0, 0, 0, 1, 0, 1, 0, 0)))


class TestReportSerialization:
    def test_round_trip_through_json(self, rng):
        c, _ = random_generic_motion(rng, 2)
        rep = factor_with_backtracking(c)
        data = rep.to_json()
        for fd in data["factorizations"]:
            factors = [DualQuaternion.from_array(row) for row in fd["factors"]]
            mult = RealPoly.of(fd["multiplier"])
            f = Factorization(tuple(factors), mult)
            assert f.residual_against(c.poly) < 1e-8
