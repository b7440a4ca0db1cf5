import random
from fractions import Fraction

import pytest

from ellstat.curves import (
    NonIntegralTransformError,
    SingularCurveError,
    WeierstrassModel,
    compute_invariants,
    curve_from_j,
    format_rational,
    height_compare,
    height_key,
    height_lt,
    j_invariant,
    parse_rational,
    quadratic_twist,
    transform,
    zywina_j2,
)

from oracles import height_less_by_crosspower

E1 = WeierstrassModel(1, 0, 1, -141, 624)
E2 = WeierstrassModel(0, 0, 0, -83667346875, -10711930420406250)
E3 = WeierstrassModel(0, 1, 0, -2, -8)


def random_model(rng, bound=30):
    return WeierstrassModel(*(rng.randrange(-bound, bound + 1) for _ in range(5)))


def test_invariants_worked_examples():
    inv = compute_invariants(E3)
    assert (inv.b2, inv.b4, inv.b6, inv.b8) == (4, -4, -32, -36)
    assert inv.delta == -21952 == -(2**6) * 7**3
    assert compute_invariants(WeierstrassModel(0, 0, 0, 0, 0)).delta == 0
    assert compute_invariants(E1).delta == 2863288 == 2**3 * 71**3


def test_classical_identities_hold_on_random_models():
    rng = random.Random(2024)
    for _ in range(1000):
        inv = compute_invariants(random_model(rng, 10**4))
        assert 4 * inv.b8 == inv.b2 * inv.b6 - inv.b4**2
        assert inv.c4**3 - inv.c6**2 == 1728 * inv.delta


def test_j_invariant_paper_curves():
    assert j_invariant(E1) == Fraction(857375, 8)
    assert j_invariant(E2) == Fraction(-42875, 8)
    assert j_invariant(E3) == -64


def test_j_invariant_singular_error():
    with pytest.raises(SingularCurveError):
        j_invariant(WeierstrassModel(0, 0, 0, 0, 0))


def test_height_lt_box_edges():
    assert height_lt(WeierstrassModel(0, 0, 0, 0, 63), 2)
    assert not height_lt(WeierstrassModel(2, 0, 0, 0, 0), 2)
    assert not height_lt(WeierstrassModel(0, 0, 0, 0, 64), 2)


def test_height_compare_tie():
    assert height_compare(WeierstrassModel(0, 4, 0, 0, 0), WeierstrassModel(2, 0, 0, 0, 0)) == 0


def test_height_key_matches_crosspower_oracle():
    rng = random.Random(5)
    exps = {0: 1, 1: 2, 2: 3, 3: 4, 4: 6}
    for _ in range(500):
        m = random_model(rng, 12)
        key = height_key(m)
        coeffs = m.coefficients()
        # the key maximum must sit at a coefficient that no other one beats
        imax = max(range(5), key=lambda i: key.normalized[i])
        for i in range(5):
            assert not height_less_by_crosspower(
                coeffs[imax], exps[imax], coeffs[i], exps[i]
            ) or key.normalized[i] == key.normalized[imax]
    for _ in range(2000):
        m1, m2 = random_model(rng, 9), random_model(rng, 9)
        cmp_lib = height_compare(m1, m2)
        k1, k2 = height_key(m1).max_value, height_key(m2).max_value
        assert cmp_lib == (k1 > k2) - (k1 < k2)


def test_height_lt_consistent_with_compare():
    rng = random.Random(6)
    for _ in range(500):
        m = random_model(rng, 40)
        x = rng.randrange(1, 8)
        witness = WeierstrassModel(x, 0, 0, 0, 0)  # height exactly x
        assert height_lt(m, x) == (height_compare(m, witness) < 0)


def test_transform_identity_and_scaling():
    assert transform(E3, 1, 0, 0, 0) == E3
    m = WeierstrassModel(0, 0, 0, -16, 0)
    assert transform(m, 2, 0, 0, 0) == WeierstrassModel(0, 0, 0, -1, 0)
    moved = transform(E3, 1, 1, 0, 0)
    assert compute_invariants(moved).delta == compute_invariants(E3).delta


def test_transform_delta_scaling_and_j_preserved():
    rng = random.Random(7)
    for _ in range(300):
        m = random_model(rng, 15)
        r, s, t = (rng.randrange(-5, 6) for _ in range(3))
        moved = transform(m, 1, r, s, t)
        u = rng.choice([1, 2, 3])
        big = WeierstrassModel(
            *(c * u**e for c, e in zip(moved.coefficients(), (1, 2, 3, 4, 6)))
        )
        back = transform(big, u, 0, 0, 0)
        assert back == moved
        d_big = compute_invariants(big).delta
        assert compute_invariants(moved).delta * u**12 == d_big
        assert compute_invariants(moved).delta == compute_invariants(m).delta
        if d_big != 0:
            assert j_invariant(back) == j_invariant(big) == j_invariant(m)


def test_transform_non_integral_rejected():
    with pytest.raises(NonIntegralTransformError):
        transform(WeierstrassModel(0, 0, 0, -1, 0), 2, 0, 0, 0)
    with pytest.raises(ValueError):
        transform(E3, 0, 0, 0, 0)


def test_quadratic_twist_short_form():
    m = WeierstrassModel(0, 0, 0, 3, 5)
    tw = quadratic_twist(m, 7)
    assert tw == WeierstrassModel(0, 0, 0, 3 * 49, 5 * 343)


def test_quadratic_twist_preserves_j():
    assert j_invariant(quadratic_twist(WeierstrassModel(0, 0, 0, -1, 0), 1)) == 1728
    assert j_invariant(quadratic_twist(E1, 7)) == Fraction(857375, 8)
    rng = random.Random(8)
    for _ in range(100):
        m = random_model(rng, 20)
        if compute_invariants(m).delta == 0:
            continue
        d = rng.choice([-1, 2, -2, 3, 5, 6, -7, 10, 11])
        assert j_invariant(quadratic_twist(m, d)) == j_invariant(m)


def test_quadratic_twist_rejects_bad_d():
    with pytest.raises(ValueError):
        quadratic_twist(E1, 0)
    with pytest.raises(ValueError):
        quadratic_twist(E1, 12)


def test_zywina_values():
    assert zywina_j2(Fraction(3)) == 0
    assert zywina_j2(Fraction(-1)) == 0
    assert zywina_j2(Fraction(1)) == -1728
    with pytest.raises(ZeroDivisionError):
        zywina_j2(Fraction(0))


def test_zywina_against_expanded_numerator():
    # independent expansion: 27 ((t+1)(t-3))^3 = 27 (t^2 - 2t - 3)^3
    def poly_cube(coeffs):
        out = [0] * (3 * (len(coeffs) - 1) + 1)
        tmp = [0] * (2 * (len(coeffs) - 1) + 1)
        for i, a in enumerate(coeffs):
            for j, b in enumerate(coeffs):
                tmp[i + j] += a * b
        for i, a in enumerate(tmp):
            for j, b in enumerate(coeffs):
                out[i + j] += a * b
        return out

    cubed = poly_cube([-3, -2, 1])
    rng = random.Random(9)
    for _ in range(200):
        t = Fraction(rng.randrange(-50, 51), rng.randrange(1, 12))
        if t == 0:
            continue
        num = 27 * sum(c * t**k for k, c in enumerate(cubed))
        assert zywina_j2(t) == num / t**3


def test_curve_from_j_special_points():
    assert curve_from_j(Fraction(0)) == WeierstrassModel(0, 0, 0, 0, 1)
    assert curve_from_j(Fraction(1728)) == WeierstrassModel(0, 0, 0, -1, 0)
    rng = random.Random(10)
    for _ in range(60):
        j = Fraction(rng.randrange(-10**6, 10**6), rng.randrange(1, 100))
        assert j_invariant(curve_from_j(j)) == j


def test_curve_from_j_minimal_conductor_search():
    from ellstat.localdata import conductor

    model = curve_from_j(Fraction(-64), minimize_conductor=True, twist_bound=20)
    assert j_invariant(model) == -64
    assert 1568 % conductor(model) == 0


def test_serialization_round_trip():
    assert str(E1) == "1,0,1,-141,624"
    assert WeierstrassModel.from_string("1, 0 ,1,-141,624") == E1
    with pytest.raises(ValueError):
        WeierstrassModel.from_string("1,2,3")
    assert format_rational(Fraction(857375, 8)) == "857375/8"
    assert format_rational(Fraction(-64)) == "-64"
    assert parse_rational("857375/8") == Fraction(857375, 8)
    assert parse_rational("-64") == -64


def test_height_sort_key_orders_by_height_then_lex():
    from ellstat.curves import height_sort_key

    models = [
        WeierstrassModel(2, 0, 0, 0, 0),   # height 2
        WeierstrassModel(0, 4, 0, 0, 0),   # height 2, lex-larger tie
        WeierstrassModel(1, 0, 0, 0, 0),   # height 1
        WeierstrassModel(0, 0, 0, 0, 63),  # height 63^(1/6) < 2
    ]
    ordered = sorted(models, key=height_sort_key)
    assert ordered[0] == WeierstrassModel(1, 0, 0, 0, 0)
    assert ordered[1] == WeierstrassModel(0, 0, 0, 0, 63)
    assert ordered[2:] == [WeierstrassModel(0, 4, 0, 0, 0), WeierstrassModel(2, 0, 0, 0, 0)]
