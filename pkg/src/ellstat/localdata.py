"""Tate's algorithm and the local invariants built on it.

tate() runs the full algorithm at any prime, including the wild cases at
2 and 3, minimising the model on the way (step-11 rescalings).  The
conductor exponent comes out of Ogg's relation f = v(D_min) + 1 - m with m
the component count of the Kodaira type, which is valid at every prime.

Multiplicative reduction is split exactly when -c6 is a square in Q_ell
(Legendre test for odd ell, unit = 1 mod 8 at ell = 2).  Local p-torsion
ranks at multiplicative primes follow the Tate parametrisation: the rank
over Q_ell is [mu_p rational] + [q a p-th power], computed from
v(q) = v(D_min) and the unit part q / ell^v = (D_min / ell^v) * c4^-3
(mod ell); the nonsplit case is the minus part of the same computation
after the unramified quadratic base change.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arith import factorize, is_prime, legendre, valuation
from .curves import (
    SingularCurveError,
    WeierstrassModel,
    compute_invariants,
    transform,
)
from .kodaira import KodairaType

__all__ = [
    "LocalData",
    "LocalTorsionRank",
    "PrimeScanRow",
    "PrimeScanReport",
    "tate",
    "local_minimal_model",
    "conductor",
    "bad_primes",
    "tamagawa_p_divisible",
    "local_torsion_rank_mult",
    "compute_I_p",
    "prime_scan",
]

GOOD = "good"
SPLIT = "split-multiplicative"
NONSPLIT = "nonsplit-multiplicative"
ADDITIVE = "additive"


@dataclass(frozen=True)
class LocalData:
    prime: int
    kodaira: KodairaType
    tamagawa: int
    conductor_exponent: int
    v_min_delta: int
    was_minimal: bool
    reduction: str

    def to_json_dict(self) -> dict:
        return {
            "prime": self.prime,
            "kodaira": self.kodaira.label,
            "tamagawa": self.tamagawa,
            "f": self.conductor_exponent,
            "v_delta": self.v_min_delta,
            "reduction": self.reduction,
        }


def _split_multiplicative(c6: int, ell: int) -> bool:
    # split <=> -c6 is a square in Q_ell (c6 is a unit at a multiplicative prime)
    if ell == 2:
        return (-c6) % 8 == 1
    return legendre(-c6, ell) == 1


def _quad_has_roots(A: int, B: int, C: int, p: int) -> bool:
    """Does A x^2 + B x + C have a root in F_p?"""
    A, B, C = A % p, B % p, C % p
    if p == 2:
        return C == 0 or (A + B + C) % 2 == 0
    if A == 0:
        return B != 0 or C == 0
    return legendre(B * B - 4 * A * C, p) >= 0


def _nroots_cubic(b: int, c: int, d: int, p: int) -> int:
    """Roots in F_p of the separable cubic T^3 + b T^2 + c T + d."""
    if p < 1000:
        return sum(
            1 for t in range(p) if (t**3 + b * t * t + c * t + d) % p == 0
        )
    # deg gcd(T^p - T, P) via Frobenius power, for large p
    m = (d % p, c % p, b % p, 1)

    def mulmod(f, g):
        prod = [0] * (len(f) + len(g) - 1)
        for i, fi in enumerate(f):
            if fi:
                for j, gj in enumerate(g):
                    prod[i + j] = (prod[i + j] + fi * gj) % p
        # reduce by monic cubic m
        for i in range(len(prod) - 1, 2, -1):
            coef = prod[i]
            if coef:
                prod[i] = 0
                prod[i - 1] = (prod[i - 1] - coef * m[2]) % p
                prod[i - 2] = (prod[i - 2] - coef * m[1]) % p
                prod[i - 3] = (prod[i - 3] - coef * m[0]) % p
        return prod[:3] + [0] * (3 - len(prod[:3]))

    result = [1, 0, 0]
    base = [0, 1, 0]
    e = p
    while e:
        if e & 1:
            result = mulmod(result, base)
        base = mulmod(base, base)
        e >>= 1
    # gcd(T^p - T, m)
    f = [m[0], m[1], m[2], 1]
    g = [result[0], (result[1] - 1) % p, result[2]]
    while any(g):
        while g and g[-1] == 0:
            g.pop()
        if not g:
            break
        inv = pow(g[-1], -1, p)
        gm = [x * inv % p for x in g]
        r = list(f)
        while len(r) >= len(gm) and any(r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) < len(gm):
                break
            coef = r[-1]
            shift = len(r) - len(gm)
            for i, x in enumerate(gm):
                r[shift + i] = (r[shift + i] - coef * x) % p
        f, g = gm + [0], r
    while f and f[-1] == 0:
        f.pop()
    return len(f) - 1


def _cubic_multiple_root(b: int, c: int, d: int, p: int) -> tuple[int, bool]:
    """(root, is_triple) for a cubic T^3+bT^2+cT+d with vanishing mod-p disc."""
    b, c, d = b % p, c % p, d % p
    if p == 2:
        return c, (b - c) % 2 == 0
    if p == 3:
        if b % 3 != 0:
            return (-c * pow(2 * b, -1, 3)) % 3, False
        return (-d) % 3, True
    if (b * b - 3 * c) % p == 0:
        return (-b * pow(3, -1, p)) % p, True
    return (b * c - 9 * d) * pow(6 * c - 2 * b * b, -1, p) % p, False


def _tate_run(model: WeierstrassModel, ell: int):
    """Full Tate loop; returns (LocalData, ell-minimal model)."""
    a1, a2, a3, a4, a6 = model.coefficients()
    p = ell
    scalings = 0
    while True:
        cur = WeierstrassModel(a1, a2, a3, a4, a6)
        inv = compute_invariants(cur)
        if inv.delta == 0:
            raise SingularCurveError("Tate's algorithm needs a nonsingular curve")
        n = valuation(inv.delta, p)
        if n == 0:
            ktype, c = KodairaType("I0"), 1
            break
        if inv.c4 % p != 0:
            # node: type I_n on an automatically minimal model
            ktype = KodairaType("In", n)
            if _split_multiplicative(inv.c6, p):
                c = n
            else:
                c = 2 if n % 2 == 0 else 1
            break
        # cusp: move the singular point to (0, 0)
        if p == 2:
            if inv.b2 % 2:
                r = a3 % 2
                t = (r + a4) % 2
            else:
                r = a4 % 2
                t = (r * (1 + a2 + a4) + a6) % 2
        elif p == 3:
            # 3 | b2 here (c4 = b2^2 mod 3), so the cusp is the cube root of -b6
            r = (-inv.b6) % 3
            t = (a1 * r + a3) % 3
        else:
            r = (-inv.b2 * pow(12, -1, p)) % p
            t = (-(a1 * r + a3) * pow(2, -1, p)) % p
        cur = transform(cur, 1, r, 0, t)
        a1, a2, a3, a4, a6 = cur.coefficients()
        inv = compute_invariants(cur)

        if a6 % (p * p) != 0:
            ktype, c = KodairaType("II"), 1
            break
        if inv.b8 % p**3 != 0:
            ktype, c = KodairaType("III"), 2
            break
        if inv.b6 % p**3 != 0:
            ktype = KodairaType("IV")
            c = 3 if _quad_has_roots(1, a3 // p, -(a6 // (p * p)), p) else 1
            break

        # normalise to p|a1,a2, p^2|a3,a4, p^3|a6
        if p == 2:
            s = a2 % 2
            cur = transform(cur, 1, 0, s, 0)
            a1, a2, a3, a4, a6 = cur.coefficients()
            t = 2 if a6 % 8 == 4 else 0
        else:
            s = (-a1 * pow(2, -1, p)) % p
            cur = transform(cur, 1, 0, s, 0)
            a1, a2, a3, a4, a6 = cur.coefficients()
            t = (-a3 * pow(2, -1, p * p)) % (p * p)
        cur = transform(cur, 1, 0, 0, t)
        a1, a2, a3, a4, a6 = cur.coefficients()

        b = (a2 // p) % p
        cc = (a4 // (p * p)) % p
        dd = (a6 // p**3) % p
        disc = (
            18 * b * cc * dd - 4 * b**3 * dd + b * b * cc * cc - 4 * cc**3 - 27 * dd * dd
        ) % p
        if disc != 0:
            ktype = KodairaType("I0*")
            c = 1 + _nroots_cubic(b, cc, dd, p)
            break

        tau, triple = _cubic_multiple_root(b, cc, dd, p)
        if tau:
            cur = transform(cur, 1, p * tau, 0, 0)
            a1, a2, a3, a4, a6 = cur.coefficients()

        if not triple:
            # I_nu* chain: alternate Y- and X-side quadratics
            nu = 1
            while True:
                e3 = (nu + 3) // 2
                A3 = (a3 // p**e3) % p
                A6 = (a6 // p ** (nu + 3)) % p
                if (A3 * A3 + 4 * A6) % p != 0:
                    ktype = KodairaType("In*", nu)
                    c = 4 if _quad_has_roots(1, A3, -A6, p) else 2
                    break
                eta = A6 % 2 if p == 2 else (-A3 * pow(2, -1, p)) % p
                if eta:
                    cur = transform(cur, 1, 0, 0, p**e3 * eta)
                    a1, a2, a3, a4, a6 = cur.coefficients()
                nu += 1
                e4 = (nu + 4) // 2
                B2 = (a2 // p) % p
                B4 = (a4 // p**e4) % p
                B6 = (a6 // p ** (nu + 3)) % p
                if (B4 * B4 - 4 * B2 * B6) % p != 0:
                    ktype = KodairaType("In*", nu)
                    c = 4 if _quad_has_roots(B2, B4, B6, p) else 2
                    break
                xi = B6 % 2 if p == 2 else (-B4 * pow(2 * B2, -1, p)) % p
                if xi:
                    cur = transform(cur, 1, p ** (e4 - 1) * xi, 0, 0)
                    a1, a2, a3, a4, a6 = cur.coefficients()
                nu += 1
            break

        # triple root: IV*, III*, II* or a non-minimal model
        A3 = (a3 // (p * p)) % p
        A6 = (a6 // p**4) % p
        if (A3 * A3 + 4 * A6) % p != 0:
            ktype = KodairaType("IV*")
            c = 3 if _quad_has_roots(1, A3, -A6, p) else 1
            break
        eta = A6 % 2 if p == 2 else (-A3 * pow(2, -1, p)) % p
        if eta:
            cur = transform(cur, 1, 0, 0, p * p * eta)
            a1, a2, a3, a4, a6 = cur.coefficients()
        if a4 % p**4 != 0:
            ktype, c = KodairaType("III*"), 2
            break
        if a6 % p**6 != 0:
            ktype, c = KodairaType("II*"), 1
            break
        a1 //= p
        a2 //= p * p
        a3 //= p**3
        a4 //= p**4
        a6 //= p**6
        scalings += 1

    minimal = WeierstrassModel(a1, a2, a3, a4, a6)
    inv_min = compute_invariants(minimal)
    v_delta = 0 if inv_min.delta % p != 0 else valuation(inv_min.delta, p)
    if ktype.is_good:
        f = 0
        reduction = GOOD
    elif ktype.is_multiplicative:
        f = 1
        reduction = SPLIT if _split_multiplicative(inv_min.c6, p) else NONSPLIT
    else:
        f = v_delta + 1 - ktype.components
        reduction = ADDITIVE
    data = LocalData(
        prime=p,
        kodaira=ktype,
        tamagawa=c,
        conductor_exponent=f,
        v_min_delta=v_delta,
        was_minimal=(scalings == 0),
        reduction=reduction,
    )
    return data, minimal


def tate(model: WeierstrassModel, ell: int) -> LocalData:
    """Kodaira type, Tamagawa number and conductor exponent of E at ell.

    Works on any integral model; the local minimisation happens inside and
    was_minimal records whether the input was already ell-minimal.
    """
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    return _tate_run(model, ell)[0]


def local_minimal_model(model: WeierstrassModel, ell: int) -> tuple[WeierstrassModel, LocalData]:
    """An ell-minimal model (translated/rescaled) together with its LocalData."""
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    data, minimal = _tate_run(model, ell)
    return minimal, data


def bad_primes(model: WeierstrassModel) -> list[int]:
    """Primes dividing the discriminant of the given model, ascending."""
    delta = compute_invariants(model).delta
    if delta == 0:
        raise SingularCurveError("singular model has no bad-prime set")
    return sorted(factorize(delta))


def conductor(model: WeierstrassModel) -> int:
    """prod ell^f_ell over the primes dividing the discriminant."""
    n = 1
    for ell in bad_primes(model):
        n *= ell ** tate(model, ell).conductor_exponent
    return n


def tamagawa_p_divisible(model: WeierstrassModel, p: int) -> list[int]:
    """Primes ell != p with p | c_ell(E), ascending.

    Nonemptiness of this list is membership in S_p.  Divisibility is tested
    on the Tamagawa numbers themselves; the types that can occur are
    I_{pm} (split) for p >= 5 and additionally IV, IV* for p = 3.
    """
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    out = []
    for ell in bad_primes(model):
        if ell == p:
            continue
        if tate(model, ell).tamagawa % p == 0:
            out.append(ell)
    return out


@dataclass(frozen=True)
class LocalTorsionRank:
    prime: int
    rank: int
    rank_nr: int

    def __post_init__(self):
        if not (0 <= self.rank <= self.rank_nr <= 2):
            raise ValueError("torsion ranks must satisfy 0 <= rank <= rank_nr <= 2")


def local_torsion_rank_mult(model: WeierstrassModel, ell: int, p: int) -> LocalTorsionRank:
    """Ranks of E(Q_ell)[p] and E(Q_ell^nr)[p] at a multiplicative prime ell.

    Split case:  rank = [ell = 1 mod p] + [q in (Q_ell^x)^p], where the Tate
    parameter q has v(q) = v(D_min) and unit part (D_min/ell^v) * c4^-3; the
    p-th power test is p | v(q) plus (only when ell = 1 mod p) the unit part
    being a p-th power mod ell.  Nonsplit case: over Q_ell^nr the twist
    trivialises, so rank_nr = 1 + [p | v(q)]; over Q_ell only the mu_p line
    survives the unramified involution, giving rank = [ell = -1 mod p].
    """
    if p == 2 or not is_prime(p) or ell == p:
        raise ValueError("needs an odd prime p different from ell")
    minimal, data = local_minimal_model(model, ell)
    if not data.kodaira.is_multiplicative:
        raise ValueError(f"reduction at {ell} is {data.reduction}, not multiplicative")
    n = data.v_min_delta
    inv = compute_invariants(minimal)
    rank_nr_split = 1 + (1 if n % p == 0 else 0)
    if data.reduction == SPLIT:
        rank = 1 if ell % p == 1 else 0
        if n % p == 0:
            if ell % p != 1:
                rank += 1
            else:
                unit = inv.delta // ell**n * pow(inv.c4, -3, ell) % ell
                if pow(unit, (ell - 1) // p, ell) == 1:
                    rank += 1
        return LocalTorsionRank(ell, rank, rank_nr_split)
    rank = 1 if (ell + 1) % p == 0 else 0
    return LocalTorsionRank(ell, rank, rank_nr_split)


def compute_I_p(model: WeierstrassModel, p: int) -> set[int]:
    """Multiplicative primes ell != p where the local p-torsion is a line.

    Split reduction requires rank E(Q_ell)[p] = 1; nonsplit requires both
    the Q_ell and Q_ell^nr ranks to equal 1.
    """
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    out = set()
    for ell in bad_primes(model):
        if ell == p:
            continue
        data = tate(model, ell)
        if not data.kodaira.is_multiplicative:
            continue
        ranks = local_torsion_rank_mult(model, ell, p)
        if data.reduction == SPLIT:
            if ranks.rank == 1:
                out.add(ell)
        else:
            if ranks.rank == 1 and ranks.rank_nr == 1:
                out.add(ell)
    return out


@dataclass(frozen=True)
class PrimeScanRow:
    p: int
    good_reduction: bool
    anomalous: bool
    tamagawa_divisible: bool
    bad_local_torsion: bool


@dataclass(frozen=True)
class PrimeScanReport:
    model: WeierstrassModel
    p_max: int
    rows: tuple[PrimeScanRow, ...]
    failure_fractions: dict = field(compare=False)

    def to_json_dict(self) -> dict:
        return {
            "curve": str(self.model),
            "p_max": self.p_max,
            "rows": [
                {
                    "p": r.p,
                    "good": r.good_reduction,
                    "anomalous": r.anomalous,
                    "tamagawa_divisible": r.tamagawa_divisible,
                    "bad_local_torsion": r.bad_local_torsion,
                }
                for r in self.rows
            ],
            "failure_fractions": self.failure_fractions,
        }


def prime_scan(model: WeierstrassModel, p_max: int) -> PrimeScanReport:
    """Check the fixed-curve conditions at every odd prime p <= p_max.

    Per prime: good reduction at p, anomalous at p, p | c_ell for some bad
    ell != p, and nontrivial E(Q_ell)[p] at some bad ell != p (decided by
    the Tate-curve rule at multiplicative ell and by p | c_ell at additive
    ell, where the component group carries all prime-to-ell torsion).
    The failure fractions of the four conditions are reported; all four
    failure sets are expected to thin out for non-CM curves.
    """
    from .arith import primes_up_to
    from .finitefield import is_anomalous

    local = {ell: tate(model, ell) for ell in bad_primes(model)}
    truly_bad = {ell: d for ell, d in local.items() if not d.kodaira.is_good}
    rows = []
    for p in primes_up_to(p_max):
        if p == 2:
            continue
        good = p not in truly_bad
        anomalous = is_anomalous(model, p) if good else False
        tam = any(d.tamagawa % p == 0 for ell, d in truly_bad.items() if ell != p)
        torsion = False
        for ell, d in truly_bad.items():
            if ell == p:
                continue
            if d.kodaira.is_multiplicative:
                if local_torsion_rank_mult(model, ell, p).rank >= 1:
                    torsion = True
                    break
            elif d.tamagawa % p == 0:
                torsion = True
                break
        rows.append(PrimeScanRow(p, good, anomalous, tam, torsion))
    total = len(rows) or 1
    fractions = {
        "bad_reduction": sum(not r.good_reduction for r in rows) / total,
        "anomalous": sum(r.anomalous for r in rows) / total,
        "tamagawa_divisible": sum(r.tamagawa_divisible for r in rows) / total,
        "bad_local_torsion": sum(r.bad_local_torsion for r in rows) / total,
    }
    return PrimeScanReport(model, p_max, tuple(rows), fractions)
