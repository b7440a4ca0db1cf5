"""Height-ordered sampling, classification and empirical density reports.

Sampling draws each coefficient uniformly from |a_i| < H^i; exhaustive mode
walks the whole box.  Work is split into fixed-size chunks whose RNG streams
are derived from (master seed, chunk index), so reports are bit-identical
for a given (seed, chunk size) no matter how many threads run the chunks.

Classification at p never needs a full factorisation of Delta.  Small
primes come out of a primorial gcd; primes dividing gcd(Delta, c4) (the
only possible additive or non-minimal ones) are factored exactly and handed
to Tate; whatever cofactor remains is multiplicative with n = v(Delta), and
a prime appearing there to multiplicity 1 or 2 has c in {1, 2}, which no
odd p divides.  The one unverified case is a prime q > 10^4 dividing the
cofactor to multiplicity >= 3 without making it a perfect power; that has
probability < 2^-30 per sample and is treated as absent.  Samples that
genuinely need a factorisation that exceeds its budget land in an explicit
"unclassified" bucket; a run is valid while that bucket stays under 0.1%.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gcd, isqrt, sqrt

from .arith import FactorBudgetExceeded, factorize, iroot, is_prime, legendre, primes_up_to
from .curves import WeierstrassModel, compute_invariants, format_rational
from .density import CertifiedValue
from .finitefield import _chi_table
from .localdata import tate

__all__ = [
    "SampleSpec",
    "ClassificationFlags",
    "EmpiricalReport",
    "KodairaFrequencyReport",
    "sample_tuple",
    "classify",
    "estimate",
    "kodaira_frequency",
    "exhaustive_box_size",
]

_SMALL_BOUND = 10_000
_SMALL_CUBE = _SMALL_BOUND**3
_RHO_BUDGET = 1 << 20

_primorial_cache: int | None = None


def _primorial() -> int:
    global _primorial_cache
    if _primorial_cache is None:
        n = 1
        for q in primes_up_to(_SMALL_BOUND):
            n *= q
        _primorial_cache = n
    return _primorial_cache


def _split_mult(c6: int, ell: int) -> bool:
    if ell == 2:
        return (-c6) % 8 == 1
    return legendre(-c6, ell) == 1


@dataclass(frozen=True)
class ClassificationFlags:
    singular: bool
    bad_at_p: bool
    tamagawa_divisible: bool
    anomalous_good: bool
    unclassified: bool = False
    kodaira_at: tuple[tuple[int, str], ...] = ()


def classify(model: WeierstrassModel, p: int, tags: bool = False) -> ClassificationFlags:
    """Membership flags in S_p (some p | c_ell), S_p' (good anomalous) and
    S_p'' (bad reduction at p) for one integral tuple.

    S_p'' is decided on the p-minimal model; S_p' uses the discriminant of
    the given equation, per its literal definition.  With tags=True the
    Kodaira labels of the identified bad primes are attached.
    """
    if p == 2 or not is_prime(p):
        raise ValueError("classification prime must be odd")
    inv = compute_invariants(model)
    delta = inv.delta
    if delta == 0:
        return ClassificationFlags(True, False, False, False)
    c4, c6 = inv.c4, inv.c6
    kod: list[tuple[int, str]] = []

    # S_p'': reduction at p on the minimal model.  v(Delta) < 12 cannot be
    # non-minimal, and v(c4) = 0 forces a (minimal) multiplicative type.
    D = abs(delta)
    vp = 0
    while D % p == 0:
        D //= p
        vp += 1
    if vp == 0:
        bad_at_p = False
    elif c4 % p != 0:
        bad_at_p = True
        if tags:
            kod.append((p, f"In:{vp}"))
    elif vp < 12:
        bad_at_p = True
        if tags:
            kod.append((p, tate(model, p).kodaira.label))
    else:
        local = tate(model, p)
        bad_at_p = not local.kodaira.is_good
        if tags and bad_at_p:
            kod.append((p, local.kodaira.label))

    # S_p': p does not divide the given discriminant and the reduction has
    # a rational p-torsion point, i.e. p | #E(F_p).
    anomalous_good = False
    if vp == 0:
        chi = _chi_table(p)
        b2, b4, b6 = inv.b2 % p, inv.b4 % p, inv.b6 % p
        total = 1
        for x in range(p):
            total += chi[(4 * x**3 + b2 * x * x + 2 * b4 * x + b6) % p]
        anomalous_good = total % p == 0

    # S_p: some ell != p with p | c_ell.
    tam = False
    unclassified = False
    C = D  # p-part already removed
    g = gcd(C, _primorial())
    if g > 1:
        for ell in primes_up_to(_SMALL_BOUND):
            if g == 1:
                break
            if g % ell:
                continue
            g //= ell
            if ell == p:
                continue
            v = 0
            while C % ell == 0:
                C //= ell
                v += 1
            if c4 % ell:
                # multiplicative and automatically minimal: c = v if split
                if v % p == 0 and _split_mult(c6, ell):
                    tam = True
                    if not tags:
                        break
                if tags:
                    kod.append((ell, f"In:{v}"))
            else:
                local = tate(model, ell)
                if local.tamagawa % p == 0:
                    tam = True
                    if not tags:
                        break
                if tags and not local.kodaira.is_good:
                    kod.append((ell, local.kodaira.label))
    if C > 1 and not (tam and not tags):
        try:
            C, tam2, kod2 = _large_cofactor_scan(model, C, c4, c6, p, tags)
            tam = tam or tam2
            kod.extend(kod2)
        except FactorBudgetExceeded:
            unclassified = True
    return ClassificationFlags(
        False, bad_at_p, tam, anomalous_good, unclassified, tuple(sorted(set(kod)))
    )


def _large_cofactor_scan(model, C, c4, c6, p, tags):
    """Handle the cofactor of Delta made of primes above the trial bound."""
    tam = False
    kod: list[tuple[int, str]] = []
    big_additive = gcd(C, abs(c4)) if c4 else C
    if big_additive > 1:
        for q in factorize(big_additive, trial_bound=2, rho_budget=_RHO_BUDGET):
            while C % q == 0:
                C //= q
            local = tate(model, q)
            if local.tamagawa % p == 0:
                tam = True
            if tags and not local.kodaira.is_good:
                kod.append((q, local.kodaira.label))
    if C == 1:
        return C, tam, kod
    if tags:
        # full factorisation wanted for the tag list
        for q, n in factorize(C, trial_bound=2, rho_budget=_RHO_BUDGET).items():
            if n % p == 0 and _split_mult(c6, q):
                tam = True
            kod.append((q, f"In:{n}"))
        return 1, tam, kod
    if C < _SMALL_CUBE:
        # q^3 <= C < bound^3 is impossible, so every multiplicity here is 1
        # or 2 and c lies in {1, 2}: no odd p divides it
        return C, tam, kod
    # the only way left for some multiplicity to reach 3 (short of the
    # assumed-absent q^3 * r event) is C itself being a perfect power
    m = isqrt(C)
    if m * m == C:
        k = 2
    else:
        for k in (3, 5, 7):
            m, exact = iroot(C, k)
            if exact:
                break
        else:
            return C, tam, kod
    if k % p == 0 or m >= _SMALL_CUBE:
        for q, n in factorize(C, trial_bound=2, rho_budget=_RHO_BUDGET).items():
            if n % p == 0 and _split_mult(c6, q):
                tam = True
    return C, tam, kod


# ---------------------------------------------------------------------------
# sampling


def sample_tuple(rng: random.Random, height: int) -> WeierstrassModel:
    """One uniform draw from the height box |a_i| < H^i."""
    if height < 1:
        raise ValueError("height must be >= 1")
    h2 = height * height
    h3 = h2 * height
    h4 = h3 * height
    h6 = h4 * h2
    return WeierstrassModel(
        rng.randrange(1 - height, height),
        rng.randrange(1 - h2, h2),
        rng.randrange(1 - h3, h3),
        rng.randrange(1 - h4, h4),
        rng.randrange(1 - h6, h6),
    )


def exhaustive_box_size(height: int) -> int:
    n = 1
    for i in (1, 2, 3, 4, 6):
        n *= 2 * height**i - 1
    return n


def _chunk_rng(seed: int, chunk_index: int) -> random.Random:
    digest = hashlib.sha256(f"ellstat:{seed}:{chunk_index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


@dataclass(frozen=True)
class SampleSpec:
    height: int
    p: int
    count: int = 0
    exhaustive: bool = False
    seed: int = 0
    chunk_size: int = 65536
    z: float = 4.0
    wilson: bool = False

    def __post_init__(self):
        if not 1 <= self.height <= 10**6:
            raise ValueError("height must lie in [1, 10^6]")
        if self.p == 2 or not is_prime(self.p):
            raise ValueError("p must be an odd prime")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit integer")
        if self.chunk_size < 1:
            raise ValueError("chunk size must be positive")
        if self.exhaustive:
            if exhaustive_box_size(self.height) > 10**7:
                raise ValueError("exhaustive box exceeds 10^7 tuples")
        elif self.count < 1:
            raise ValueError("sample count must be positive")

    @property
    def total(self) -> int:
        return exhaustive_box_size(self.height) if self.exhaustive else self.count


def _iter_chunk(spec: SampleSpec, index: int):
    """The models of one chunk, independent of every other chunk."""
    lo = index * spec.chunk_size
    hi = min(lo + spec.chunk_size, spec.total)
    if spec.exhaustive:
        H = spec.height
        sizes = [2 * H**i - 1 for i in (1, 2, 3, 4, 6)]
        offs = [H**i - 1 for i in (1, 2, 3, 4, 6)]
        for idx in range(lo, hi):
            rem = idx
            a = []
            for size, off in zip(reversed(sizes), reversed(offs)):
                rem, digit = divmod(rem, size)
                a.append(digit - off)
            a.reverse()
            yield WeierstrassModel(*a)
    else:
        rng = _chunk_rng(spec.seed, index)
        for _ in range(hi - lo):
            yield sample_tuple(rng, spec.height)


_FLAG_ORDER = ("singular", "bad_at_p", "tamagawa_divisible", "anomalous_good", "unclassified")


def _count_chunk(spec: SampleSpec, index: int) -> tuple[int, ...]:
    singular = bad = tam = anom = uncl = 0
    p = spec.p
    for model in _iter_chunk(spec, index):
        flags = classify(model, p)
        if flags.singular:
            singular += 1
            continue
        if flags.unclassified:
            uncl += 1
            continue
        bad += flags.bad_at_p
        tam += flags.tamagawa_divisible
        anom += flags.anomalous_good
    return (singular, bad, tam, anom, uncl)


def _normal_ci(count: int, n: int, z: float) -> tuple[float, float]:
    phat = count / n
    half = z * sqrt(phat * (1 - phat) / n)
    return (phat - half, phat + half)


def _wilson_ci(count: int, n: int, z: float) -> tuple[float, float]:
    phat = count / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return (centre - half, centre + half)


@dataclass(frozen=True)
class ReportRow:
    flag: str
    count: int
    n: int
    proportion: float
    ci_lo: float
    ci_hi: float
    theory_lo: float | None = None
    theory_hi: float | None = None
    z: float | None = None


_VERSION = "0.1.0"


@dataclass(frozen=True)
class EmpiricalReport:
    spec: SampleSpec
    counts: dict = field(compare=False)
    rows: tuple[ReportRow, ...] = ()

    def row(self, flag: str) -> ReportRow:
        for r in self.rows:
            if r.flag == flag:
                return r
        raise KeyError(flag)

    @property
    def valid(self) -> bool:
        return self.counts["unclassified"] <= 0.001 * self.spec.total

    def _metadata(self) -> list[tuple[str, str]]:
        s = self.spec
        return [
            ("seed", str(s.seed)),
            ("height", str(s.height)),
            ("n", str(s.total)),
            ("p", str(s.p)),
            ("mode", "exhaustive" if s.exhaustive else "sample"),
            ("chunk_size", str(s.chunk_size)),
            ("version", _VERSION),
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self._metadata():
            buf.write(f"# {k}={v}\r\n")
        w = csv.writer(buf)
        w.writerow(
            ["flag", "count", "N", "proportion", "ci_lo", "ci_hi", "theory_lo", "theory_hi", "z"]
        )
        for r in self.rows:
            w.writerow(
                [
                    r.flag,
                    r.count,
                    r.n,
                    repr(r.proportion),
                    repr(r.ci_lo),
                    repr(r.ci_hi),
                    "" if r.theory_lo is None else repr(r.theory_lo),
                    "" if r.theory_hi is None else repr(r.theory_hi),
                    "" if r.z is None else repr(r.z),
                ]
            )
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "meta": dict(self._metadata()),
            "rows": [
                {
                    "flag": r.flag,
                    "count": r.count,
                    "N": r.n,
                    "proportion": r.proportion,
                    "ci": [r.ci_lo, r.ci_hi],
                    "theory": None
                    if r.theory_lo is None
                    else [r.theory_lo, r.theory_hi],
                    "z": r.z,
                }
                for r in self.rows
            ],
            "valid": self.valid,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def _build_rows(counts, n, z, wilson, theory):
    rows = []
    ci_fn = _wilson_ci if wilson else _normal_ci
    for flag in _FLAG_ORDER:
        cnt = counts[flag]
        phat = cnt / n
        lo, hi = ci_fn(cnt, n, z)
        tlo = thi = zscore = None
        cert = (theory or {}).get(flag)
        if cert is not None:
            tlo, thi = float(cert.lo), float(cert.hi)
            mid = float(cert.midpoint)
            if 0 < mid < 1:
                zscore = (phat - mid) / sqrt(mid * (1 - mid) / n)
        rows.append(ReportRow(flag, cnt, n, phat, lo, hi, tlo, thi, zscore))
    return tuple(rows)


def estimate(
    spec: SampleSpec,
    theory: dict[str, CertifiedValue] | None = None,
    threads: int = 1,
) -> EmpiricalReport:
    """Classify the sample (or the whole box) and report proportions.

    theory maps flag names to certified values; rows carry the enclosure
    and a z-score against its midpoint.  The report depends only on
    (spec, theory), never on the thread count.
    """
    n_chunks = -(-spec.total // spec.chunk_size)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda i: _count_chunk(spec, i), range(n_chunks)))
    else:
        parts = [_count_chunk(spec, i) for i in range(n_chunks)]
    totals = [sum(col) for col in zip(*parts)] if parts else [0] * len(_FLAG_ORDER)
    counts = dict(zip(_FLAG_ORDER, totals))
    rows = _build_rows(counts, spec.total, spec.z, spec.wilson, theory)
    return EmpiricalReport(spec, counts, rows)


# ---------------------------------------------------------------------------
# Kodaira-type frequencies at a fixed prime


def _kodaira_chunk(spec: SampleSpec, ell: int, index: int) -> dict:
    out: dict[str, int] = {}
    for model in _iter_chunk(spec, index):
        if compute_invariants(model).delta == 0:
            key = "singular"
        else:
            key = tate(model, ell).kodaira.label
        out[key] = out.get(key, 0) + 1
    return out


@dataclass(frozen=True)
class KodairaFrequencyReport:
    spec: SampleSpec
    ell: int
    counts: dict = field(compare=False)
    rows: tuple[ReportRow, ...] = ()

    def row(self, label: str) -> ReportRow:
        for r in self.rows:
            if r.flag == label:
                return r
        raise KeyError(label)

    def to_csv(self) -> str:
        buf = io.StringIO()
        meta = [
            ("seed", str(self.spec.seed)),
            ("height", str(self.spec.height)),
            ("n", str(self.spec.total)),
            ("ell", str(self.ell)),
            ("mode", "exhaustive" if self.spec.exhaustive else "sample"),
            ("version", _VERSION),
        ]
        for k, v in meta:
            buf.write(f"# {k}={v}\r\n")
        w = csv.writer(buf)
        w.writerow(
            ["flag", "count", "N", "proportion", "ci_lo", "ci_hi", "theory_lo", "theory_hi", "z"]
        )
        for r in self.rows:
            w.writerow(
                [
                    r.flag,
                    r.count,
                    r.n,
                    repr(r.proportion),
                    repr(r.ci_lo),
                    repr(r.ci_hi),
                    "" if r.theory_lo is None else repr(r.theory_lo),
                    "" if r.theory_hi is None else repr(r.theory_hi),
                    "" if r.z is None else repr(r.z),
                ]
            )
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "meta": {"seed": self.spec.seed, "height": self.spec.height,
                     "n": self.spec.total, "ell": self.ell},
            "rows": [
                {
                    "label": r.flag,
                    "count": r.count,
                    "proportion": r.proportion,
                    "ci": [r.ci_lo, r.ci_hi],
                    "theory": None if r.theory_lo is None else [r.theory_lo, r.theory_hi],
                    "z": r.z,
                }
                for r in self.rows
            ],
        }


def kodaira_frequency(spec: SampleSpec, ell: int, threads: int = 1) -> KodairaFrequencyReport:
    """Empirical Kodaira-type distribution at ell, against the local table.

    Individual I_n types are compared with their exact densities; the I_n*
    family only has an aggregate table value, reported on the "I*n:>=1"
    row.
    """
    from .density import rho, rho_Instar_ge1
    from .kodaira import parse_kodaira

    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    n_chunks = -(-spec.total // spec.chunk_size)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda i: _kodaira_chunk(spec, ell, i), range(n_chunks)))
    else:
        parts = [_kodaira_chunk(spec, ell, i) for i in range(n_chunks)]
    counts: dict[str, int] = {}
    for part in parts:
        for k, v in part.items():
            counts[k] = counts.get(k, 0) + v
    n = spec.total
    ci_fn = _wilson_ci if spec.wilson else _normal_ci
    rows = []
    instar_total = 0
    for label in sorted(counts):
        cnt = counts[label]
        if label.startswith("I*n:"):
            instar_total += cnt
        theory = None
        if label != "singular" and not label.startswith("I*n:"):
            theory = rho(parse_kodaira(label), ell)
        lo, hi = ci_fn(cnt, n, spec.z)
        tlo = thi = zscore = None
        if theory is not None:
            tlo = thi = float(theory)
            mid = float(theory)
            if 0 < mid < 1:
                zscore = (cnt / n - mid) / sqrt(mid * (1 - mid) / n)
        rows.append(ReportRow(label, cnt, n, cnt / n, lo, hi, tlo, thi, zscore))
    if instar_total:
        agg = float(rho_Instar_ge1(ell))
        lo, hi = ci_fn(instar_total, n, spec.z)
        zscore = (instar_total / n - agg) / sqrt(agg * (1 - agg) / n)
        rows.append(
            ReportRow("I*n:>=1", instar_total, n, instar_total / n, lo, hi, agg, agg, zscore)
        )
    return KodairaFrequencyReport(spec, ell, counts, tuple(rows))
