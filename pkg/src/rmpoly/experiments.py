"""Seeded Monte Carlo experiments over random multiplicative polynomials.

Every trial is a pure function of (master seed, trial index, N, config), so
trials may be scheduled on any number of worker processes in any order;
results are sorted by (k, trial) before aggregation and output.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .arith import MAX_SIEVE_LIMIT, binom_parity, cached_table
from .certify import CertifyConfig, certify, large_factor_bound
from .errors import CertificationUnavailable
from .multfunc import (
    DOMAIN_PRIME_CHOICE,
    SignFunction,
    Provenance,
    character_mult_function,
    primes_upto,
    sample_mult_function,
    stream_words,
)
from .polycore import build_polynomial, dyadic_profile, newton_polygon, shift_mod

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "KSummary",
    "ExperimentSummary",
    "lemma21_indices",
    "wilson_interval",
    "run_trial",
    "run_trials",
    "run_irreducibility_experiment",
    "lemma21_event_frequency",
    "lemma21_rank",
    "polygon_certificate_frequency",
    "prime_walk_concentration",
    "turyn_experiment",
    "write_jsonl",
    "summary_csv",
]

WILSON_Z = 1.959963984540054
EXHAUSTIVE_MAX_PRIMES = 16


def lemma21_indices(A: int) -> list:
    """{2^(A+1) + 2^i + 1 : 1 <= i <= A}."""
    return [(1 << (A + 1)) + (1 << i) + 1 for i in range(1, A + 1)]


def wilson_interval(successes: int, n: int, z: float = WILSON_Z):
    if n == 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


@dataclass(frozen=True)
class ExperimentConfig:
    master: int = 0
    k_range: tuple = (4, 6, 8)
    trials: int = 100
    A: int | None = None
    certify: CertifyConfig = field(default_factory=CertifyConfig)
    workers: int = 1
    exhaustive: bool = False
    walk_constant: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "k_range", tuple(int(k) for k in self.k_range))
        self.validate()

    def validate(self):
        if not self.k_range:
            raise ValueError("k_range must be nonempty")
        for k in self.k_range:
            if k < 1:
                raise ValueError(f"k={k}: N = 2^k must be at least 2")
            if k > 20:
                raise ValueError(f"k={k} beyond the supported N <= 2^20")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.A is not None:
            if self.A < 1:
                raise ValueError("A must be >= 1")
            need = (1 << (self.A + 1)) + (1 << self.A) + 1
            for k in self.k_range:
                if need > (1 << k) - 1:
                    raise ValueError(f"A={self.A} infeasible at k={k}: 2^(A+1)+2^A+1 = {need} > N-1 = {(1 << k) - 1}")
        if self.exhaustive:
            for k in self.k_range:
                if len(primes_upto(1 << k)) > EXHAUSTIVE_MAX_PRIMES:
                    raise ValueError(f"exhaustive mode needs pi(2^k) <= {EXHAUSTIVE_MAX_PRIMES}; k={k} too large")

    def trial_count(self, k: int) -> int:
        if self.exhaustive:
            return 1 << len(primes_upto(1 << k))
        return self.trials

    def to_dict(self, include_workers: bool = False):
        d = {
            "master": self.master,
            "k_range": list(self.k_range),
            "trials": self.trials,
            "A": self.A,
            "certify": self.certify.to_dict(),
            "exhaustive": self.exhaustive,
            "walk_constant": self.walk_constant,
        }
        if include_workers:
            d["workers"] = self.workers
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "certify" in d and isinstance(d["certify"], dict):
            d["certify"] = CertifyConfig.from_dict(d["certify"])
        return cls(**d)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    k: int
    N: int
    verdict: str
    edge: tuple | None
    lemma21: bool | None
    polygon_success: bool
    wall_time: float = 0.0

    def to_dict(self, timing: bool = False):
        d = {
            "trial": self.trial,
            "k": self.k,
            "N": self.N,
            "verdict": self.verdict,
            "edge": list(self.edge) if self.edge else None,
            "lemma21": self.lemma21,
            "polygon_success": self.polygon_success,
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps({"type": "trial", **self.to_dict(timing)}, sort_keys=True, separators=(",", ":"))


def exhaustive_function(N: int, pattern: int) -> SignFunction:
    """Bit i of ``pattern`` set means f(p_i) = -1."""
    primes = primes_upto(N)
    signs = [-1 if (pattern >> i) & 1 else 1 for i in range(len(primes))]
    return SignFunction.from_prime_signs(N, primes, signs, Provenance("explicit"))


def lemma21_event(P, A: int) -> bool:
    res = shift_mod(P, 2).residues
    return all(int(res[i]) == 0 for i in lemma21_indices(A))


def _polygon_edge(P, m):
    try:
        return large_factor_bound(newton_polygon(dyadic_profile(shift_mod(P, m))))
    except CertificationUnavailable:
        return None


def run_trial(cfg: ExperimentConfig, k: int, trial: int) -> TrialRecord:
    start = time.perf_counter()
    N = 1 << k
    f = exhaustive_function(N, trial) if cfg.exhaustive else sample_mult_function(cfg.master, trial, N)
    P = build_polynomial(f, N)
    cert = certify(P, cfg.certify)
    edge = _polygon_edge(P, cfg.certify.residue_exponent)
    bound = (1 << cfg.A) if cfg.A is not None else cfg.certify.polygon_search_bound
    lemma = lemma21_event(P, cfg.A) if cfg.A is not None else None
    return TrialRecord(
        trial=trial,
        k=k,
        N=N,
        verdict=cert.verdict,
        edge=(edge.j, edge.length) if edge else None,
        lemma21=lemma,
        polygon_success=edge is not None and edge.j <= bound,
        wall_time=time.perf_counter() - start,
    )


def _run_chunk(cfg_dict, k, trials):
    cfg = ExperimentConfig.from_dict(cfg_dict)
    return [run_trial(cfg, k, t) for t in trials]


def _chunks(seq, n):
    size = max(1, math.ceil(len(seq) / n))
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def run_trials(cfg: ExperimentConfig) -> list:
    """All TrialRecords for the config, sorted by (k, trial)."""
    jobs = [(k, list(range(cfg.trial_count(k)))) for k in cfg.k_range]
    records = []
    if cfg.workers == 1:
        for k, trials in jobs:
            records.extend(run_trial(cfg, k, t) for t in trials)
    else:
        cfg_dict = cfg.to_dict()
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = []
            for k, trials in jobs:
                for chunk in _chunks(trials, 4 * cfg.workers):
                    futures.append(pool.submit(_run_chunk, cfg_dict, k, chunk))
            for fut in futures:
                records.extend(fut.result())
    records.sort(key=lambda r: (r.k, r.trial))
    return records


@dataclass(frozen=True)
class KSummary:
    k: int
    N: int
    T: int
    counts: dict
    probabilities: dict
    intervals: dict
    unknown_rate: float
    polygon_success: float | None
    lemma21_frequency: float | None
    lemma21_theoretical: float | None
    exact_irreducible_fraction: str | None

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ExperimentSummary:
    per_k: tuple
    config: dict

    def to_dict(self):
        return {"config": self.config, "per_k": [s.to_dict() for s in self.per_k]}

    def to_json(self) -> str:
        return json.dumps({"type": "summary", **self.to_dict()}, sort_keys=True, separators=(",", ":"))

    def for_k(self, k):
        for s in self.per_k:
            if s.k == k:
                return s
        raise KeyError(k)


def _summarize(cfg, k, recs) -> KSummary:
    T = len(recs)
    counts = {v: sum(r.verdict == v for r in recs) for v in ("Irreducible", "Reducible", "Unknown")}
    probs = {v: (c / T if T else None) for v, c in counts.items()}
    intervals = {v: list(wilson_interval(c, T)) for v, c in counts.items()}
    lemma = None
    if cfg.A is not None and T:
        lemma = sum(bool(r.lemma21) for r in recs) / T
    exact = None
    if cfg.exhaustive and T:
        fr = Fraction(counts["Irreducible"], T)
        exact = f"{fr.numerator}/{fr.denominator}"
    return KSummary(
        k=k,
        N=1 << k,
        T=T,
        counts=counts,
        probabilities=probs,
        intervals=intervals,
        unknown_rate=counts["Unknown"] / T if T else 0.0,
        polygon_success=(sum(r.polygon_success for r in recs) / T) if T else None,
        lemma21_frequency=lemma,
        lemma21_theoretical=(2.0 ** -cfg.A) if cfg.A is not None else None,
        exact_irreducible_fraction=exact,
    )


def summarize(cfg: ExperimentConfig, records) -> ExperimentSummary:
    per_k = tuple(_summarize(cfg, k, [r for r in records if r.k == k]) for k in cfg.k_range)
    return ExperimentSummary(per_k, cfg.to_dict())


def run_irreducibility_experiment(cfg: ExperimentConfig, return_records: bool = False):
    records = run_trials(cfg)
    summary = summarize(cfg, records)
    return (summary, records) if return_records else summary


def lemma21_rank(N: int, A: int) -> int:
    """GF(2) rank of the per-prime parity vectors behind the mod-4 event.

    For a prime q > sqrt(N), every n <= N divisible by q is c*q with c < q,
    so f(cq) = f(c) f(q). With all other prime signs fixed, the bit
    x = (f(q)+1)/2 enters sum_{n>a} (f(n)+1)/2 * C(n-1, a) mod 2, which fixes
    the shifted coefficient a mod 4 when N = 2^k, with coefficient
    sum_{c <= N/q} C(cq - 1, a) mod 2. If these vectors over all such q span
    GF(2)^A, the A residues are independent fair bits and the event has
    probability exactly 2^-A.
    """
    idx = lemma21_indices(A)
    basis = []
    root = math.isqrt(N)
    for q in cached_table(max(N, 1024)).between(root + 1, N):
        row = 0
        for bit, a in enumerate(idx):
            par = 0
            for c in range(1, N // q + 1):
                n = c * q
                if a <= n - 1:
                    par ^= binom_parity(n - 1, a)
            row |= par << bit
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
    return len(basis)


def lemma21_event_frequency(cfg: ExperimentConfig, k: int | None = None) -> dict:
    """Frequency of {P(X+1) coefficient = 0 mod 4 at every index of the set}."""
    if cfg.A is None:
        raise ValueError("lemma21_event_frequency needs A")
    k = cfg.k_range[-1] if k is None else k
    N = 1 << k
    T = cfg.trials
    idx = lemma21_indices(cfg.A)
    theo = 2.0 ** -cfg.A
    report = {"k": k, "N": N, "A": cfg.A, "indices": idx, "T": T, "theoretical": theo, "rank": lemma21_rank(N, cfg.A)}
    if T == 0:
        report.update(hits=0, frequency=None, deviation=None, stderr=None, z=None)
        return report
    hits = 0
    for t in range(T):
        P = build_polynomial(sample_mult_function(cfg.master, t, N), N)
        hits += lemma21_event(P, cfg.A)
    freq = hits / T
    se = math.sqrt(theo * (1 - theo) / T)
    report.update(hits=hits, frequency=freq, deviation=abs(freq - theo), stderr=se, z=(freq - theo) / se)
    return report


def polygon_certificate_frequency(cfg: ExperimentConfig, A_values=None) -> dict:
    """Per k and A: fraction of trials whose terminal height-1 edge starts at j <= 2^A."""
    out = {}
    for k in cfg.k_range:
        N = 1 << k
        T = cfg.trial_count(k)
        js = []
        for t in range(T):
            f = exhaustive_function(N, t) if cfg.exhaustive else sample_mult_function(cfg.master, t, N)
            edge = _polygon_edge(build_polynomial(f, N), cfg.certify.residue_exponent)
            js.append(edge.j if edge else None)
        values = A_values if A_values is not None else ([cfg.A] if cfg.A else list(range(1, max(2, k))))
        out[k] = {
            A: (sum(j is not None and j <= (1 << A) for j in js) / T if T else None) for A in values
        }
    return out


def prime_walk_concentration(cfg: ExperimentConfig, k: int | None = None) -> dict:
    """Max empirical point mass of S = sum_{N/2 < p <= N} f(p) against C * l^(-1/2)."""
    k = cfg.k_range[-1] if k is None else k
    N = 1 << k
    primes = primes_upto(N)
    lo = int(np.searchsorted(primes, N // 2, side="right"))
    ell = len(primes) - lo
    T = cfg.trials
    sums = np.empty(T, dtype=np.int64)
    for t in range(T):
        # same stream positions sample_mult_function uses for these primes
        words = stream_words(cfg.master, t, ell, start=lo)
        sums[t] = int(np.where(words >> np.uint64(63), -1, 1).sum())
    if T:
        values, counts = np.unique(sums, return_counts=True)
        mass = float(counts.max() / T)
        mode = int(values[counts.argmax()])
    else:
        mass, mode = 0.0, None
    bound = cfg.walk_constant / math.sqrt(ell) if ell else float("inf")
    parity_ok = bool(np.all((sums - ell) % 2 == 0))
    return {"k": k, "N": N, "ell": ell, "T": T, "max_point_mass": mass, "mode": mode, "bound": bound, "within_bound": mass <= bound, "parity_ok": parity_ok}


def sample_turyn_prime(primes, master: int, trial: int, d: int) -> int:
    # word index d keeps different d on independent draws; modulo bias <= len/2^64
    w = int(stream_words(master, trial, 1, domain=DOMAIN_PRIME_CHOICE, start=d)[0])
    return primes[w % len(primes)]


def _multiplicative_audit(f: SignFunction) -> bool:
    v = f.values
    N = f.N
    for m in range(2, N + 1):
        for n in range(m, N // m + 1):
            if v[m * n] != v[m] * v[n]:
                return False
    return True


def turyn_experiment(d_list, p_range, trials: int, cfg: CertifyConfig | None = None, master: int = 0) -> dict:
    """Certify cofactors F_{d,p}(z)/z = sum_{a<=d} (a/p) z^(a-1) for random primes p."""
    cfg = cfg or CertifyConfig()
    lo, hi = p_range
    d_list = [int(d) for d in d_list]
    if not d_list or min(d_list) < 1:
        raise ValueError("d values must be >= 1")
    if max(d_list) >= lo:
        raise ValueError(f"every d must be < p_lo={lo} (p must exceed d)")
    if hi > MAX_SIEVE_LIMIT:
        raise ValueError("p range beyond sieve limit")
    primes = [p for p in cached_table(max(hi, 1024)).between(max(lo, 3), hi)]
    if not primes:
        raise ValueError(f"no odd primes in [{lo}, {hi}]")
    per_d = {}
    rows = []
    for d in d_list:
        counts = {"Irreducible": 0, "Reducible": 0, "Unknown": 0}
        all_pm1 = True
        audit_ok = True
        witnesses_ok = True
        for t in range(trials):
            p = sample_turyn_prime(primes, master, t, d)
            f = character_mult_function(p, d)
            P = build_polynomial(f, d)
            pm1 = all(abs(c) == 1 for c in P.coeffs)
            audit = _multiplicative_audit(f)
            cert = certify(P, cfg)
            wit = True
            if cert.verdict == "Reducible":
                wit = cert.witness.divides(P)
            counts[cert.verdict] += 1
            all_pm1 &= pm1
            audit_ok &= audit
            witnesses_ok &= wit
            rows.append({"d": d, "trial": t, "p": p, "verdict": cert.verdict, "coefficients": list(P.coeffs)})
        per_d[d] = {
            "trials": trials,
            "counts": counts,
            "irreducible_fraction": counts["Irreducible"] / trials if trials else None,
            "coefficients_pm1": all_pm1,
            "multiplicative_audit": audit_ok,
            "witnesses_divide": witnesses_ok,
        }
    return {
        "p_range": [lo, hi],
        "num_primes": len(primes),
        "note": "p drawn uniformly from primes in a user-set range, not [d, h(d)]",
        "per_d": per_d,
        "trials": rows,
    }


def write_jsonl(fh, meta: dict, records, summary: ExperimentSummary | None = None, timing: bool = False):
    fh.write(json.dumps({"type": "meta", **meta}, sort_keys=True, separators=(",", ":")) + "\n")
    for r in records:
        fh.write(r.to_json(timing) + "\n")
    if summary is not None:
        fh.write(summary.to_json() + "\n")


def summary_csv(summary: ExperimentSummary) -> list:
    """Rows (with header) of k, N, T, irr_count, red_count, unk_count, irr_lo, irr_hi."""
    rows = [["k", "N", "T", "irr_count", "red_count", "unk_count", "irr_lo", "irr_hi"]]
    for s in summary.per_k:
        lo, hi = s.intervals["Irreducible"]
        rows.append([s.k, s.N, s.T, s.counts["Irreducible"], s.counts["Reducible"], s.counts["Unknown"], f"{lo:.6f}", f"{hi:.6f}"])
    return rows


def metadata(command: str, config: dict, seed) -> dict:
    return {"version": __version__, "command": command, "config": config, "seed": seed}
