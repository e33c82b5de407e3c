"""Exhaustive enumeration of deficient perfect numbers.

The structured enumerator walks prime tuples p1 < p2 < ... < pk depth-first
with exact incremental sigma, pruning a branch as soon as the partial
product cannot stay below the bound.  For odd searches the even-exponent
property of odd deficient perfect numbers prunes odd exponents by default
(and can be disabled to test the property itself).  A numpy divisor-sum
sieve provides an independent oracle for small bounds, and jobs can be
split, checkpointed, and resumed for long runs.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from math import isqrt
from typing import Iterator, Optional

import numpy as np

from .arith import primes_below, sigma_prime_power
from .classify import classify

CHECKPOINT_SCHEMA = 1


@dataclass(frozen=True)
class SearchJob:
    """One unit of exhaustive search work.

    first_prime/first_exp restrict the outermost (smallest-prime) factor:
    None means "all admissible values", which is how a full search starts.
    """

    bound: int
    k: int  # exact number of distinct prime factors
    odd_only: bool = True
    even_exponent_filter: bool = True  # sound for odd searches only
    first_prime: Optional[int] = None
    first_exp: Optional[int] = None

    def __post_init__(self):
        if self.bound < 2:
            raise ValueError("bound must be >= 2")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.even_exponent_filter and not self.odd_only:
            raise ValueError("the even-exponent filter is only sound for odd searches")

    def to_obj(self) -> dict:
        return {
            "bound": self.bound, "k": self.k, "odd_only": self.odd_only,
            "even_exponent_filter": self.even_exponent_filter,
            "first_prime": self.first_prime, "first_exp": self.first_exp,
        }

    @staticmethod
    def from_obj(obj: dict) -> "SearchJob":
        return SearchJob(
            bound=obj["bound"], k=obj["k"], odd_only=obj["odd_only"],
            even_exponent_filter=obj["even_exponent_filter"],
            first_prime=obj.get("first_prime"), first_exp=obj.get("first_exp"),
        )

    def digest(self) -> str:
        return hashlib.sha256(
            json.dumps(self.to_obj(), sort_keys=True).encode()
        ).hexdigest()[:16]


@dataclass
class SearchReport:
    job: SearchJob
    hits: list[int] = field(default_factory=list)  # verified DPNs, sorted
    candidates_tested: int = 0
    complete: bool = True

    def to_obj(self) -> dict:
        return {
            "job": self.job.to_obj(), "hits": self.hits,
            "candidates_tested": self.candidates_tested, "complete": self.complete,
        }


def _prime_limit(job: SearchJob) -> int:
    """Largest prime any slot can use."""
    if job.even_exponent_filter:
        return isqrt(job.bound)  # every slot contributes at least p^2
    if job.k == 1:
        return job.bound
    # the last prime (exponent 1 allowed) after k-1 minimal earlier primes
    start = 3 if job.odd_only else 2
    smallest = [p for p in primes_below(100) if p >= start][: job.k - 1]
    floor_product = 1
    for p in smallest:
        floor_product *= p
    return job.bound // floor_product


_FILTER_OFF_CAP = 5 * 10**7


def _prime_pool(job: SearchJob) -> list[int]:
    limit = _prime_limit(job)
    if not job.even_exponent_filter and limit > _FILTER_OFF_CAP:
        raise ValueError(
            "searches without the even-exponent filter are limited to bounds "
            f"where the prime pool stays below {_FILTER_OFF_CAP}"
        )
    start = 3 if job.odd_only else 2
    return [p for p in primes_below(limit + 1) if p >= start]


def _exponents(job: SearchJob, p: int, cap: int) -> Iterator[int]:
    step = 2 if job.even_exponent_filter else 1
    e = step
    pe = p**e
    while pe <= cap:
        yield e
        e += step
        pe *= p**step


def enumerate_structured(job: SearchJob) -> SearchReport:
    """Depth-first enumeration over factorizations with exactly k prime factors."""
    from bisect import bisect_left

    report = SearchReport(job=job)
    hits: list[int] = []
    tested = 0
    bound = job.bound
    pool = _prime_pool(job)
    npool = len(pool)
    unit = 2 if job.even_exponent_filter else 1

    def descend(min_idx: int, n: int, sig: int, slots_left: int):
        # sigma over prime powers incrementally: sigma(p^(e+u)) = p^u*sigma(p^e) + sigma(p^(u-1))
        nonlocal tested
        cap = bound // n
        last = slots_left == 1
        for idx in range(min_idx, npool):
            p = pool[idx]
            pstep = p * p if unit == 2 else p
            pe = pstep
            if pe > cap:
                break
            bump = p + 1 if unit == 2 else 1
            psig = pe + bump
            while pe <= cap:
                if last:
                    tested += 1
                    m = n * pe
                    d = 2 * m - sig * psig
                    if d > 0 and m % d == 0:
                        hits.append(m)
                else:
                    descend(idx + 1, n * pe, sig * psig, slots_left - 1)
                pe *= pstep
                psig = psig * pstep + bump

    def leaf_test(n: int, sig: int):
        nonlocal tested
        tested += 1
        d = 2 * n - sig
        if d > 0 and n % d == 0:
            hits.append(n)

    if job.first_prime is not None:
        idx = bisect_left(pool, job.first_prime)
        if idx < npool and pool[idx] == job.first_prime:
            p = job.first_prime
            exps = [job.first_exp] if job.first_exp is not None else \
                list(_exponents(job, p, bound))
            for e in exps:
                if p**e <= bound:
                    if job.k == 1:
                        leaf_test(p**e, sigma_prime_power(p, e))
                    else:
                        descend(idx + 1, p**e, sigma_prime_power(p, e), job.k - 1)
    else:
        descend(0, 1, 1, job.k)
    report.candidates_tested = tested
    report.hits = sorted(hits)
    return report


def enumerate_dpn(job: SearchJob) -> SearchReport:
    """Public entry: enumerate all DPNs with exactly k distinct prime factors.

    Every hit is re-verified through classify() before being reported.
    """
    report = enumerate_structured(job)
    verified = []
    for n in report.hits:
        c = classify(n)
        if c.deficient_perfect is not None:
            verified.append(n)
    report.hits = verified
    return report


def sieve_dpn(bound: int, k: Optional[int] = None, odd_only: bool = False) -> list[int]:
    """Independent oracle: numpy divisor-sum sieve over all n <= bound.

    Memory is O(bound); intended for bounds up to ~10^7.
    """
    if bound > 5 * 10**7:
        raise ValueError("sieve oracle limited to small bounds")
    sig = np.zeros(bound + 1, dtype=np.int64)
    for d in range(1, bound + 1):
        sig[d::d] += d
    n = np.arange(bound + 1, dtype=np.int64)
    delta = 2 * n - sig
    ok = (delta > 0) & (n >= 1)
    idx = np.nonzero(ok)[0]
    idx = idx[idx > 0]
    idx = idx[idx % delta[idx] == 0]
    out = []
    for m in idx.tolist():
        if odd_only and m % 2 == 0:
            continue
        if k is not None:
            from .arith import factorize

            if factorize(m).omega != k:
                continue
        out.append(m)
    return out


# --- job splitting and checkpoints ------------------------------------------


def split_job(job: SearchJob) -> list[SearchJob]:
    """Split into independent units by the first prime-power choice."""
    from .arith import _iroot

    if job.first_prime is not None:
        return [job]
    unit = 2 if job.even_exponent_filter else 1
    # the smallest prime of a k-factor candidate satisfies p^(unit*k) <= bound
    first_cap = _iroot(job.bound, unit * job.k) + 1
    start = 3 if job.odd_only else 2
    units = []
    for p in primes_below(first_cap + 1):
        if p < start:
            continue
        for e in _exponents(job, p, job.bound):
            units.append(replace(job, first_prime=p, first_exp=e))
    return units


def checkpoint_path(directory: str, job: SearchJob) -> str:
    return os.path.join(directory, f"dpn-search-{job.digest()}.json")


def checkpoint_save(directory: str, job: SearchJob, done: list[SearchJob],
                    hits: list[int], tested: int) -> str:
    os.makedirs(directory, exist_ok=True)
    path = checkpoint_path(directory, job)
    payload = {
        "schema": CHECKPOINT_SCHEMA,
        "job": job.to_obj(),
        "job_digest": job.digest(),
        "done": [u.to_obj() for u in done],
        "hits": sorted(set(hits)),
        "candidates_tested": tested,
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
    os.replace(tmp, path)
    return path


class CheckpointError(Exception):
    pass


def checkpoint_load(directory: str, job: SearchJob) -> Optional[dict]:
    """Load a checkpoint for this exact job; None if absent.

    Raises CheckpointError on corrupted files or job mismatch.
    """
    path = checkpoint_path(directory, job)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (json.JSONDecodeError, OSError) as e:
        raise CheckpointError(f"unreadable checkpoint {path}: {e}") from e
    if payload.get("schema") != CHECKPOINT_SCHEMA:
        raise CheckpointError(f"unsupported checkpoint schema in {path}")
    if payload.get("job_digest") != job.digest() or payload.get("job") != job.to_obj():
        raise CheckpointError(f"checkpoint {path} belongs to a different job")
    return payload


def run_search(job: SearchJob, checkpoint_dir: Optional[str] = None,
               resume: bool = False,
               checkpoint_every: int = 25) -> SearchReport:
    """Run a (possibly resumed) search unit by unit with checkpointing."""
    units = split_job(job)
    done: list[SearchJob] = []
    hits: list[int] = []
    tested = 0
    if checkpoint_dir and resume:
        payload = checkpoint_load(checkpoint_dir, job)
        if payload is not None:
            done = [SearchJob.from_obj(u) for u in payload["done"]]
            hits = list(payload["hits"])
            tested = payload["candidates_tested"]
    done_keys = {u.digest() for u in done}
    pending = [u for u in units if u.digest() not in done_keys]
    for i, unit in enumerate(pending):
        rep = enumerate_dpn(unit)
        hits.extend(rep.hits)
        tested += rep.candidates_tested
        done.append(unit)
        if checkpoint_dir and ((i + 1) % checkpoint_every == 0 or i + 1 == len(pending)):
            checkpoint_save(checkpoint_dir, job, done, hits, tested)
    return SearchReport(job=job, hits=sorted(set(hits)),
                        candidates_tested=tested, complete=True)
