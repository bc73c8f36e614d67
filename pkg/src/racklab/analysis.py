"""Numerical and probabilistic verification of the codec's supporting bounds.

Every check returns a JSON-ready dict {check, params, seed, statistic,
bound, pass, ...}.  Randomness comes from numpy's default PCG64 generator
(or the stdlib Mersenne Twister where noted), seeded explicitly; Monte
Carlo trials are drawn in fixed-size chunks with per-chunk derived seeds
(seed, chunk index), so results do not depend on how work is scheduled.
Tail estimates are accepted up to bound + 3 standard errors: the bounds
are one-sided guarantees and sampling noise must not flake the checks.
"""

from __future__ import annotations

import math
import random
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .codec import degree_split
from .core import Rack
from .graph import components, out_degrees, rack_graph
from .perms import compose, conjugate, identity


@dataclass(frozen=True)
class EtaSequence:
    """Non-negative integers eta_1..eta_n with total n (eta[q-1] is eta_q)."""
    n: int
    eta: tuple

    def __post_init__(self):
        if len(self.eta) != self.n:
            raise ValueError(f"expected {self.n} entries, got {len(self.eta)}")
        if any(e < 0 for e in self.eta):
            raise ValueError("entries must be non-negative")
        if sum(self.eta) != self.n:
            raise ValueError(f"entries must sum to {self.n}")


def zeta_of(eta: EtaSequence) -> float:
    """(sum_p eta_p/p) * (sum_q eta_q log2(q)/q)."""
    inv = sum(e / q for q, e in enumerate(eta.eta, start=1))
    logs = sum(e * math.log2(q) / q for q, e in enumerate(eta.eta, start=1))
    return inv * logs


def zeta_of_exact(eta: EtaSequence):
    """Exact rational zeta when every active size is a power of two, else None.

    For other sizes log2(q) is irrational, so zeta can never equal the
    rational boundary n^2/4 and floating point is safe for the comparison.
    """
    inv = Fraction(0)
    logs = Fraction(0)
    for q, e in enumerate(eta.eta, start=1):
        if e == 0:
            continue
        k = q.bit_length() - 1
        if q != 1 << k:
            return None
        inv += Fraction(e, q)
        logs += Fraction(e * k, q)
    return inv * logs


def claim_calc_gap(x: float, y: float) -> float:
    """(x+y)^2/8 - x^2/9 - xy/3; non-negative, equal to (x-3y)^2/72."""
    if x < 0 or y < 0:
        raise ValueError("arguments must be non-negative")
    return (x + y) ** 2 / 8 - x ** 2 / 9 - x * y / 3


def _weak_compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def zeta_bound_sweep(n: int, trials: int = 0, seed: int = 0) -> dict:
    """Max of zeta over compositions of n: exhaustive for n <= 10, else sampled.

    Equality with n^2/4 is decided in exact rational arithmetic; the report
    records every composition attaining it.
    """
    bound = Fraction(n * n, 4)
    if n <= 10:
        source = _weak_compositions(n, n)
        mode = "exhaustive"
        count = 0
    else:
        rng = np.random.default_rng(seed)
        source = (tuple(np.bincount(rng.integers(0, n, size=n), minlength=n).tolist())
                  for _ in range(trials))
        mode = "sampled"
        count = 0
    max_zeta = -1.0
    argmax = None
    equality = []
    violations = 0
    for raw in source:
        count += 1
        eta = EtaSequence(n=n, eta=tuple(raw))
        exact = zeta_of_exact(eta)
        if exact is not None:
            if exact > bound:
                violations += 1
            if exact == bound:
                equality.append(eta.eta)
            z = float(exact)
        else:
            z = zeta_of(eta)
            if z > float(bound) + 1e-9:
                violations += 1
        if z > max_zeta:
            max_zeta = z
            argmax = eta.eta
    two_only = tuple(0 if q != 2 else n for q in range(1, n + 1))
    expected_equality = [two_only] if n >= 2 else []
    ok = violations == 0 and equality == expected_equality
    if n >= 2:
        ok = ok and abs(max_zeta - float(bound)) <= 1e-9
    return {
        "check": "zeta-sweep",
        "params": {"n": n, "mode": mode, "count": count, "trials": trials},
        "seed": seed,
        "statistic": {"max_zeta": max_zeta, "argmax": list(argmax),
                      "equality_cases": [list(e) for e in equality]},
        "bound": float(bound),
        "pass": ok,
    }


def _tail_se(est: float, trials: int) -> float:
    return math.sqrt(max(est * (1 - est), 0.0) / trials)


def _chunk_sizes(trials: int, chunk: int):
    sizes = []
    done = 0
    while done < trials:
        sizes.append(min(chunk, trials - done))
        done += sizes[-1]
    return sizes


def _run_chunks(worker, trials: int, chunk: int, threads: int):
    """Run worker(index, size) over fixed chunks; schedule-independent results.

    The chunk layout and per-chunk seeds depend only on trials and chunk, so
    the aggregate is identical for any thread count.
    """
    sizes = _chunk_sizes(trials, chunk)
    if threads <= 1:
        return [worker(i, b) for i, b in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(len(sizes)), sizes))


def chernoff_check(n: int, p: float, eps: float, trials: int, seed: int = 0,
                   chunk: int = 10_000, threads: int = 1) -> dict:
    """Binomial tail estimates against exp(-eps^2 np/3) and exp(-eps^2 np/2)."""
    if not (0 < p < 1 and 0 < eps <= 1):
        raise ValueError("p in (0,1) and eps in (0,1] required")
    mean = n * p

    def worker(idx, b):
        rng = np.random.default_rng((seed, idx))
        x = rng.binomial(n, p, size=b)
        return int((x >= (1 + eps) * mean).sum()), int((x <= (1 - eps) * mean).sum())

    counts = _run_chunks(worker, trials, chunk, threads)
    hi = sum(c[0] for c in counts)
    lo = sum(c[1] for c in counts)
    est_hi, est_lo = hi / trials, lo / trials
    bound_hi = math.exp(-eps * eps * mean / 3)
    bound_lo = math.exp(-eps * eps * mean / 2)
    ok_hi = est_hi <= bound_hi + 3 * _tail_se(est_hi, trials)
    ok_lo = est_lo <= bound_lo + 3 * _tail_se(est_lo, trials)
    return {
        "check": "chernoff",
        "params": {"n": n, "p": p, "eps": eps, "trials": trials},
        "seed": seed,
        "statistic": {"upper_tail": est_hi, "lower_tail": est_lo},
        "bound": {"upper": bound_hi, "lower": bound_lo},
        "pass": bool(ok_hi and ok_lo),
    }


def _witness_colours(rack: Rack):
    """For each v, one colour per distinct out-neighbour (smallest wins)."""
    n = rack.n
    out = []
    for v in range(n):
        seen = set()
        chosen = []
        for j in range(n):
            w = rack.maps[j][v]
            if w != v and w not in seen:
                seen.add(w)
                chosen.append(j)
        out.append(chosen)
    return out


def _popcount_rows(masks: np.ndarray) -> np.ndarray:
    b, n = masks.shape
    bits = np.unpackbits(masks.view(np.uint8), axis=1)
    return bits.reshape(b, n, 64).sum(axis=2)


def random_subset_check(rack: Rack, p: float, eps: float, trials: int, seed: int = 0,
                        chunk: int = 2_000, threads: int = 1) -> dict:
    """Keep each element with probability p and check two tails per trial:

    the subset-size upper tail against exp(-eps^2 np/3), and for every vertex
    v with positive out-degree the lower tail of |J_v & X| (one witness colour
    per out-neighbour, a Binomial(d_v, p) count that never exceeds the
    out-degree of v towards X) against exp(-eps^2 d_v p/2).  For n <= 63 the
    out-degree towards X is also tallied directly.
    """
    if not (0 < p <= 1 and 0 < eps <= 1):
        raise ValueError("p in (0,1] and eps in (0,1] required")
    n = rack.n
    witness = _witness_colours(rack)
    d = np.array([len(w) for w in witness], dtype=np.float64)
    active = d > 0
    jm = np.zeros((n, n), dtype=np.float32)
    for v, cols in enumerate(witness):
        jm[v, cols] = 1.0
    delta = d * p
    thresh = (1 - eps) * delta
    direct = n <= 63
    if direct:
        images = np.array(rack.maps, dtype=np.int64)  # images[j][v] = (v)f_j
        self_bits = np.int64(1) << np.arange(n, dtype=np.int64)

    def worker(idx, b):
        rng = np.random.default_rng((seed, idx))
        keep = rng.random((n, b)) < p
        size = int((keep.sum(axis=0) >= (1 + eps) * n * p).sum())
        counts = jm @ keep.astype(np.float32)
        j_part = (counts <= thresh[:, None] + 1e-12).sum(axis=1).astype(np.int64)
        d_part = np.zeros(n, dtype=np.int64)
        if direct:
            masks = np.zeros((b, n), dtype=np.int64)
            for j in range(n):
                rows = keep[j]
                if rows.any():
                    masks[rows] |= np.int64(1) << images[j]
            masks &= ~self_bits
            dcounts = _popcount_rows(masks)
            d_part = (dcounts <= thresh[None, :] + 1e-12).sum(axis=0).astype(np.int64)
        return size, j_part, d_part

    parts = _run_chunks(worker, trials, chunk, threads)
    size_hits = sum(part[0] for part in parts)
    j_hits = sum(part[1] for part in parts)
    d_hits = sum(part[2] for part in parts)

    size_est = size_hits / trials
    size_bound = math.exp(-eps * eps * n * p / 3)
    ok = size_est <= size_bound + 3 * _tail_se(size_est, trials)
    worst = {"vertex": None, "estimate": 0.0, "bound": 1.0, "margin": -1.0}
    for v in range(n):
        if not active[v]:
            continue
        bound_v = math.exp(-eps * eps * delta[v] / 2)
        for hits in (j_hits, d_hits) if direct else (j_hits,):
            est = hits[v] / trials
            margin = est - (bound_v + 3 * _tail_se(est, trials))
            if margin > worst["margin"]:
                worst = {"vertex": v, "estimate": est, "bound": bound_v, "margin": margin}
            if margin > 0:
                ok = False
    return {
        "check": "random-subset",
        "params": {"n": n, "p": p, "eps": eps, "trials": trials, "direct": direct},
        "seed": seed,
        "statistic": {"size_tail": size_est, "worst_vertex": worst},
        "bound": {"size": size_bound},
        "pass": bool(ok),
    }


@dataclass(frozen=True)
class WSearchResult:
    w: tuple
    p: float
    attempts: int
    certified: bool
    n: int
    delta: int
    bad_threshold: float
    size_cap: float
    component_count: int
    maps_match: bool

    def to_report(self) -> dict:
        return {
            "check": "find-w",
            "params": {"n": self.n, "delta": self.delta, "p": self.p,
                       "bad_threshold": self.bad_threshold},
            "statistic": {"w_size": len(self.w), "attempts": self.attempts,
                          "components": self.component_count,
                          "maps_match": self.maps_match},
            "bound": self.size_cap,
            "pass": self.certified,
        }


def find_W(rack: Rack, delta: int, p: float, bad_threshold: float | None = None,
           max_attempts: int = 100, seed: int = 0) -> WSearchResult:
    """Sample subsets until one certifies the high-degree maps.

    A sample X is accepted when |X| <= 3np/2 and every high-degree vertex
    keeps out-degree above bad_threshold in the X-coloured graph.  X is then
    augmented with one representative per component inside the high set, and
    the maps of all high vertices are rebuilt by conjugation along directed
    X-paths and compared with the rack.  Exhausting the attempts is reported,
    not fatal: at small orders the sampling regime may simply not certify.
    """
    n = rack.n
    if bad_threshold is None:
        bad_threshold = (math.log2(n) ** 1.5) / 2 if n >= 2 else 0.0
    size_cap = 1.5 * n * p
    _, s_high = degree_split(rack, delta)
    high = set(s_high)
    if not high:
        return WSearchResult(w=(), p=p, attempts=0, certified=True, n=n, delta=delta,
                             bad_threshold=bad_threshold, size_cap=size_cap,
                             component_count=0, maps_match=True)
    rng = random.Random(seed)
    for attempt in range(1, max_attempts + 1):
        x = tuple(v for v in range(n) if rng.random() < p)
        if len(x) > size_cap or not x:
            continue
        g_x = rack_graph(rack, x)
        degs = out_degrees(g_x)
        if any(degs[v] <= bad_threshold for v in s_high):
            continue
        struct = components(g_x)
        inside = [part for part in struct.parts if part[0] in high]
        for part in inside:
            if not all(u in high for u in part):
                raise RuntimeError("degree split is not separated in the sampled graph")
        reps = tuple(part[0] for part in inside)
        w = tuple(sorted(set(x) | set(reps)))

        succ = [[] for _ in range(n)]
        for c in x:
            perm = rack.maps[c]
            for u in range(n):
                if perm[u] != u:
                    succ[u].append((perm[u], c))
        match = True
        for part in inside:
            v = part[0]
            word = {v: identity(n)}
            seen = {v}
            queue = deque([v])
            while queue:
                a = queue.popleft()
                for u, colour in succ[a]:
                    if u in seen:
                        continue
                    word[u] = compose(word[a], rack.maps[colour])
                    seen.add(u)
                    queue.append(u)
            if len(seen) != len(part):
                match = False
                break
            fv = rack.maps[v]
            for u in part:
                if conjugate(fv, word[u]) != rack.maps[u]:
                    match = False
                    break
            if not match:
                break
        return WSearchResult(w=w, p=p, attempts=attempt, certified=match, n=n,
                             delta=delta, bad_threshold=bad_threshold,
                             size_cap=size_cap, component_count=len(inside),
                             maps_match=match)
    return WSearchResult(w=(), p=p, attempts=max_attempts, certified=False, n=n,
                         delta=delta, bad_threshold=bad_threshold, size_cap=size_cap,
                         component_count=0, maps_match=False)
