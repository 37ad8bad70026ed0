"""Partitions, interlacing, skew Schur weights, and small-case enumeration.

Partitions are stored as tuples of positive integers in weakly decreasing
order (trailing zeros stripped; the empty partition is ``()``).

The enumeration here is the brute-force oracle used to validate the
push-block sampler on small grids: it lists every interlacing chain with
parts below a cap together with its exact probability under the measure

    P(lambda^1, ..., lambda^M) = prod_{i,j} (1 - x_i y_j)
        * prod_i s_{lambda^i / lambda^{i-1}}(x_i) * s_{lambda^M}(y_1..y_N),

where the one-variable skew Schur function is x^{|lam|-|mu|} on interlacing
pairs and 0 otherwise.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

Partition = tuple[int, ...]


def canonical(parts) -> Partition:
    """Strip trailing zeros and validate weak decrease."""
    parts = tuple(int(v) for v in parts)
    while parts and parts[-1] == 0:
        parts = parts[:-1]
    for i in range(1, len(parts)):
        if parts[i] > parts[i - 1]:
            raise ValueError(f"not weakly decreasing: {parts}")
    if any(v < 0 for v in parts):
        raise ValueError(f"negative part: {parts}")
    return parts


def weight(lam: Partition) -> int:
    return sum(lam)


def interlaces(lam: Partition, mu: Partition) -> bool:
    """True iff lam >= mu in the interlacing order: lam1 >= mu1 >= lam2 >= mu2 >= ..."""
    lam, mu = canonical(lam), canonical(mu)
    if len(mu) > len(lam):
        return False
    for i in range(len(lam)):
        li = lam[i]
        mi = mu[i] if i < len(mu) else 0
        if mi > li:
            return False
        if i + 1 < len(lam) and lam[i + 1] > mi:
            return False
    return True


def skew_schur_one(lam: Partition, mu: Partition, x: float) -> float:
    """One-variable skew Schur function: x^{|lam|-|mu|} if lam interlaces mu, else 0."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if not interlaces(lam, mu):
        return 0.0
    n = weight(lam) - weight(mu)
    return x**n if n > 0 else (1.0 if n == 0 else 0.0)


def partitions_up_to(cap: int, max_len: int | None = None):
    """All partitions with parts <= cap and at most max_len parts (default cap)."""
    if max_len is None:
        max_len = cap
    out = [()]
    stack = [((), cap)]
    while stack:
        prefix, bound = stack.pop()
        if len(prefix) >= max_len:
            continue
        for v in range(1, bound + 1):
            nxt = prefix + (v,)
            out.append(nxt)
            stack.append((nxt, v))
    return out


def _interlacing_below(lam: Partition, choices) -> list[Partition]:
    return [mu for mu in choices if interlaces(lam, mu)]


def skew_schur_multi(lam: Partition, mu: Partition, xs) -> float:
    """Skew Schur function in several variables via the branching rule.

    s_{lam/mu}(x_1..x_n) = sum over interlacing chains
    mu = nu^0 <= nu^1 <= ... <= nu^n = lam of prod x_i^{|nu^i|-|nu^{i-1}|}.
    """
    lam, mu = canonical(lam), canonical(mu)
    xs = list(xs)
    if any(x < 0 for x in xs):
        raise ValueError("xs must be nonnegative")
    if not xs:
        return 1.0 if lam == mu else 0.0
    # dynamic programming over the last variable
    cap = lam[0] if lam else 0
    choices = [nu for nu in partitions_up_to(cap, len(lam)) if interlaces(lam, nu)]
    total = 0.0
    for nu in choices:
        inner = skew_schur_multi(nu, mu, xs[:-1])
        if inner != 0.0:
            total += inner * skew_schur_one(lam, nu, xs[-1])
    return total


def schur_process_weight(seq, X, Y) -> float:
    """Exact probability of the chain seq = (lambda^1, ..., lambda^M)."""
    X, Y = list(X), list(Y)
    seq = [canonical(s) for s in seq]
    if len(seq) != len(X):
        raise ValueError("sequence length must equal len(X)")
    if any(x < 0 for x in X) or any(y < 0 for y in Y):
        raise ValueError("parameters must be nonnegative")
    if any(x * y >= 1 for x in X for y in Y):
        raise ValueError("need x_i * y_j < 1")
    norm = 1.0
    for x in X:
        for y in Y:
            norm *= 1.0 - x * y
    w = norm
    prev: Partition = ()
    for lam, x in zip(seq, X):
        w *= skew_schur_one(lam, prev, x)
        if w == 0.0:
            return 0.0
        prev = lam
    w *= skew_schur_multi(seq[-1], (), Y)
    return w


def enumerate_support(M: int, X, Y, cap: int):
    """All chains with parts <= cap and their exact probabilities.

    Returns a list of (sequence, probability).  Probabilities use the exact
    normalizer, so they sum to slightly less than 1 when the cap clips the
    support; callers renormalize the tail when comparing with samples.
    """
    X = list(X)
    if len(X) != M:
        raise ValueError("len(X) must equal M")
    results = []
    # chains () <= lambda^1 <= ... <= lambda^M under interlacing; the i-th
    # element has at most i parts, which keeps the search tractable
    pool_by_len = {k: partitions_up_to(cap, min(k, cap)) for k in range(1, M + 1)}

    def extend(chain):
        if len(chain) == M:
            p = schur_process_weight(chain, X, Y)
            if p > 0.0:
                results.append((tuple(chain), p))
            return
        prev = chain[-1] if chain else ()
        for lam in pool_by_len[len(chain) + 1]:
            if interlaces(lam, prev):
                extend(chain + [lam])

    extend([])
    return results
