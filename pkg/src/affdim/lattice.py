"""Chain decomposition of {1, ..., n} and the exact chain densities.

The constraint pairs (p*k+a, q*k+b) link positions into maximal chains under
the successor map x -> q*(x-a)/p + b.  This module produces the chains, the
census counting chains by total length and by window length, and the exact
rational limit densities those counts converge to.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import AffineSystem, CaseTag, InvalidSystemError

#: extra successor steps taken past the window before a chain is marked
#: truncated; finite chains in practice end after O(log n) steps.
FULL_LENGTH_CAP = 128


def successor(x: int, sys: AffineSystem) -> int | None:
    """Next position linked to x, or None when x ends its chain.

    x = p*k+a maps to q*k+b provided k is an integer and k >= k_min (both
    endpoints of the pair land at index >= 1).
    """
    if x < 1:
        raise ValueError(f"positions are 1-based, got {x}")
    if (x - sys.a) % sys.p != 0:
        return None
    k = (x - sys.a) // sys.p
    if k < sys.k_min:
        return None
    return sys.q * k + sys.b


def predecessor(x: int, sys: AffineSystem) -> int | None:
    """Position mapping onto x under the successor map, or None."""
    if x < 1:
        raise ValueError(f"positions are 1-based, got {x}")
    if (x - sys.b) % sys.q != 0:
        return None
    k = (x - sys.b) // sys.q
    if k < sys.k_min:
        return None
    return sys.p * k + sys.a


def _check_monotone(sys: AffineSystem) -> None:
    # The smallest constrained pair is (p*k_min+a, q*k_min+b); pairs step
    # upward from there, so the map is strictly increasing iff the first
    # pair is.  Decreasing or self-looping pairs (possible when a > b) break
    # the chain ordering and are not supported by the decomposition.
    k = sys.k_min
    if sys.q * k + sys.b <= sys.p * k + sys.a:
        raise InvalidSystemError(
            f"system {sys.describe()} has a non-increasing constraint pair at "
            f"k={k}; chain decomposition requires strictly increasing links"
        )


@dataclass(frozen=True)
class Chain:
    """One maximal chain: its window members plus total orbit length.

    ``positions`` lists the members <= n in increasing order.  full_length
    counts the whole orbit, continuing past the window; truncated chains hit
    the iteration cap (their orbit is infinite or merely very long).
    """

    positions: tuple[int, ...]
    full_length: int
    truncated: bool = False

    @property
    def start(self) -> int:
        return self.positions[0]

    @property
    def window_count(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class ChainDecomposition:
    n: int
    chains: tuple[Chain, ...]

    def census(self) -> "Census":
        L: dict[tuple[int, int], int] = {}
        D: dict[int, int] = {}
        truncated: dict[int, int] = {}
        for ch in self.chains:
            j = ch.window_count
            D[j] = D.get(j, 0) + 1
            if ch.truncated:
                truncated[j] = truncated.get(j, 0) + 1
            else:
                key = (ch.full_length, j)
                L[key] = L.get(key, 0) + 1
        return Census(n=self.n, L=L, D=D, truncated=truncated)


@dataclass(frozen=True)
class Census:
    """Chain tallies: L[(i, j)] counts chains of full length i with j window
    members; D[j] counts chains with j window members regardless of full
    length; truncated[j] tallies capped (effectively infinite) chains."""

    n: int
    L: dict[tuple[int, int], int]
    D: dict[int, int]
    truncated: dict[int, int]

    def window_total(self) -> int:
        return sum(j * cnt for j, cnt in self.D.items())


def _infinite_orbits(sys: AffineSystem) -> bool:
    # With p1 == 1 every valid successor step stays valid (divisibility is
    # inherited), so any chain that advances once never terminates.  The
    # k >= k_min guard also persists when c >= 0.
    return sys.p1 == 1 and sys.divisible and (sys.c or 0) >= 0


def decompose(n: int, sys: AffineSystem, cap: int = FULL_LENGTH_CAP) -> ChainDecomposition:
    """Partition {1, ..., n} into maximal chains.

    A chain starts at any position with no predecessor inside the window and
    extends by the successor map while the image stays <= n; the orbit is
    then followed past n (up to ``cap`` extra steps) to record full_length.
    """
    if n < 1:
        raise ValueError(f"window size must be >= 1, got {n}")
    _check_monotone(sys)
    infinite = _infinite_orbits(sys)
    chains = []
    for s in range(1, n + 1):
        pre = predecessor(s, sys)
        if pre is not None and pre <= n:
            continue
        positions = [s]
        while True:
            nxt = successor(positions[-1], sys)
            if nxt is None or nxt > n:
                break
            positions.append(nxt)
        full = len(positions)
        truncated = False
        cur = positions[-1]
        nxt = successor(cur, sys)
        if nxt is not None and infinite:
            truncated = True
        else:
            extra = 0
            while nxt is not None:
                extra += 1
                if extra > cap:
                    truncated = True
                    break
                full += 1
                cur = nxt
                nxt = successor(cur, sys)
        chains.append(Chain(tuple(positions), full, truncated))
    return ChainDecomposition(n=n, chains=tuple(chains))


def empirical_census(n: int, sys: AffineSystem, cap: int = FULL_LENGTH_CAP) -> Census:
    """Chain census over {1, ..., n} without materializing the chains.

    Window walks are vectorized over all chain starts; the much shorter
    beyond-window continuation falls back to exact integer arithmetic once
    positions approach the int64 range.
    """
    if n < 1:
        raise ValueError(f"window size must be >= 1, got {n}")
    _check_monotone(sys)
    p, q, a, b, k_min = sys.p, sys.q, sys.a, sys.b, sys.k_min

    pos = np.arange(1, n + 1, dtype=np.int64)
    off = pos - b
    k = off // q
    has_pre = (off % q == 0) & (k >= k_min)
    # predecessor p*k+a of an in-window position is smaller, hence in-window
    starts = pos[~has_pre]
    del pos, off, k, has_pre

    cur = starts
    wlen = np.ones(len(starts), dtype=np.int64)
    done_pos: list[np.ndarray] = []
    done_len: list[np.ndarray] = []
    while len(cur):
        offs = cur - a
        kk = offs // p
        valid = (offs % p == 0) & (kk >= k_min)
        nxt = q * kk + b
        adv = valid & (nxt <= n)
        stop = ~adv
        if stop.any():
            done_pos.append(cur[stop])
            done_len.append(wlen[stop])
        cur = nxt[adv]
        wlen = wlen[adv] + 1
    last = np.concatenate(done_pos) if done_pos else np.empty(0, dtype=np.int64)
    wl = np.concatenate(done_len) if done_len else np.empty(0, dtype=np.int64)

    full, truncated_mask = _extend_full_lengths(last, wl, sys, cap)

    max_w = int(wl.max()) if len(wl) else 0
    stride = max_w + 2
    sentinel = cap + max_w + 1
    full_capped = np.where(truncated_mask, sentinel, full)
    keys = full_capped * stride + wl
    counts = np.bincount(keys)

    L: dict[tuple[int, int], int] = {}
    D: dict[int, int] = {}
    truncated: dict[int, int] = {}
    for key in np.nonzero(counts)[0]:
        i, j = divmod(int(key), stride)
        c = int(counts[key])
        D[j] = D.get(j, 0) + c
        if i == sentinel:
            truncated[j] = truncated.get(j, 0) + c
        else:
            L[(i, j)] = L.get((i, j), 0) + c
    return Census(n=n, L=L, D=D, truncated=truncated)


def _extend_full_lengths(last, wlen, sys: AffineSystem, cap):
    """Continue chains past the window: returns (full_length, truncated)."""
    p, q, a, b, k_min = sys.p, sys.q, sys.a, sys.b, sys.k_min
    full = wlen.copy()
    truncated = np.zeros(len(last), dtype=bool)
    if not len(last):
        return full, truncated

    offs = last - a
    kk = offs // p
    alive = (offs % p == 0) & (kk >= k_min)
    if _infinite_orbits(sys):
        truncated[alive] = True
        return full, truncated

    idx = np.nonzero(alive)[0]
    cur = q * kk[alive] + b
    extra = 1
    overflow_guard = (np.iinfo(np.int64).max - abs(b)) // max(q, 1) // 2
    while len(idx):
        full[idx] += 1
        if extra >= cap:
            truncated[idx] = True
            break
        if cur.max() > overflow_guard:
            # handful of survivors: finish with exact integers
            for pos_i, chain_i in zip(cur.tolist(), idx.tolist()):
                steps = extra
                x = pos_i
                while True:
                    o = x - a
                    kq, rem = divmod(o, p)
                    if rem != 0 or kq < k_min:
                        break
                    steps += 1
                    if steps > cap:
                        truncated[chain_i] = True
                        break
                    full[chain_i] += 1
                    x = q * kq + b
            break
        offs = cur - a
        kk = offs // p
        valid = (offs % p == 0) & (kk >= k_min)
        idx = idx[valid]
        cur = q * kk[valid] + b
        extra += 1
    return full, truncated


# ---------------------------------------------------------------------------
# exact limit densities


def window_length_density(ell: int, sys: AffineSystem) -> Fraction:
    """Limit of D[ell]/n: density of chains with exactly ell window members,
    for ell >= 2.  Defined only in the divisible case."""
    if not sys.divisible:
        raise InvalidSystemError(
            "window-length densities follow the divisible formula; "
            "a non-divisible system has only pairs (density 1/q) and singletons"
        )
    if ell < 2:
        raise ValueError(f"need ell >= 2, got {ell}; use singleton_density for ell=1")
    return Fraction((sys.q1 - 1) ** 2, sys.d * sys.q1 ** (ell + 1))


def singleton_density(sys: AffineSystem) -> Fraction:
    """Limit density of positions forming one-member window chains."""
    if sys.divisible:
        return 1 - Fraction(2 * sys.q1 - 1, sys.d * sys.q1 ** 2)
    return 1 - Fraction(2, sys.q)


def pair_density(sys: AffineSystem) -> Fraction:
    """Non-divisible case: density of complete in-window pairs."""
    if sys.divisible:
        raise InvalidSystemError("pair density applies to the non-divisible case")
    return Fraction(1, sys.q)


def chain_density(i: int, j: int, sys: AffineSystem) -> Fraction:
    """Limit of L[(i, j)]/n: density of chains of full length i with j
    window members.  Requires the divisible-general case (p1 >= 2)."""
    if sys.case_tag is not CaseTag.DIVISIBLE_GENERAL:
        raise InvalidSystemError(
            f"chain densities require the divisible-general case, "
            f"got {sys.case_tag.value} for {sys.describe()}"
        )
    if not 1 <= j <= i:
        raise ValueError(f"need 1 <= j <= i, got i={i}, j={j}")
    p, q, d, p1, q1 = sys.p, sys.q, sys.d, sys.p1, sys.q1
    if i == 1:
        return 1 - Fraction(1, p) - Fraction(1, q) + Fraction(1, d * p1 * q1)
    if j == 1:
        return (
            Fraction(q1 - 1, q1)
            * Fraction(p1 - 1, p1)
            * (Fraction(1, p) - Fraction(1, q))
            * Fraction(1, p1) ** (i - 2)
        )
    return Fraction((q1 - 1) ** 2, d * q1 ** (j + 1)) * Fraction(p1 - 1, p1 ** (i - j + 1))


def chain_density_column_tail(j: int, upto_i: int, sys: AffineSystem) -> Fraction:
    """Exact remainder of sum_{i > upto_i} chain_density(i, j) for j >= 2:
    the full column sums to window_length_density(j)."""
    if j < 2:
        raise ValueError("column identity applies to j >= 2")
    if upto_i < j:
        raise ValueError("truncation must cover at least i = j")
    return window_length_density(j, sys) * Fraction(1, sys.p1 ** (upto_i - j + 1))


def weighted_census_tail(upto_i: int, sys: AffineSystem) -> Fraction:
    """Exact remainder of sum_{i > upto_i} sum_j j * chain_density(i, j).

    The full double sum equals 1 (every position lies in exactly one chain);
    partial sums plus this tail reproduce 1 exactly in rational arithmetic.
    """
    if upto_i < 1:
        raise ValueError("truncation index must be >= 1")
    p, q, d, p1, q1 = sys.p, sys.q, sys.d, sys.p1, sys.q1
    if sys.case_tag is not CaseTag.DIVISIBLE_GENERAL:
        raise InvalidSystemError("weighted census tail requires the divisible-general case")
    J = upto_i
    # chains ending outside the window: single-member column j = 1
    tail = Fraction(q1 - 1, q1) * (Fraction(1, p) - Fraction(1, q)) * Fraction(1, p1 ** (J - 1))
    # columns j >= 2 split at the truncation row
    for j in range(2, J + 1):
        tail += j * window_length_density(j, sys) * Fraction(1, p1 ** (J - j + 1))
    # whole columns beyond the truncation: arithmetic-geometric closed form
    tail += Fraction(1, d * q1**J) * ((J + 1) - Fraction(J, q1))
    return tail


def weighted_extra_census_tail(upto_i: int, sys: AffineSystem) -> Fraction:
    """Exact value of sum_{i > upto_i} sum_j (j+1) * chain_density(i, j).

    Dominates the Hausdorff series tail: each term of that series is at most
    sum_j chain_density(i, j) * (j + 1).
    """
    J = upto_i
    if J < 1:
        raise ValueError("truncation index must be >= 1")
    p, q, d, p1, q1 = sys.p, sys.q, sys.d, sys.p1, sys.q1
    if sys.case_tag is not CaseTag.DIVISIBLE_GENERAL:
        raise InvalidSystemError("census tail requires the divisible-general case")
    tail = weighted_census_tail(J, sys)
    # add one extra unit of weight per chain: sum_{i>J} sum_j chain_density
    tail += Fraction(q1 - 1, q1) * (Fraction(1, p) - Fraction(1, q)) * Fraction(1, p1 ** (J - 1))
    for j in range(2, J + 1):
        tail += window_length_density(j, sys) * Fraction(1, p1 ** (J - j + 1))
    # sum_{j > J} window_length_density(j) = (q1-1) / (d * q1^{J+1})
    tail += Fraction(q1 - 1, d * q1 ** (J + 1))
    return tail


@dataclass(frozen=True)
class DensityTable:
    """Closed-form densities up to a chain-length cutoff, exact rationals."""

    P: dict[tuple[int, int], Fraction]
    singleton_density: Fraction

    def row_weight(self, i: int) -> Fraction:
        return sum(v for (ii, _), v in self.P.items() if ii == i)


def density_table(sys: AffineSystem, max_length: int) -> DensityTable:
    """Tabulate chain_density for 1 <= j <= i <= max_length."""
    P = {
        (i, j): chain_density(i, j, sys)
        for i in range(1, max_length + 1)
        for j in range(1, i + 1)
    }
    return DensityTable(P=P, singleton_density=singleton_density(sys))


def chain_length_groups(dec: ChainDecomposition) -> dict[object, list[Chain]]:
    """Group chains by the measure family they carry: full length for finite
    chains, the string "inf" for truncated (infinite-orbit) chains."""
    groups: dict[object, list[Chain]] = {}
    for ch in dec.chains:
        key: object = "inf" if ch.truncated else ch.full_length
        groups.setdefault(key, []).append(ch)
    return groups
