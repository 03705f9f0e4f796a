"""Slow, obviously-correct GF(2) oracles shared by the test modules."""

import itertools


def minimal_lfsr_length(seq):
    """Smallest L such that some taps c_1..c_L generate seq (exhaustive search)."""
    n = len(seq)
    for L in range(n + 1):
        for taps in itertools.product((0, 1), repeat=L):
            if all(
                seq[i] == sum(taps[j] & seq[i - 1 - j] for j in range(L)) % 2 for i in range(L, n)
            ):
                return L
    return n


def naive_rank(bits):
    rows = [list(map(int, r)) for r in bits]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                rows[r] = [a ^ b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def poly_mod(a, b):
    db = b.bit_length()
    while a and a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def irreducible(poly):
    d = poly.bit_length() - 1
    return all(poly_mod(poly, q) for q in range(2, 1 << (d // 2 + 1)) if q.bit_length() - 1 >= 1)


def lfsr_sequence(taps, fill, n):
    seq = list(fill)
    d = len(taps)
    while len(seq) < n:
        seq.append(sum(taps[j] & seq[-1 - j] for j in range(d)) % 2)
    return seq[:n]
