"""Ratcliff-Obershelp string similarity.

Gives the same ratio as ``difflib.SequenceMatcher(None, a, b).ratio()`` with
no junk. Inputs shorter than 200 characters are always identical to the
difflib default, which only applies its popular-character heuristic to longer
strings.
"""
from __future__ import annotations

from collections import defaultdict


def normalize(s: str) -> str:
    """Lowercase and drop every character that is not a letter or a digit.

    >>> normalize("Ball-Milling")
    'ballmilling'
    """
    return "".join(ch for ch in s.lower() if ch.isalnum())


def longest_match(a: str, b: str, alo: int, ahi: int, blo: int, bhi: int,
                  positions: dict[str, list[int]]) -> tuple[int, int, int]:
    """Longest common block of ``a[alo:ahi]`` and ``b[blo:bhi]``.

    Ties go to the block starting earliest in ``a``, then earliest in ``b``.
    ``positions`` maps each character of ``b`` to its ascending indices.
    """
    best_i, best_j, best_k = alo, blo, 0
    run: dict[int, int] = {}
    for i in range(alo, ahi):
        new_run: dict[int, int] = {}
        for j in positions.get(a[i], ()):
            if j < blo:
                continue
            if j >= bhi:
                break
            k = new_run[j] = run.get(j - 1, 0) + 1
            if k > best_k:
                best_i, best_j, best_k = i - k + 1, j - k + 1, k
        run = new_run
    return best_i, best_j, best_k


def matching_blocks(a: str, b: str) -> list[tuple[int, int, int]]:
    """All blocks found by recursing left and right of each longest match."""
    positions: dict[str, list[int]] = defaultdict(list)
    for j, ch in enumerate(b):
        positions[ch].append(j)
    blocks = []
    todo = [(0, len(a), 0, len(b))]
    while todo:
        alo, ahi, blo, bhi = todo.pop()
        i, j, k = longest_match(a, b, alo, ahi, blo, bhi, positions)
        if not k:
            continue
        blocks.append((i, j, k))
        if alo < i and blo < j:
            todo.append((alo, i, blo, j))
        if i + k < ahi and j + k < bhi:
            todo.append((i + k, ahi, j + k, bhi))
    blocks.sort()
    return blocks


def similarity(a: str, b: str) -> float:
    """``2 * M / (len(a) + len(b))``; two empty strings score 1.0."""
    total = len(a) + len(b)
    if not total:
        return 1.0
    matched = sum(k for _, _, k in matching_blocks(a, b))
    return 2.0 * matched / total

