"""Signed index vectors, their admissible sets and the Chebyshev-type counts."""

from __future__ import annotations

import itertools
import math
from typing import Literal, Sequence

SIZE_GUARD = 10**7

IndexVector = tuple[int, ...]


def label_key(j: int) -> tuple[int, int]:
    """Sort key realizing 1 < -1 < 2 < -2 < ..."""
    return (abs(j), 0 if j > 0 else 1)


def vector_key(v: Sequence[int]) -> tuple:
    return tuple(label_key(j) for j in v)


def in_I_prime(v: Sequence[int]) -> bool:
    return not any(v[j] == -1 and v[j + 1] == 1 for j in range(len(v) - 1))


def in_I(v: Sequence[int]) -> bool:
    return len(v) > 0 and v[-1] > 0 and in_I_prime(v)


def labels(g: int) -> list[int]:
    return sorted((s * j for j in range(1, g + 1) for s in (1, -1)), key=label_key)


def enumerate_index_vectors(g: int, t: int, which: Literal["I", "I'"] = "I") -> list[IndexVector]:
    """All admissible vectors of length t with labels in +-1..+-g, in canonical order."""
    if g < 1 or t < 1:
        raise ValueError("g and t must be positive")
    if which not in ("I", "I'"):
        raise ValueError(f"unknown index set {which!r}")
    if (2 * g) ** t > SIZE_GUARD:
        raise ValueError(f"(2g)^t = {(2 * g) ** t} exceeds the enumeration guard {SIZE_GUARD}")
    pred = in_I if which == "I" else in_I_prime
    # product over labels already sorted by label_key yields canonical lexicographic order
    return [v for v in itertools.product(labels(g), repeat=t) if pred(v)]


def count_sequences(g: int, t_max: int) -> tuple[list[int], list[int]]:
    """Return (b, a) indexed 0..t_max with b_0 = 1, b_1 = 2g and a_t = b_t - g b_{t-1}.

    a_0 is set to 1 by convention; only t >= 1 entries are meaningful counts.
    For g = 0 there are no labels, so every count with t >= 1 is 0 (the bare
    recurrence would produce b_2 = -1).
    """
    if g < 0:
        raise ValueError("g must be nonnegative")
    if t_max < 1:
        raise ValueError("t_max must be positive")
    if g == 0:
        return [1] + [0] * t_max, [1] + [0] * t_max
    b = [1, 2 * g]
    for _ in range(2, t_max + 1):
        b.append(2 * g * b[-1] - b[-2])
    a = [1] + [b[t] - g * b[t - 1] for t in range(1, t_max + 1)]
    return b, a


def chebyshev_T(g: float, t: int) -> float:
    """Closed form of a_t: ((g + sqrt(g^2-1))^t + (g - sqrt(g^2-1))^t) / 2."""
    if g >= 1:
        r = math.sqrt(g * g - 1)
        return ((g + r) ** t + (g - r) ** t) / 2
    return math.cos(t * math.acos(g))


def chebyshev_U(g: float, t: int) -> float:
    """Closed form of b_t: second-kind Chebyshev value at g."""
    if g > 1:
        r = math.sqrt(g * g - 1)
        return ((g + r) ** (t + 1) - (g - r) ** (t + 1)) / (2 * r)
    if g == 1:
        return float(t + 1)
    th = math.acos(g)
    if math.sin(th) == 0:
        return float((t + 1) * (1 if g > 0 else (-1) ** t))
    return math.sin((t + 1) * th) / math.sin(th)


def dim_quotient(g: int, t: int, weight: int = 2, dim_Sk: int | None = None) -> int:
    """Dimension of S_k^t / S_k^{t-1}.

    Weight 2 gives a_t. For weight k >= 4 the row labelled t (t >= 1) is
    dim S_k times b_{t-1}; so t = 1 is dim S_k itself and t = 2 is 2g dim S_k.
    """
    if weight < 2 or weight % 2:
        raise ValueError("weight must be an even integer >= 2")
    if t < 1:
        raise ValueError("t must be positive")
    if g < 0:
        raise ValueError("g must be nonnegative")
    if weight == 2:
        if g == 0:
            return 0
        return count_sequences(g, t)[1][t]
    if dim_Sk is None or dim_Sk < 0:
        raise ValueError("weight >= 4 needs a nonnegative dim_Sk")
    b, _ = count_sequences(g, max(t - 1, 1))
    return dim_Sk * b[t - 1]


def weight2_table(g_values: Sequence[int], t_max: int) -> list[list[int]]:
    """Rows t = 1..t_max, columns g."""
    return [[dim_quotient(g, t) for g in g_values] for t in range(1, t_max + 1)]


def higher_weight_table(g_values: Sequence[int], t_max: int, dim_Sk: int) -> list[list[int]]:
    """Rows t = 2..t_max of the weight >= 4 quotient dimensions."""
    return [[dim_quotient(g, t, 4, dim_Sk) for g in g_values] for t in range(2, t_max + 1)]
