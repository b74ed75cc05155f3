"""2-adic classification of cycle lengths and Diophantine non-mixing certificates.

If C_n (n even) hit the uniform distribution exactly at some t, every
amplitude would be +-1/sqrt(n) on even vertices and +-i/sqrt(n) on odd ones.
The even and odd amplitude sums equal cos 2t and -i sin 2t, so with k and l
negative signs among the even and odd vertices,

    (n - 4k)^2 + (n - 4l)^2 = 4n,    0 <= k, l <= n/2.

No integer solution means C_n never mixes exactly uniformly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

# (n - 4k)^2 must stay below 2^63 - 1
MAX_N = math.isqrt(2**63 - 1)


class Verdict(enum.Enum):
    PROVEN_POWER_OF_TWO = "ProvenNotIUM_PowerOfTwo"
    PROVEN_Q_THREE_MOD_4 = "ProvenNotIUM_QThreeMod4"
    PROVEN_DIOPHANTINE_EMPTY = "ProvenNotIUM_DiophantineEmpty"
    KNOWN_UNIFORM_C2 = "KnownUniform_C2"
    OPEN = "Open"

    @property
    def proven_not_uniform(self) -> bool:
        return self.value.startswith("ProvenNotIUM")


@dataclass(frozen=True)
class MixingVerdict:
    n: int
    u: int
    q: int
    verdict: Verdict
    certificate: tuple | None = None

    def to_dict(self) -> dict:
        cert = None if self.certificate is None else [list(p) for p in self.certificate]
        return {"n": self.n, "u": self.u, "q": self.q, "verdict": self.verdict.value, "certificate": cert}


def _check_n(n, lo: int, hi: int = MAX_N) -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise ValueError(f"n must be an integer, got {n!r}")
    if n < lo:
        raise ValueError(f"n must be >= {lo}, got {n}")
    if n > hi:
        raise ValueError(f"n = {n} exceeds the 64-bit safe range {hi}")
    return n


def two_adic_split(n: int) -> tuple[int, int]:
    """(u, q) with n = 2^u q and q odd."""
    _check_n(n, 1, 2**63 - 1)
    u = (n & -n).bit_length() - 1
    return u, n >> u


def diophantine_certificate(n: int) -> list[tuple[int, int]]:
    """All (k, l) in [0, n/2]^2 with (n - 4k)^2 + (n - 4l)^2 = 4n, ascending.

    Only |n - 4k| <= 2 sqrt(n) can contribute, so the scan is O(sqrt n).
    """
    _check_n(n, 2)
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    half = n // 2
    target = 4 * n
    r = math.isqrt(target)
    k_lo = max(0, -((r - n) // 4))  # ceil((n - r) / 4)
    k_hi = min(half, (n + r) // 4)
    squares = {}
    for k in range(k_lo, k_hi + 1):
        squares.setdefault((n - 4 * k) ** 2, []).append(k)
    out = []
    for a2, ks in squares.items():
        for l in squares.get(target - a2, ()):
            out.extend((k, l) for k in ks)
    return sorted(out)


def classify_cycle(n: int) -> MixingVerdict:
    """2-adic cases first, then the Diophantine certificate for the remaining even n."""
    _check_n(n, 2)
    u, q = two_adic_split(n)
    cert = tuple(diophantine_certificate(n)) if n % 2 == 0 else None
    if n == 2:
        verdict = Verdict.KNOWN_UNIFORM_C2
    elif u >= 3 and q == 1:
        verdict = Verdict.PROVEN_POWER_OF_TWO
    elif u >= 1 and q % 4 == 3:
        verdict = Verdict.PROVEN_Q_THREE_MOD_4
    elif cert is not None and not cert:
        verdict = Verdict.PROVEN_DIOPHANTINE_EMPTY
    else:
        verdict = Verdict.OPEN
    return MixingVerdict(n, u, q, verdict, cert)
