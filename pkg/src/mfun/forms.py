"""Primitive cusp forms: normalized Hecke eigenvalues and Satake parameters.

A ModularForm stores the normalized eigenvalues eta(p) = a_p / p^{(k-1)/2}
for primes up to a cutoff.  Values at general n follow from
multiplicativity and the Hecke recursion at good primes; at primes
exactly dividing the level, eta(p^r) = eta(p)^r.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .arith import factorize, is_prime, is_squarefree, primes_up_to
from .errors import FormatError
from .qexp import delta_tau_table

P_MAX_CAP = 10**6

DELIGNE_TOL = 1e-12
BAD_PRIME_TOL = 1e-12


@dataclass(frozen=True)
class SatakePair:
    alpha: complex
    beta: complex


class ModularForm:
    """Immutable container of normalized eigenvalues for one primitive form."""

    def __init__(self, level: int, weight: int, eigenvalues: dict[int, float],
                 label: str = ""):
        if level < 1:
            raise FormatError(f"level must be positive, got {level}")
        if not is_squarefree(level):
            raise FormatError(f"level {level} is not squarefree")
        if weight < 2 or weight % 2:
            raise FormatError(f"weight must be a positive even integer, got {weight}")
        for p, eta_p in eigenvalues.items():
            if p == level or (level % p == 0):
                target = p ** -0.5
                if abs(abs(eta_p) - target) > BAD_PRIME_TOL:
                    raise FormatError(
                        f"eigenvalue at bad prime {p} must be +-{p}^(-1/2), got {eta_p}")
            elif abs(eta_p) > 2 + DELIGNE_TOL:
                raise FormatError(
                    f"Deligne bound violated at p={p}: |eta|={abs(eta_p)} > 2")
        self.level = level
        self.weight = weight
        self._eta_p = dict(eigenvalues)
        self.p_max = max(eigenvalues) if eigenvalues else 0
        self.label = label

    def __repr__(self):
        return (f"ModularForm({self.label!r}, level={self.level}, "
                f"weight={self.weight}, p_max={self.p_max})")

    def eta_prime(self, p: int) -> float:
        try:
            return self._eta_p[p]
        except KeyError:
            raise ValueError(
                f"form {self.label!r} has no eigenvalue at p={p} "
                f"(p_max={self.p_max})") from None

    def stored_primes(self) -> list[int]:
        return sorted(self._eta_p)


def build_builtin(spec: str, p_max: int) -> ModularForm:
    """Built-in forms: "delta" (weight 12, level 1) and "11a" (weight 2, level 11).

    delta's raw coefficients come from the exact q-expansion of
    q*prod(1-q^n)^24; 11a's a_p from direct point counting on
    y^2 + y = x^3 - x^2 - 10x - 20 over F_p, with a_11 = 1.
    """
    if p_max < 2:
        raise ValueError("p_max must be >= 2")
    if p_max > P_MAX_CAP:
        raise ValueError(f"p_max {p_max} exceeds cap {P_MAX_CAP}")
    if spec == "delta":
        tau = delta_tau_table(p_max)
        eig = {p: tau[p - 1] / p**5.5 for p in primes_up_to(p_max)}
        return ModularForm(1, 12, eig, label="delta")
    if spec == "11a":
        eig = {}
        for p in primes_up_to(p_max):
            if p == 11:
                eig[p] = 1 / math.sqrt(11)  # a_11 = +1
            else:
                eig[p] = _curve11_ap(p) / math.sqrt(p)
        return ModularForm(11, 2, eig, label="11a")
    raise ValueError(f"unknown builtin form {spec!r}")


def _curve11_ap(p: int) -> int:
    """a_p = p + 1 - #E(F_p) for y^2 + y = x^3 - x^2 - 10x - 20, p != 11."""
    if p == 2:
        count = 1  # infinity
        for x in range(2):
            for y in range(2):
                if (y * y + y - (x**3 - x * x - 10 * x - 20)) % 2 == 0:
                    count += 1
        return p + 1 - count
    # complete the square: y^2+y = g(x)  <=>  (2y+1)^2 = 4g(x)+1
    sq = bytearray(p)
    for u in range((p // 2) + 1):
        sq[u * u % p] = 1
    total = 0
    for x in range(p):
        v = (4 * (x * x * x - x * x - 10 * x - 20) + 1) % p
        if v == 0:
            continue
        total += 1 if sq[v] else -1
    return -total


def load_form(path) -> ModularForm:
    """Read an eigenvalue CSV: `#level=N,weight=k,label=text` then `p,a_p` rows."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise FormatError("missing header line '#level=...,weight=...,label=...'")
    header = {}
    for item in lines[0][1:].split(","):
        if "=" not in item:
            raise FormatError(f"bad header item {item!r}")
        key, _, val = item.partition("=")
        header[key.strip()] = val.strip()
    try:
        level = int(header["level"])
        weight = int(header["weight"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad header: {exc}") from exc
    label = header.get("label", "")
    if not is_squarefree(level):
        raise FormatError(f"level {level} is not squarefree")
    norm = (weight - 1) / 2
    eig = {}
    last_p = 0
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 2:
            raise FormatError(f"bad row {ln!r}")
        try:
            p = int(parts[0])
            ap = float(parts[1])
        except ValueError as exc:
            raise FormatError(f"bad row {ln!r}: {exc}") from exc
        if not is_prime(p):
            raise FormatError(f"index {p} is not prime")
        if p <= last_p:
            raise FormatError(f"primes not strictly increasing at {p}")
        last_p = p
        if level % p and abs(ap) > 2 * p**norm * (1 + DELIGNE_TOL):
            raise FormatError(
                f"Deligne bound violated at p={p}: |a_p|={abs(ap)} > 2*p^{norm}")
        eig[p] = ap / p**norm
    return ModularForm(level, weight, eig, label=label)


def save_form(form: ModularForm, path) -> None:
    """Write the eigenvalue CSV (raw coefficients, denormalized)."""
    norm = (form.weight - 1) / 2
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#level={form.level},weight={form.weight},label={form.label}\n")
        for p in form.stored_primes():
            fh.write(f"{p},{form.eta_prime(p) * p**norm!r}\n")


def eta(form: ModularForm, n: int) -> float:
    """Normalized eigenvalue eta(n), multiplicative over coprime factors."""
    if n < 1:
        raise ValueError("n must be positive")
    out = 1.0
    for p, r in factorize(n):
        out *= eta_prime_power(form, p, r)
    return out


def eta_prime_power(form: ModularForm, p: int, r: int) -> float:
    ep = form.eta_prime(p)
    if form.level % p == 0:
        return ep**r
    # Hecke recursion eta(p^{j+1}) = eta(p) eta(p^j) - eta(p^{j-1})
    prev, cur = 0.0, 1.0
    for _ in range(r):
        prev, cur = cur, ep * cur - prev
    return cur


def satake(form: ModularForm, p: int) -> SatakePair:
    """Local roots of x^2 - eta(p) x + 1 (good p), or (eta(p), 0) at p | level.

    At good primes the root with nonnegative imaginary part comes first;
    |eta(p)| <= 2 guarantees the pair is unit-modulus conjugates.
    """
    ep = form.eta_prime(p)
    if form.level % p == 0:
        return SatakePair(complex(ep), 0j)
    disc = 1 - ep * ep / 4
    root = cmath.sqrt(complex(disc)) if disc < 0 else math.sqrt(disc) * 1j
    alpha = ep / 2 + root
    beta = ep / 2 - root
    if alpha.imag < beta.imag or (alpha.imag == beta.imag and alpha.real < beta.real):
        alpha, beta = beta, alpha
    return SatakePair(alpha, beta)
