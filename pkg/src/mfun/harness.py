"""Averaging experiments: twist averages against the characteristic
series, equidistribution against the inverted density, and harmonic
form-family averages with Petersson consistency checks.

Empirical sides are computed with compensated, fixed-order accumulation;
each experiment returns a ComparisonRecord pairing the empirical value
with its theoretical counterpart.
"""

from __future__ import annotations

import cmath
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .accum import KahanSum, compensated_array_total
from .arith import factorize, is_prime, primes_up_to, tau3
from .characters import CharacterGroup
from .coeffs import CoeffCase, l_table
from .density import ComplexGrid, GuardError, integrate_against
from .errors import FormatError, RegimeError
from .forms import ModularForm, eta, satake
from .lfun import EvalParams, frak_L, g_plus
from .mtilde import MtildeParams, mtilde_harmonic, mtilde_series

SUM_OMEGA_WARN = 0.2  # reported consistency tolerance for sum of weights


def psi(z1: complex, z2: complex, w) -> complex:
    """Quasi-character psi_{z1,z2}(w) = exp((i/2)(z1 conj(w) + z2 w))."""
    w = np.asarray(w, dtype=np.complex128)
    out = np.exp(0.5j * (z1 * np.conj(w) + z2 * w))
    return complex(out) if out.ndim == 0 else out


@dataclass
class ComparisonRecord:
    empirical: complex
    theoretical: complex
    modulus_or_level: int
    parameters: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def abs_error(self) -> float:
        return abs(self.empirical - self.theoretical)

    def to_json(self) -> str:
        payload = {
            "empirical": [self.empirical.real, self.empirical.imag],
            "theoretical": [self.theoretical.real, self.theoretical.imag],
            "abs_error": self.abs_error,
            "modulus_or_level": self.modulus_or_level,
            "parameters": self.parameters,
            "notes": self.notes,
        }
        return json.dumps(payload, sort_keys=True)


def frakL_all_chars(case: CoeffCase, form: ModularForm, group: CharacterGroup,
                    s: complex, params: EvalParams | None = None) -> np.ndarray:
    """Value of log L / L'/L for every twist by a character mod m, as an
    array indexed by the character index (0 = principal)."""
    params = params or EvalParams()
    s = complex(s)
    if s.real <= 1:
        raise RegimeError("rigorous character sweep needs Re(s) > 1")
    m = group.modulus
    order = group.order
    j_idx = np.arange(order, dtype=np.int64)
    out = np.zeros(order, dtype=np.complex128)
    for p in primes_up_to(min(params.p_max, form.p_max)):
        if p % m == 0:
            continue  # chi(p) = 0: the local factor drops out
        pair = satake(form, p)
        u = p ** (-s)
        t = group.roots[(j_idx * int(group.dlog[p % m])) % order]
        if case is CoeffCase.LOG:
            term = -np.log(1 - pair.alpha * u * t)
            if pair.beta:
                term = term - np.log(1 - pair.beta * u * t)
        else:
            w1 = pair.alpha * u * t
            term = w1 / (1 - w1)
            if pair.beta:
                w2 = pair.beta * u * t
                term = term + w2 / (1 - w2)
            term = -math.log(p) * term
        out += term
    return out


def g_plus_all_chars(case: CoeffCase, form: ModularForm, group: CharacterGroup,
                     s: complex, z: complex,
                     params: EvalParams | None = None) -> np.ndarray:
    """Smoothed g_+ for every twist at once.

    Folding the coefficient sums into discrete-log classes turns the
    character sweep into one length-(m-1) DFT.
    """
    params = params or EvalParams()
    s = complex(s)
    if s.real <= 0.5:
        raise RegimeError("g_plus needs Re(s) > 1/2")
    m, order = group.modulus, group.order
    n_max, X = params.n_max, params.X
    lv = l_table(case, z, form, n_max)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    coeffs = lv[1:] * np.exp(-n / X) * n ** (-s)
    nmod = np.arange(1, n_max + 1) % m
    keep = nmod != 0
    classes = np.zeros(order, dtype=np.complex128)
    np.add.at(classes, group.dlog[nmod[keep]], coeffs[keep])
    # sum_d S_d omega^{jd} is an inverse DFT of the class sums
    return np.fft.ifft(classes) * order


def _avg(values: np.ndarray, include_principal: bool) -> complex:
    vals = values if include_principal else values[1:]
    return compensated_array_total(vals) / vals.size


def avg_twists(case: CoeffCase, form: ModularForm, m: int, s: complex,
               z1: complex, z2: complex, include_principal: bool = True,
               params: EvalParams | None = None,
               mt_params: MtildeParams | None = None) -> ComparisonRecord:
    """Average of psi_{z1,z2} over all character twists mod m, against the
    sigma-diagonal characteristic series with the avoid-m filter.

    Re(s) > 1 runs on the rigorous evaluator; 1/2 < Re(s) <= 1 runs in
    exploratory mode through the smoothed sums (X defaults to m).
    """
    if form.level % m == 0:
        raise ValueError("modulus must be coprime to the level")
    if not is_prime(m):
        raise ValueError("modulus must be prime")
    s = complex(s)
    group = CharacterGroup(m)
    exploratory = s.real <= 1
    if exploratory:
        if s.real <= 0.5:
            raise RegimeError("need Re(s) > 1/2")
        if params is None:
            params = EvalParams(X=float(m))  # conductor-linked smoothing scale
        ga = g_plus_all_chars(case, form, group, s, -np.conj(z1), params)
        gb = g_plus_all_chars(case, form, group, s, z2, params)
        values = np.conj(ga) * gb
    else:
        ls = frakL_all_chars(case, form, group, s, params)
        values = psi(z1, z2, ls)
    empirical = _avg(values, include_principal)
    mtp = mt_params or MtildeParams()
    mtp = MtildeParams(n_max=mtp.n_max, p_max=mtp.p_max, r_max=mtp.r_max,
                       avoid_prime=m, tol=mtp.tol)
    theoretical = mtilde_series(case, form, s.real, z1, z2, mtp)
    return ComparisonRecord(
        empirical=empirical, theoretical=theoretical, modulus_or_level=m,
        parameters={
            "experiment": "avg-twists", "case": case.value, "form": form.label,
            "s": [s.real, s.imag], "z1": [complex(z1).real, complex(z1).imag],
            "z2": [complex(z2).real, complex(z2).imag],
            "include_principal": include_principal,
            "mode": "exploratory" if exploratory else "rigorous",
        },
        notes=(["exploratory regime: no acceptance weight"] if exploratory else []))


def equidist_test(case: CoeffCase, form: ModularForm, m: int, sigma: float,
                  density: ComplexGrid, phis,
                  params: EvalParams | None = None,
                  include_principal: bool = True) -> list[ComparisonRecord]:
    """Average of Phi(frak_L) over twists versus the density integral."""
    if sigma <= 1:
        raise RegimeError("equidistribution runs rigorously only for sigma > 1")
    if density.sigma != sigma or density.case is not case or \
            density.form_label != form.label:
        raise ValueError("density grid was computed for different parameters")
    edge = max(float(np.abs(density.samples[[0, -1], :]).max()),
               float(np.abs(density.samples[:, [0, -1]]).max()))
    if edge > 1e-6:
        raise GuardError(
            "density mass reaches the w-grid boundary; the inversion is "
            "wrapped and integrals would be corrupted")
    group = CharacterGroup(m)
    ls = frakL_all_chars(case, form, group, sigma, params)
    vals_src = ls if include_principal else ls[1:]
    out = []
    for phi in phis:
        emp_vals = phi.evaluate(vals_src)
        empirical = compensated_array_total(emp_vals) / emp_vals.size
        theoretical = integrate_against(density, phi)
        out.append(ComparisonRecord(
            empirical=empirical, theoretical=theoretical, modulus_or_level=m,
            parameters={
                "experiment": "equidist", "case": case.value,
                "form": form.label, "sigma": sigma, "phi": repr(phi),
                "include_principal": include_principal,
            }))
    return out


# ---------------------------------------------------------------------------
# form families

@dataclass
class FamilyForm:
    label: str
    form: ModularForm
    omega: float
    omega_supplied: bool


@dataclass
class FormFamily:
    level: int
    weight: int
    p_max: int
    forms: list[FamilyForm]
    weights_source: str  # "supplied" | "sym2-truncated" | "mixed"
    warnings: list = field(default_factory=list)

    @property
    def sum_omega(self) -> float:
        return math.fsum(f.omega for f in self.forms)

    @property
    def phi_ratio(self) -> float:
        out = 1.0
        for p, _ in factorize(self.level):
            out *= 1 - 1 / p
        return out


def sym2_weight(form: ModularForm, p_max: int) -> float:
    """Harmonic weight 2 pi^2 / ((k-1) N L(Sym2 f, 1)) with the symmetric
    square value from a truncated Euler product; no convergence guarantee
    at the edge, so callers must flag it."""
    lval = 1.0
    for p in primes_up_to(min(p_max, form.p_max)):
        pair = satake(form, p)
        u = 1.0 / p
        a2 = pair.alpha * pair.alpha
        if form.level % p == 0:
            lval *= 1 / abs(1 - a2 * u)
        else:
            b2 = pair.beta * pair.beta
            local = (1 - a2 * u) * (1 - u) * (1 - b2 * u)
            lval *= 1 / abs(local)
    return 2 * math.pi**2 / ((form.weight - 1) * form.level * lval)


def load_family(path) -> FormFamily:
    """Read a family JSON file; fill missing harmonic weights from the
    truncated symmetric-square product (flagged), and record consistency
    warnings instead of failing on them."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"family file is not valid JSON: {exc}") from exc
    try:
        level = int(raw["level"])
        weight = int(raw["weight"])
        p_max = int(raw["p_max"])
        entries = raw["forms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"family header malformed: {exc}") from exc
    if not is_prime(level):
        raise FormatError(f"family level {level} must be prime")
    if not entries:
        raise FormatError("family has no forms")
    warnings_list = []
    forms = []
    norm = (weight - 1) / 2
    for entry in entries:
        label = str(entry.get("label", f"form{len(forms)}"))
        try:
            ap_rows = entry["ap"]
            eig = {}
            for row in ap_rows:
                p, ap = int(row[0]), float(row[1])
                eig[p] = ap / p**norm
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise FormatError(f"malformed eigenvalue row in form {label!r}: {exc}") from exc
        mf = ModularForm(level, weight, eig, label=label)
        missing = [p for p in primes_up_to(p_max) if p not in eig]
        if missing:
            raise FormatError(
                f"form {label!r} missing eigenvalues below p_max, first at "
                f"p={missing[0]}")
        omega = entry.get("omega")
        forms.append((label, mf, omega))
    supplied = [o for _, _, o in forms if o is not None]
    if supplied and any(float(o) <= 0 for o in supplied):
        raise FormatError("harmonic weights must be positive")
    family_forms = []
    for label, mf, omega in forms:
        if omega is None:
            family_forms.append(FamilyForm(label, mf, sym2_weight(mf, p_max), False))
        else:
            family_forms.append(FamilyForm(label, mf, float(omega), True))
    if len(supplied) == len(forms):
        source = "supplied"
    elif not supplied:
        source = "sym2-truncated"
        warnings_list.append(
            "all harmonic weights estimated from a TRUNCATED symmetric-square "
            "Euler product; values are caveated, not certified")
    else:
        source = "mixed"
        warnings_list.append(
            "some harmonic weights estimated from a TRUNCATED symmetric-square "
            "Euler product")
    fam = FormFamily(level, weight, p_max, family_forms, source, warnings_list)
    if len(family_forms) == 1:
        fam.warnings.append("degenerate weights: single-form family")
    if source == "supplied":
        dev = abs(fam.sum_omega - fam.phi_ratio)
        if dev > SUM_OMEGA_WARN:
            fam.warnings.append(
                f"sum of weights {fam.sum_omega:.4f} deviates from phi(N)/N "
                f"{fam.phi_ratio:.4f} by {dev:.4f} (> {SUM_OMEGA_WARN})")
    return fam


def save_family(fam: FormFamily, path) -> None:
    norm = (fam.weight - 1) / 2
    payload = {
        "level": fam.level, "weight": fam.weight, "p_max": fam.p_max,
        "forms": [
            {
                "label": f.label,
                "ap": [[p, f.form.eta_prime(p) * p**norm]
                       for p in f.form.stored_primes()],
                **({"omega": f.omega} if f.omega_supplied else {}),
            }
            for f in fam.forms
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def ordered_chunked_map(fn, items, threads: int = 1, chunk: int = 8) -> list:
    """Map with optional thread workers; chunk size is fixed so results
    and their order never depend on the worker count."""
    chunks = [items[i : i + chunk] for i in range(0, len(items), chunk)]
    if threads <= 1 or len(chunks) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda ch: [fn(x) for x in ch], chunks))
    return [x for part in parts for x in part]


def avg_forms(case: CoeffCase, family: FormFamily, s: complex,
              z1: complex, z2: complex, params: EvalParams | None = None,
              cutoff: int = 2000, threads: int = 1) -> ComparisonRecord:
    """Harmonic average of psi_{z1,z2}(frak_L(f, s)) over the family versus
    the harmonic double-sum series."""
    if not family.forms:
        raise ValueError("family is empty")
    s = complex(s)
    exploratory = s.real <= 1
    if exploratory and s.real <= 0.5:
        raise RegimeError("need Re(s) > 1/2")

    def one(f: FamilyForm) -> complex:
        if exploratory:
            ga = g_plus(case, f.form, None, None, s, -complex(z1).conjugate(), params)
            gb = g_plus(case, f.form, None, None, s, z2, params)
            return f.omega * complex(ga).conjugate() * gb
        val = frak_L(case, f.form, None, None, s, params)
        return f.omega * psi(z1, z2, val)

    terms = ordered_chunked_map(one, family.forms, threads)
    acc = KahanSum(0j)
    for t in terms:
        acc.add(complex(t))
    empirical = acc.value
    theoretical = mtilde_harmonic(case, s, z1, z2, cutoff)
    sum_omega = family.sum_omega
    return ComparisonRecord(
        empirical=empirical, theoretical=theoretical,
        modulus_or_level=family.level,
        parameters={
            "experiment": "avg-forms", "case": case.value,
            "weight": family.weight, "s": [s.real, s.imag],
            "z1": [complex(z1).real, complex(z1).imag],
            "z2": [complex(z2).real, complex(z2).imag],
            "cutoff": cutoff, "sum_omega": sum_omega,
            "sum_omega_deviation": abs(sum_omega - family.phi_ratio),
            "weights_source": family.weights_source,
            "mode": "exploratory" if exploratory else "rigorous",
        },
        notes=list(family.warnings))


def petersson_check(family: FormFamily, x: int, y: int) -> ComparisonRecord:
    """Weighted eigenvalue correlation S(x, y) against phi(N)/N delta(x,y),
    with the error logged relative to the trace-formula bound shape."""
    N, k = family.level, family.weight
    if math.gcd(x * y, N) != 1:
        raise ValueError(f"gcd(xy, N) must be 1, got x={x}, y={y}, N={N}")
    for v, name in ((x, "x"), (y, "y")):
        for p, _ in factorize(v) if v > 1 else []:
            if p > family.p_max:
                raise ValueError(f"{name}={v} has prime factor {p} beyond "
                                 f"family p_max {family.p_max}")
    acc = KahanSum(0.0)
    for f in family.forms:
        acc.add(f.omega * eta(f.form, x) * eta(f.form, y))
    empirical = acc.value
    theoretical = family.phi_ratio if x == y else 0.0
    g = math.gcd(x, y)
    tau_n = 1.0
    for _, e in factorize(N):
        tau_n *= e + 1
    bound = (k ** (-5 / 6) * (x * y) ** 0.25 / N * tau_n**2 * tau3(g)
             * math.log(2 * x * y * N))
    err = abs(empirical - theoretical)
    return ComparisonRecord(
        empirical=complex(empirical), theoretical=complex(theoretical),
        modulus_or_level=N,
        parameters={
            "experiment": "petersson", "x": x, "y": y, "weight": k,
            "bound_shape": bound,
            "error_to_bound_ratio": err / bound if bound else math.inf,
            "weights_source": family.weights_source,
        },
        notes=list(family.warnings))
