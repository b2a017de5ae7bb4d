"""Martingales over a base measure: quotients, the inverse recursion back to a
measure, the savings transform, capital traces, and exhaustive audits."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .errors import PreconditionError, check_enumeration_depth
from .measure import AuditReport, Measure, from_masses
from .rationals import ONE, RAT, ZERO


class Martingale:
    """Capital function on finite strings, fair against its base measure.

    capital(sigma) is None exactly on null cylinders for every martingale the
    library builds; hand-built tables may violate that, which check_fairness
    reports.
    """

    def __init__(
        self,
        base: Measure,
        capital_fn: Callable[[str], Optional[Fraction]],
        label="martingale",
        kernel=None,
    ):
        self.base = base
        self._capital_fn = capital_fn
        self.label = label
        self.kernel = kernel  # optional fused tree walker for exhaustive audits

    def __repr__(self):
        return f"Martingale({self.label} vs {self.base.label})"

    def capital(self, sigma: str) -> Optional[Fraction]:
        return self._capital_fn(sigma)


class QuotientKernel:
    """Fused walker for numerator/denominator martingales: payloads carry the
    (base mass, numerator mass) pair down the tree."""

    def __init__(self, nu: Measure, mu: Measure):
        self.nu = nu
        self.mu = mu

    def root(self):
        return (self.mu.mass(""), self.nu.mass(""))

    def children(self, sigma: str, payload):
        m, n = payload
        m0, m1 = self.mu.children_masses(sigma, m)
        n0, n1 = self.nu.children_masses(sigma, n)
        return (m0, n0), (m1, n1)

    def read(self, payload):
        m, n = payload
        return (m, None) if m == 0 else (m, n / m)


class SavingsKernel:
    """Fused walker for the savings recursion stacked on a source kernel.

    Payloads are (source payload, N, f); below a null cylinder the N and f
    slots are unused.
    """

    def __init__(self, inner, shift: bool, scale=ONE):
        self.inner = inner
        self.offset = 1 if shift else 0
        self.scale = scale

    def root(self):
        payload = self.inner.root()
        _, cap = self.inner.read(payload)
        return (payload, (cap + self.offset) * self.scale, ZERO)

    def children(self, sigma: str, payload):
        src, n_here, f_here = payload
        src0, src1 = self.inner.children(sigma, src)
        _, cap = self.inner.read(src)
        active = n_here - f_here
        out = []
        for branch in (src0, src1):
            mass_b, cap_b = self.inner.read(branch)
            if mass_b == 0:
                out.append((branch, ZERO, ZERO))
            elif active == 0:
                out.append((branch, f_here, f_here))
            else:
                n_b = f_here + ((cap_b + self.offset) / (cap + self.offset)) * active
                f_b = max(f_here, n_b - 1)
                out.append((branch, n_b, f_b))
        return tuple(out)

    def read(self, payload):
        src, n_here, _ = payload
        mass, _ = self.inner.read(src)
        return (mass, None) if mass == 0 else (mass, n_here)


class CapitalFnKernel:
    """Fallback walker querying the public capital function per node."""

    def __init__(self, mart):
        self.mart = mart

    def root(self):
        return ""

    def children(self, sigma: str, payload):
        return (sigma + "0", sigma + "1")

    def read(self, payload):
        return (self.mart.base.mass(payload), self.mart.capital(payload))


def from_measures(nu: Measure, mu: Measure, label=None) -> Martingale:
    """The quotient martingale capital(sigma) = nu(sigma)/mu(sigma)."""

    def capital(sigma: str) -> Optional[Fraction]:
        m = mu.mass(sigma)
        if m == 0:
            return None
        return nu.mass(sigma) / m

    source = getattr(nu, "derived_from_martingale", None)
    if source is not None and source.base is mu and source.kernel is not None:
        # nu is capital*mass for a martingale over the same base, so the
        # quotient's values coincide with that martingale's node for node
        kernel = source.kernel
    else:
        kernel = QuotientKernel(nu, mu)
    mart = Martingale(mu, capital, label or f"{nu.label}/{mu.label}", kernel=kernel)
    mart.quotient = (nu, mu)
    return mart


def table_martingale(base: Measure, entries, start=ONE, label="table") -> Martingale:
    """Martingale from an explicit finite capital table.

    Strings below the table inherit the deepest tabulated ancestor's value
    (constant continuation, which preserves fairness); the root defaults to
    the start capital when not tabulated.
    """
    table = {sigma: RAT(v) for sigma, v in dict(entries).items()}
    if "" not in table:
        table[""] = RAT(start)

    def capital(sigma: str) -> Optional[Fraction]:
        if base.is_null(sigma):
            return None
        for i in range(len(sigma), -1, -1):
            if sigma[:i] in table:
                return table[sigma[:i]]
        return RAT(start)

    return Martingale(base, capital, label)


def to_measure(mart: Martingale, label=None) -> Measure:
    """The measure nu with nu = capital * mass, extended through null cylinders.

    On a positive cylinder the value is forced to capital(sigma)*mu(sigma);
    when one child is null its mass is recovered from the sibling by
    additivity, and below a fully null node everything is squeezed to zero.
    """
    mu = mart.base
    kernel = mart.kernel or CapitalFnKernel(mart)
    payloads = {"": kernel.root()}

    def payload(sigma: str):
        got = payloads.get(sigma)
        if got is None:
            parent = sigma[:-1]
            p0, p1 = kernel.children(parent, payload(parent))
            payloads[parent + "0"] = p0
            payloads[parent + "1"] = p1
            got = payloads[sigma]
        return got

    memo: dict[str, Fraction] = {}

    def nu(sigma: str) -> Fraction:
        got = memo.get(sigma)
        if got is not None:
            return got
        m, cap = kernel.read(payload(sigma))
        if m > 0:
            value = cap * m
        elif sigma == "":
            value = ZERO
        else:
            parent, bit = sigma[:-1], sigma[-1]
            sibling = parent + ("1" if bit == "0" else "0")
            m_sib, cap_sib = kernel.read(payload(sibling))
            if m_sib > 0:
                value = nu(parent) - cap_sib * m_sib
            else:
                value = ZERO
        memo[sigma] = value
        return value

    out = from_masses(nu, label=label or f"measure({mart.label})", memoized=True)
    out.derived_from_martingale = mart
    return out


@dataclass
class SavingsPair:
    """A martingale with the savings property plus its savings floor."""

    total: Martingale
    savings: Callable[[str], Optional[Fraction]]
    shifted: bool
    scale: Fraction = ONE

    @property
    def base(self) -> Measure:
        return self.total.base


def savings_transform(mart: Martingale, shift: bool = True, normalize: bool = True) -> SavingsPair:
    """Split a martingale into active capital plus a nondecreasing savings floor.

    With shift=True (the default) the source capital is first replaced by
    capital+1 so the recursion never divides by zero; with normalize=True the
    result is scaled to start at 1, which is what makes the floor-to-total
    sandwich hold at the root as well.  Both knobs are recorded on the result
    so capital comparisons stay interpretable.
    """
    mu = mart.base
    offset = 1 if shift else 0
    start = mart.capital("") + offset
    if normalize and start == 0:
        raise PreconditionError("cannot normalize a martingale with zero start capital")
    scale = 1 / start if normalize else ONE
    memo: dict[str, tuple[Optional[Fraction], Optional[Fraction]]] = {}

    def source(sigma: str) -> Optional[Fraction]:
        c = mart.capital(sigma)
        if c is None:
            return None
        return c + offset

    def pair(sigma: str) -> tuple[Optional[Fraction], Optional[Fraction]]:
        got = memo.get(sigma)
        if got is not None:
            return got
        if mu.is_null(sigma):
            value = (None, None)
        elif sigma == "":
            value = (source("") * scale, ZERO)
        else:
            n_parent, f_parent = pair(sigma[:-1])
            active = n_parent - f_parent
            if active == 0:
                n_here = f_parent
            else:
                num, den = source(sigma), source(sigma[:-1])
                n_here = f_parent + (num / den) * active
            value = (n_here, max(f_parent, n_here - 1))
        memo[sigma] = value
        return value

    kernel = SavingsKernel(mart.kernel or CapitalFnKernel(mart), shift, scale)
    total = Martingale(mu, lambda sigma: pair(sigma)[0], label=f"savings({mart.label})", kernel=kernel)
    return SavingsPair(total=total, savings=lambda sigma: pair(sigma)[1], shifted=shift, scale=scale)


@dataclass
class CapitalTrace:
    """Capital along the prefixes of a finite string."""

    prefix: str
    values: list
    hit_null_at: Optional[int] = None

    @property
    def max_attained(self) -> Fraction:
        return max(self.values)

    @property
    def final(self) -> Fraction:
        return self.values[-1]

    @property
    def not_random_by_nullity(self) -> bool:
        return self.hit_null_at is not None


def run(mart: Martingale, x: str) -> CapitalTrace:
    """Capital after each bit of x; stops early when a prefix goes null."""
    values = []
    for n in range(len(x) + 1):
        c = mart.capital(x[:n])
        if c is None:
            return CapitalTrace(prefix=x, values=values, hit_null_at=n)
        values.append(c)
    return CapitalTrace(prefix=x, values=values)


def check_fairness(mart: Martingale, depth: int) -> AuditReport:
    """Exact fairness at every string of length < depth, plus the
    null-iff-undefined correspondence at every string it touches.

    Library-built martingales carry a fused tree kernel that produces the
    same values as the public capital function; hand-built ones are walked
    through capital() directly.
    """
    kernel = mart.kernel or CapitalFnKernel(mart)
    report = AuditReport()

    def visit(sigma: str, payload):
        """Returns capital*mass (with the "undefined * 0 = 0" convention)."""
        m, c = kernel.read(payload)
        if c is None and m != 0:
            report.add(f"capital undefined on positive cylinder {sigma!r}")
        elif c is not None and m == 0:
            report.add(f"capital defined on null cylinder {sigma!r}: {c}")
        elif c is not None and c < 0:
            report.add(f"negative capital at {sigma!r}: {c}")
        term = ZERO if (c is None or m == 0) else c * m
        if len(sigma) < depth:
            report.checked += 1
            p0, p1 = kernel.children(sigma, payload)
            lhs = visit(sigma + "0", p0) + visit(sigma + "1", p1)
            if m > 0 and lhs != term:
                report.add(f"fairness fails at {sigma!r}: {lhs} != {term}")
        return term

    if depth > 0:
        visit("", kernel.root())
    return report


@dataclass
class VilleReport:
    """Exhaustive hitting-mass audit against the capital(eps)/c bound."""

    n: int
    threshold: Fraction
    fraction: Fraction
    bound: Fraction
    passed: bool


def ville_audit(mart: Martingale, n: int, c, thresholds=None) -> VilleReport | list[VilleReport]:
    """Exact mass of {x of length n : some prefix capital >= c} vs capital("")/c.

    Enumerates the full depth-n tree once; pass several thresholds to audit
    them in the same sweep (a list is returned in that case).  Null subtrees
    carry no mass and are skipped.
    """
    check_enumeration_depth(n)
    many = thresholds is not None
    cs = [RAT(q) for q in (thresholds if many else [c])]
    hit_mass = {q: ZERO for q in cs}
    kernel = mart.kernel or CapitalFnKernel(mart)

    def walk(sigma: str, payload, running_max):
        m, cap = kernel.read(payload)
        if m == 0:
            return
        running_max = cap if running_max is None else max(running_max, cap)
        if len(sigma) == n:
            for q in cs:
                if running_max >= q:
                    hit_mass[q] += m
            return
        p0, p1 = kernel.children(sigma, payload)
        walk(sigma + "0", p0, running_max)
        walk(sigma + "1", p1, running_max)

    walk("", kernel.root(), None)
    start = mart.capital("")
    reports = [
        VilleReport(n=n, threshold=q, fraction=hit_mass[q], bound=start / q, passed=hit_mass[q] <= start / q)
        for q in cs
    ]
    return reports if many else reports[0]


def ville_monte_carlo(mart: Martingale, n: int, c, samples: int, seed: int = 0):
    """Sampled estimate of the hitting fraction for depths past the exhaustive
    cap.  Statistical, not exact: returns (estimate, bound) as floats."""
    import random as _random

    rng = _random.Random(seed)
    threshold = RAT(c)
    mu = mart.base
    hits = 0
    for _ in range(samples):
        sigma = ""
        best = mart.capital("")
        for _step in range(n):
            s = mu.split(sigma)
            sigma += "1" if rng.random() < float(s) else "0"
            cap = mart.capital(sigma)
            if cap is None:
                break
            if cap > best:
                best = cap
        if best >= threshold:
            hits += 1
    return hits / samples, float(mart.capital("") / threshold)
