"""Finite p-group arithmetic via power-commutator presentations.

A presentation holds generators g_1..g_n with relative orders r_i = p^{e_i},
power relations g_i^{r_i} = w_i, and commutator relations [g_j, g_i] = w_ji
for j > i.  Tails are normal words over generators of index > i (the
conjugate g_j^{g_i} must live in the tail subgroup <g_{i+1}, ..., g_n>),
which also admits the classical two-generator presentations of D8, Q16 and
friends where a commutator tail reuses g_j itself.

Collection from the left with a work-stack rewrites arbitrary words to the
unique normal form g_1^{a_1} ... g_n^{a_n}, 0 <= a_i < r_i; the standard
triple- and power-overlap tests certify that a presentation is consistent,
i.e. the presented group has order exactly prod r_i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import prod

import numpy as np

from .abelian import AbelianGroup, snf, snf_group
from .cayley import CayleyTable

Word = tuple[tuple[int, int], ...]       # ((gen index, exponent), ...)
NormalWord = tuple[int, ...]             # exponent vector, 0 <= a_i < r_i

_COLLECT_GUARD = 50_000_000


class CollectionError(RuntimeError):
    pass


class InconsistentPresentation(ValueError):
    pass


class SizeCapError(ValueError):
    pass


def _is_p_power(n: int, p: int) -> bool:
    if n < p:
        return False
    while n % p == 0:
        n //= p
    return n == 1


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PcPresentation:
    p: int
    names: tuple[str, ...]
    orders: tuple[int, ...]
    powers: tuple[Word, ...]                      # tail of g_i^{r_i}
    comms: tuple[tuple[int, int, Word], ...]      # (j, i, tail of [g_j, g_i]), j > i
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        p = self.p
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        n = len(self.orders)
        if len(self.names) != n or len(self.powers) != n:
            raise ValueError("generator/order/power lists disagree")
        if len(set(self.names)) != n:
            raise ValueError("duplicate generator names")
        for i, r in enumerate(self.orders):
            if not _is_p_power(r, p):
                raise ValueError(f"relative order of {self.names[i]} is {r}, not a power of {p}")
            self._check_tail(self.powers[i], i, f"power relation of {self.names[i]}")
        seen = set()
        for j, i, tail in self.comms:
            if not (0 <= i < j < n):
                raise ValueError(f"bad commutator index pair ({j}, {i})")
            if (j, i) in seen:
                raise ValueError(f"duplicate commutator relation ({j}, {i})")
            seen.add((j, i))
            self._check_tail(tail, i, f"commutator [{self.names[j]},{self.names[i]}]")
        object.__setattr__(self, "_comm_map", {(j, i): tail for j, i, tail in self.comms})

    def _check_tail(self, tail: Word, lhs_min: int, what: str):
        prev = lhs_min
        for k, e in tail:
            if k <= lhs_min:
                raise ValueError(f"{what}: tail uses generator index {k} <= {lhs_min}")
            if k < prev:
                raise ValueError(f"{what}: tail not in normal form")
            if k == prev and prev != lhs_min:
                raise ValueError(f"{what}: repeated generator in tail")
            if not 0 < e < self.orders[k]:
                raise ValueError(f"{what}: exponent {e} out of range for {self.names[k]}")
            prev = k

    # -- basics -------------------------------------------------------------

    @property
    def ngens(self) -> int:
        return len(self.orders)

    @property
    def order_exponent(self) -> int:
        """n with |G| = p^n."""
        return sum(_valuation(r, self.p) for r in self.orders)

    def group_order(self) -> int:
        return prod(self.orders) if self.orders else 1

    @property
    def identity(self) -> NormalWord:
        return (0,) * self.ngens

    def gen(self, i: int) -> NormalWord:
        v = [0] * self.ngens
        v[i] = 1
        return tuple(v)

    def gen_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no generator named {name!r}") from None

    def comm_tail(self, j: int, i: int) -> Word:
        return self._comm_map.get((j, i), ())

    # -- collection ----------------------------------------------------------

    def collect(self, letters) -> NormalWord:
        """Normal form of a word (sequence of (gen index, exponent) letters)."""
        return self._collect_onto([0] * self.ngens, letters)

    def _collect_onto(self, a: list[int], letters) -> NormalWord:
        orders = self.orders
        powers = self.powers
        comm = self._comm_map
        n = len(a)
        stack = []
        for k, e in reversed(list(letters)):
            if not 0 <= k < n:
                raise CollectionError(f"letter references generator {k} of {n}")
            if e:
                stack.append((k, int(e)))
        top = n - 1
        while top >= 0 and a[top] == 0:
            top -= 1
        steps = 0
        while stack:
            steps += 1
            if steps > _COLLECT_GUARD:
                raise CollectionError("collection did not terminate (guard tripped)")
            i, e = stack.pop()
            if e == 0:
                continue
            if e < 0:
                # g^-1 = g^{r-1} * w^-1 with w the power tail of g
                if e < -1:
                    stack.append((i, e + 1))
                w = powers[i]
                for k, x in w:
                    stack.append((k, -x))
                stack.append((i, orders[i] - 1))
                continue
            if top <= i:
                a[i] += e
                r = orders[i]
                while a[i] >= r:
                    a[i] -= r
                    for k, x in reversed(powers[i]):
                        stack.append((k, x))
                if a[i] and i > top:
                    top = i
                while top >= 0 and a[top] == 0:
                    top -= 1
                continue
            # blocked: swap one unit of g_i past the trailing g_top
            a[top] -= 1
            j = top
            while top >= 0 and a[top] == 0:
                top -= 1
            if e > 1:
                stack.append((i, e - 1))
            for k, x in reversed(comm.get((j, i), ())):
                stack.append((k, x))
            stack.append((j, 1))
            stack.append((i, 1))
        return tuple(a)

    def word_of(self, v: NormalWord) -> Word:
        return tuple((i, e) for i, e in enumerate(v) if e)

    def mul(self, u: NormalWord, v: NormalWord) -> NormalWord:
        return self._collect_onto(list(u), self.word_of(v))

    def mul_gen(self, u: NormalWord, i: int, e: int = 1) -> NormalWord:
        return self._collect_onto(list(u), [(i, e)])

    def inv(self, u: NormalWord) -> NormalWord:
        return self.collect([(i, -e) for i, e in reversed(self.word_of(u))])

    def pow_el(self, u: NormalWord, k: int) -> NormalWord:
        if k < 0:
            return self.pow_el(self.inv(u), -k)
        acc = self.identity
        base = u
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    def conj(self, u: NormalWord, g: NormalWord) -> NormalWord:
        """u^g = g^-1 u g."""
        return self.mul(self.mul(self.inv(g), u), g)

    def comm_el(self, u: NormalWord, v: NormalWord) -> NormalWord:
        """[u, v] = u^-1 v^-1 u v."""
        return self.mul(self.mul(self.inv(u), self.inv(v)), self.mul(u, v))

    def element_order(self, u: NormalWord) -> int:
        o = 1
        while u != self.identity:
            u = self.pow_el(u, self.p)
            o *= self.p
        return o

    def elements(self):
        """All normal words in the fixed lexicographic enumeration."""
        return itertools.product(*[range(r) for r in self.orders])

    def element_rank(self, v: NormalWord) -> int:
        rank = 0
        for e, r in zip(v, self.orders):
            rank = rank * r + e
        return rank

    def commutes(self, u: NormalWord, v: NormalWord) -> bool:
        return self.mul(u, v) == self.mul(v, u)


# -- consistency -------------------------------------------------------------


@dataclass(frozen=True)
class OverlapFailure:
    kind: str
    gens: tuple[str, ...]
    lhs: NormalWord
    rhs: NormalWord

    def __str__(self):
        return (f"{self.kind} overlap on ({', '.join(self.gens)}): "
                f"{self.lhs} != {self.rhs}")


@dataclass(frozen=True)
class ConsistencyReport:
    ok: bool
    failure: OverlapFailure | None
    p: int
    order_exponent: int

    def __bool__(self):
        return self.ok


def check_consistency(pres: PcPresentation) -> ConsistencyReport:
    """Run the full triple/power overlap family; pass certifies |G| = prod r_i."""
    n = pres.ngens
    names = pres.names

    def fail(kind, idxs, lhs, rhs):
        return ConsistencyReport(False, OverlapFailure(kind, tuple(names[t] for t in idxs), lhs, rhs),
                                 pres.p, pres.order_exponent)

    g = [pres.gen(i) for i in range(n)]
    wv = [pres.collect(pres.powers[i]) for i in range(n)]  # power tails as vectors
    for k in range(n):
        for j in range(k):
            for i in range(j):
                lhs = pres.mul(pres.mul(g[k], g[j]), g[i])
                rhs = pres.mul(g[k], pres.mul(g[j], g[i]))
                if lhs != rhs:
                    return fail("triple", (k, j, i), lhs, rhs)
    for j in range(n):
        for i in range(j):
            lhs = pres.mul(wv[j], g[i])
            rhs = pres.mul(pres.pow_el(g[j], pres.orders[j] - 1), pres.mul(g[j], g[i]))
            if lhs != rhs:
                return fail("power-left", (j, i), lhs, rhs)
            lhs = pres.mul(g[j], wv[i])
            rhs = pres.mul(pres.mul(g[j], g[i]), pres.pow_el(g[i], pres.orders[i] - 1))
            if lhs != rhs:
                return fail("power-right", (j, i), lhs, rhs)
    for i in range(n):
        lhs = pres.mul(g[i], wv[i])
        rhs = pres.mul(wv[i], g[i])
        if lhs != rhs:
            return fail("power-cycle", (i,), lhs, rhs)
    return ConsistencyReport(True, None, pres.p, pres.order_exponent)


# -- subgroups ----------------------------------------------------------------


def _lead(v: NormalWord) -> int:
    for i, e in enumerate(v):
        if e:
            return i
    return -1


class Subgroup:
    """Subgroup of a pc group, held as an induced echelon generating sequence.

    Leading generator indices strictly increase and each leading exponent is
    normalized to a power of p, so membership tests reduce to sifting and the
    order is the product of the induced relative orders.
    """

    def __init__(self, pres: PcPresentation, igs: dict[int, NormalWord]):
        self.pres = pres
        self.igs = dict(sorted(igs.items()))

    # construction

    @classmethod
    def trivial(cls, pres: PcPresentation) -> "Subgroup":
        return cls(pres, {})

    @classmethod
    def whole(cls, pres: PcPresentation) -> "Subgroup":
        return cls.generate(pres, [pres.gen(i) for i in range(pres.ngens)])

    @classmethod
    def generate(cls, pres: PcPresentation, gens, normal: bool = False) -> "Subgroup":
        p = pres.p
        igs: dict[int, NormalWord] = {}

        def normalize(x: NormalWord) -> NormalWord:
            l = _lead(x)
            r = pres.orders[l]
            c = x[l]
            v = _valuation(c, p)
            unit = c // (p ** v)
            if unit != 1:
                t = pow(unit, -1, r)
                x = pres.pow_el(x, t)
            return x

        queue = [tuple(x) for x in gens]
        added = []
        while queue:
            x = queue.pop()
            # sift x through the current echelon
            while x != pres.identity:
                l = _lead(x)
                u = igs.get(l)
                if u is None:
                    x = normalize(x)
                    igs[l] = x
                    added = [x]
                    break
                cu, cx = u[l], x[l]
                vu, vx = _valuation(cu, p), _valuation(cx, p)
                if vx >= vu:
                    t = (cx // (p ** vu))  # u leading entry is p^vu after normalization
                    x = pres.mul(pres.pow_el(u, -t), x)
                else:
                    x = normalize(x)
                    igs[l] = x
                    queue.append(u)
                    added = [x]
                    break
            else:
                continue
            for u in added:
                l = _lead(u)
                vu = _valuation(u[l], p)
                killer = pres.orders[l] // (p ** vu)
                queue.append(pres.pow_el(u, killer))
                for v in list(igs.values()):
                    if v is not u:
                        queue.append(pres.comm_el(u, v))
                if normal:
                    for i in range(pres.ngens):
                        queue.append(pres.conj(u, pres.gen(i)))
        return cls(pres, igs)

    # structure

    @property
    def order_exponent(self) -> int:
        p = self.pres.p
        return sum(_valuation(self.pres.orders[l], p) - _valuation(u[l], p)
                   for l, u in self.igs.items())

    def order(self) -> int:
        return self.pres.p ** self.order_exponent

    def contains(self, x: NormalWord) -> bool:
        p = self.pres.p
        x = tuple(x)
        while x != self.pres.identity:
            l = _lead(x)
            u = self.igs.get(l)
            if u is None:
                return False
            vu = _valuation(u[l], p)
            if x[l] % (p ** vu):
                return False
            x = self.pres.mul(self.pres.pow_el(u, -(x[l] // (p ** vu))), x)
        return True

    def elements(self):
        pres = self.pres
        p = pres.p
        gens = list(self.igs.items())
        rel = [pres.orders[l] // (p ** _valuation(u[l], p)) for l, u in gens]

        # triangular products u_1^{e_1} ... u_m^{e_m} enumerate each element once
        def rec(k, acc):
            if k == len(gens):
                yield acc
                return
            _, u = gens[k]
            cur = acc
            for e in range(rel[k]):
                yield from rec(k + 1, cur)
                if e + 1 < rel[k]:
                    cur = pres.mul(cur, u)

        return rec(0, pres.identity)

    def is_central(self) -> bool:
        pres = self.pres
        return all(pres.commutes(u, pres.gen(i))
                   for u in self.igs.values() for i in range(pres.ngens))

    def is_abelian(self) -> bool:
        us = list(self.igs.values())
        return all(self.pres.commutes(a, b)
                   for i, a in enumerate(us) for b in us[i + 1:])

    def abelian_invariants(self) -> AbelianGroup:
        """Invariant factors of an abelian subgroup, by counting element orders."""
        if not self.is_abelian():
            raise ValueError("subgroup is not abelian")
        p = self.pres.p
        counts: dict[int, int] = {}
        for x in self.elements():
            o = _valuation(self.pres.element_order(x), p)
            counts[o] = counts.get(o, 0) + 1
        return _invariants_from_order_counts(counts, p)

    def intersection(self, other: "Subgroup") -> "Subgroup":
        a, b = (self, other) if self.order_exponent <= other.order_exponent else (other, self)
        els = [x for x in a.elements() if b.contains(x)]
        return Subgroup.generate(self.pres, els)

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return (self.order_exponent == other.order_exponent
                and all(other.contains(u) for u in self.igs.values()))

    def __repr__(self):
        gens = ",".join(str(u) for u in self.igs.values())
        return f"Subgroup(order={self.pres.p}^{self.order_exponent}, igs=[{gens}])"


def _invariants_from_order_counts(counts: dict[int, int], p: int) -> AbelianGroup:
    """Recover abelian p-group invariants from #elements of each order p^j.

    With invariants p^{e_1}, ..., p^{e_k}, the count of elements of order
    dividing p^j is p^{sum_i min(j, e_i)}; the increments of that profile
    give the number of e_i >= j, i.e. the transposed partition.
    """
    jmax = max(counts) if counts else 0
    exps = []  # exps[j-1] = number of invariants >= p^j
    prev_log = 0
    for j in range(1, jmax + 1):
        running_count = sum(c for o, c in counts.items() if o <= j)
        log = _valuation(running_count, p)
        exps.append(log - prev_log)
        prev_log = log
    out = []
    for j in range(len(exps), 0, -1):
        need = exps[j - 1] - (exps[j] if j < len(exps) else 0)
        out.extend([j] * need)
    return AbelianGroup.from_primary({p: out}) if out else AbelianGroup.trivial()


# -- derived / central series, quotients, products ----------------------------


def derived_subgroup(pres: PcPresentation) -> Subgroup:
    gens = [pres.comm_el(pres.gen(j), pres.gen(i))
            for j in range(pres.ngens) for i in range(j)]
    gens = [g for g in gens if g != pres.identity]
    return Subgroup.generate(pres, gens, normal=True)


def center(pres: PcPresentation) -> Subgroup:
    gens = [pres.gen(i) for i in range(pres.ngens)]
    candidates = None
    for g in gens:
        stream = candidates if candidates is not None else pres.elements()
        candidates = [x for x in stream if pres.commutes(tuple(x), g)]
    if candidates is None:
        candidates = []
    return Subgroup.generate(pres, [x for x in candidates if x != pres.identity])


def lower_central_series(pres: PcPresentation) -> list[Subgroup]:
    """gamma_1 = G >= gamma_2 >= ... down to (and including) the trivial term."""
    series = [Subgroup.whole(pres)]
    gens = [pres.gen(i) for i in range(pres.ngens)]
    current = derived_subgroup(pres)
    series.append(current)
    while current.order_exponent > 0:
        nxt = [pres.comm_el(u, g) for u in current.igs.values() for g in gens]
        nxt = [x for x in nxt if x != pres.identity]
        current = Subgroup.generate(pres, nxt, normal=True)
        series.append(current)
    return series


def upper_central_series(pres: PcPresentation) -> list[Subgroup]:
    """1 = Z_0 <= Z_1 <= ... terminating at Z_c = G."""
    series = [Subgroup.trivial(pres)]
    quotient = pres
    indices = list(range(pres.ngens))  # ambient index of each quotient generator
    while True:
        zq = center(quotient)
        if series[-1].order_exponent + zq.order_exponent > pres.order_exponent:
            raise InconsistentPresentation("upper central series overflow")
        lifts = []
        for u in zq.igs.values():
            w = [0] * pres.ngens
            for t, e in enumerate(u):
                w[indices[t]] = e
            lifts.append(tuple(w))
        z_next = Subgroup.generate(pres, lifts + list(series[-1].igs.values()))
        if z_next.order_exponent == series[-1].order_exponent:
            if z_next.order_exponent != pres.order_exponent:
                raise InconsistentPresentation("upper central series stalled")
            break
        series.append(z_next)
        if z_next.order_exponent == pres.order_exponent:
            break
        quotient, qindices = _central_quotient_map(quotient, zq)
        indices = [indices[t] for t in qindices]
    return series


def _central_quotient_map(pres: PcPresentation, K: Subgroup) -> tuple[PcPresentation, list[int]]:
    """Quotient presentation of G/K for central K, plus surviving-index map."""
    if K.pres != pres:
        raise ValueError("subgroup belongs to a different presentation")
    if not K.is_central():
        raise ValueError("subgroup is not central")
    p = pres.p
    lead_pow = {l: p ** _valuation(u[l], p) for l, u in K.igs.items()}

    def reduce_mod_k(x: NormalWord) -> NormalWord:
        for l in sorted(K.igs):
            q = x[l] // lead_pow[l]
            if q:
                x = pres.mul(pres.pow_el(K.igs[l], -q), x)
        return x

    new_orders = []
    survivors = []
    for i, r in enumerate(pres.orders):
        nr = lead_pow.get(i, r)
        if nr > 1:
            survivors.append(i)
            new_orders.append(nr)
    pos = {i: t for t, i in enumerate(survivors)}

    def project(x: NormalWord) -> Word:
        x = reduce_mod_k(x)
        return tuple((pos[i], x[i]) for i in survivors if x[i])

    new_powers = []
    for t, i in enumerate(survivors):
        y = pres.pow_el(pres.gen(i), new_orders[t])
        new_powers.append(project(y))
    new_comms = []
    for tj, j in enumerate(survivors):
        for ti, i in enumerate(survivors):
            if i >= j:
                continue
            tail = project(pres.comm_el(pres.gen(j), pres.gen(i)))
            if tail:
                new_comms.append((tj, ti, tail))
    q = PcPresentation(
        p=p,
        names=tuple(pres.names[i] for i in survivors),
        orders=tuple(new_orders),
        powers=tuple(new_powers),
        comms=tuple(new_comms),
        name=f"{pres.name}/K" if pres.name else None,
    )
    if q.order_exponent != pres.order_exponent - K.order_exponent:
        raise InconsistentPresentation("central quotient has wrong order")
    rep = check_consistency(q)
    if not rep.ok:
        raise InconsistentPresentation(f"central quotient inconsistent: {rep.failure}")
    return q, survivors


def central_quotient(pres: PcPresentation, K: Subgroup) -> PcPresentation:
    return _central_quotient_map(pres, K)[0]


def direct_product(a: PcPresentation, b: PcPresentation) -> PcPresentation:
    if a.p != b.p:
        raise ValueError(f"mismatched primes {a.p} and {b.p}")
    na = a.ngens
    names = list(a.names)
    for nm in b.names:
        while nm in names:
            nm = nm + "'"
        names.append(nm)
    shift = lambda w: tuple((k + na, e) for k, e in w)
    comms = list(a.comms) + [(j + na, i + na, shift(t)) for j, i, t in b.comms]
    return PcPresentation(
        p=a.p,
        names=tuple(names),
        orders=a.orders + b.orders,
        powers=a.powers + tuple(shift(w) for w in b.powers),
        comms=tuple(comms),
        name=f"{a.name} x {b.name}" if a.name and b.name else None,
    )


# -- abelianization ------------------------------------------------------------


def abelianization(pres: PcPresentation) -> AbelianGroup:
    """Invariant factors of G/G' from the SNF of the relation matrix."""
    n = pres.ngens
    if n == 0:
        return AbelianGroup.trivial()
    rows = []
    for i in range(n):
        row = [0] * n
        row[i] = pres.orders[i]
        for k, e in pres.powers[i]:
            row[k] -= e
        rows.append(row)
    for j, i, tail in pres.comms:
        row = [0] * n
        for k, e in tail:
            row[k] += e
        rows.append(row)
    return snf_group(rows)


def abelian_quotient_invariants(pres: PcPresentation, extra) -> AbelianGroup:
    """Invariants of G/(G' <extra>) -- the abelianization with extra images killed."""
    n = pres.ngens
    rows = []
    for i in range(n):
        row = [0] * n
        row[i] = pres.orders[i]
        for k, e in pres.powers[i]:
            row[k] -= e
        rows.append(row)
    for j, i, tail in pres.comms:
        rows.append([dict(tail).get(k, 0) for k in range(n)])
    for x in extra:
        rows.append(list(x))
    return snf_group(rows)


# -- structure report ----------------------------------------------------------


@dataclass
class StructureReport:
    pres: PcPresentation
    order_exponent: int
    nilpotency_class: int
    derived: Subgroup
    center: Subgroup
    lower_central: list[Subgroup]
    upper_central: list[Subgroup]
    center_exponent: int
    _exponent: int | None = None

    @property
    def exponent(self) -> int:
        if self._exponent is None:
            pres = self.pres
            self._exponent = max((pres.element_order(tuple(x)) for x in pres.elements()),
                                 default=1)
        return self._exponent

    def quotient_is_elementary(self) -> bool:
        return abelianization(self.pres).is_elementary(self.pres.p)

    def derived_is_elementary(self) -> bool:
        return (self.derived.order_exponent == 0
                or self.derived.abelian_invariants().is_elementary(self.pres.p))


@lru_cache(maxsize=None)
def structure_report(pres: PcPresentation) -> StructureReport:
    rep = check_consistency(pres)
    if not rep.ok:
        raise InconsistentPresentation(str(rep.failure))
    lower = lower_central_series(pres)
    upper = upper_central_series(pres)
    # lower = [gamma_1, ..., gamma_{c+1} = 1], so the class is len - 1
    c = len(lower) - 1 if pres.order_exponent else 0
    cls_upper = len(upper) - 1
    if pres.order_exponent and c != cls_upper:
        raise InconsistentPresentation(
            f"series disagree on nilpotency class: {c} vs {cls_upper}")
    z = upper[1] if len(upper) > 1 else Subgroup.trivial(pres)
    zexp = z.abelian_invariants().exponent() if z.order_exponent else 1
    return StructureReport(
        pres=pres,
        order_exponent=pres.order_exponent,
        nilpotency_class=c,
        derived=lower[1],
        center=z,
        lower_central=lower,
        upper_central=upper,
        center_exponent=zexp,
    )


# -- Cayley tables and isomorphism witnesses -----------------------------------


def cayley_table(pres: PcPresentation, cap: int = 128) -> CayleyTable:
    n = pres.group_order()
    if n > cap:
        raise SizeCapError(f"group order {n} exceeds the Cayley table cap {cap}")
    rep = check_consistency(pres)
    if not rep.ok:
        raise InconsistentPresentation(str(rep.failure))
    words = list(pres.elements())
    index = {w: k for k, w in enumerate(words)}
    table = np.zeros((n, n), dtype=np.int32)
    for i, u in enumerate(words):
        for j, v in enumerate(words):
            table[i, j] = index[pres.mul(u, v)]
    return CayleyTable(table)


def iso_witness_check(src: PcPresentation, dst: PcPresentation,
                      images: list[NormalWord]) -> bool:
    """True iff the generator images satisfy src's relations in dst and
    generate all of dst.  Size mismatch is an error, not a False."""
    if len(images) != src.ngens:
        raise ValueError(f"need {src.ngens} images, got {len(images)}")
    if src.p != dst.p or src.order_exponent != dst.order_exponent:
        raise ValueError(
            f"size mismatch: |src| = {src.p}^{src.order_exponent}, "
            f"|dst| = {dst.p}^{dst.order_exponent}")
    images = [tuple(x) for x in images]

    def img(word: Word) -> NormalWord:
        acc = dst.identity
        for k, e in word:
            acc = dst.mul(acc, dst.pow_el(images[k], e))
        return acc

    for i in range(src.ngens):
        if dst.pow_el(images[i], src.orders[i]) != img(src.powers[i]):
            return False
    for j in range(src.ngens):
        for i in range(j):
            if dst.comm_el(images[j], images[i]) != img(src.comm_tail(j, i)):
                return False
    gen = Subgroup.generate(dst, [x for x in images if x != dst.identity])
    return gen.order_exponent == dst.order_exponent
