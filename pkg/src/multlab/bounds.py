"""A fact ledger for multiplier orders, with derivation rules and replays.

Facts record what is known about |M(G)| for a named group: exact orders,
upper/lower bounds (as exponents of p), exact structures, and capability
witnesses.  Provenance is always one of Computed(method), Rule(name,
premises), or Assumed(citation); rules refuse to run without their premises
rather than assuming anything silently.  Strict inequalities are promoted
to the next p-power, which is what makes "p^3 < |M|" machine-usable as
">= p^4".

Replay scripts are small text programs (use / assume / apply / compute /
expect) that re-derive bound chains step by step and assert the declared
outcomes, failing loudly on the first divergent step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

from .abelian import AbelianGroup, exterior_square, tensor
from .pcgroup import (
    PcPresentation,
    Subgroup,
    abelian_quotient_invariants,
    abelianization,
    central_quotient,
    derived_subgroup,
    structure_report,
)
from .results import MultiplierResult

KIND_EXACT = "exact-order"
KIND_UPPER = "upper-bound"
KIND_LOWER = "lower-bound"
KIND_STRUCTURE = "exact-structure"
KIND_CAPABLE = "capability"

_KINDS = (KIND_EXACT, KIND_UPPER, KIND_LOWER, KIND_STRUCTURE, KIND_CAPABLE)


class LedgerError(ValueError):
    pass


class MissingPremiseError(LedgerError):
    pass


class ReplayAssertionError(LedgerError):
    def __init__(self, step_no: int, line: str, message: str):
        self.step_no = step_no
        self.line = line
        super().__init__(f"step {step_no} ({line!r}): {message}")


@dataclass(frozen=True)
class Provenance:
    tag: str                                # computed | rule | assumed
    detail: str = ""                        # method or rule name
    premises: tuple[int, ...] = ()
    citation: str | None = None

    @classmethod
    def computed(cls, method: str) -> "Provenance":
        return cls("computed", method)

    @classmethod
    def rule(cls, name: str, premises) -> "Provenance":
        return cls("rule", name, tuple(premises))

    @classmethod
    def assumed(cls, citation: str) -> "Provenance":
        return cls("assumed", citation=citation)


@dataclass(frozen=True)
class Fact:
    fact_id: int
    subject: str
    kind: str
    p: int
    exponent: int | None = None            # order facts: value is p^exponent
    structure: AbelianGroup | None = None
    provenance: Provenance = field(default_factory=lambda: Provenance("computed"))

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise LedgerError(f"unknown fact kind {self.kind!r}")
        if self.kind in (KIND_EXACT, KIND_UPPER, KIND_LOWER) and self.exponent is None:
            raise LedgerError(f"{self.kind} facts carry an exponent")
        if self.kind in (KIND_EXACT, KIND_STRUCTURE) and self.provenance.tag == "rule" \
                and not self.provenance.premises:
            raise LedgerError("rule-derived facts must list premises")

    def describe(self) -> str:
        prov = self.provenance
        if prov.tag == "assumed":
            src = f'assumed "{prov.citation}"'
        elif prov.tag == "rule":
            src = f"rule {prov.detail} <- {list(prov.premises)}"
        else:
            src = f"computed({prov.detail})"
        if self.kind == KIND_CAPABLE:
            val = "capable"
        elif self.kind == KIND_STRUCTURE:
            val = self.structure.render()
        else:
            val = f"p^{self.exponent}"
        return f"F{self.fact_id} {self.subject}: {self.kind} {val} [{src}]"


class Ledger:
    """Single-writer fact store with bound-consistency checks on every add."""

    def __init__(self):
        self.facts: list[Fact] = []
        self._by_subject: dict[str, list[Fact]] = {}

    def add(self, subject: str, kind: str, p: int, *, exponent: int | None = None,
            structure: AbelianGroup | None = None,
            provenance: Provenance) -> Fact:
        fact = Fact(len(self.facts), subject, kind, p,
                    exponent=exponent, structure=structure, provenance=provenance)
        for pid in provenance.premises:
            if not 0 <= pid < len(self.facts):
                raise LedgerError(f"premise F{pid} does not exist")
        self._validate(fact)
        self.facts.append(fact)
        self._by_subject.setdefault(subject, []).append(fact)
        return fact

    def _validate(self, fact: Fact):
        if fact.kind == KIND_CAPABLE:
            return
        subject_facts = self._by_subject.get(fact.subject, []) + [fact]
        uppers = [f.exponent for f in subject_facts if f.kind == KIND_UPPER]
        lowers = [f.exponent for f in subject_facts if f.kind == KIND_LOWER]
        exacts = [f.exponent for f in subject_facts if f.kind == KIND_EXACT]
        exacts += [f.structure.order_exponent(f.p) for f in subject_facts
                   if f.kind == KIND_STRUCTURE]
        lo = max(lowers, default=0)
        hi = min(uppers, default=None)
        if hi is not None and lo > hi:
            raise LedgerError(
                f"{fact.subject}: lower bound p^{lo} exceeds upper bound p^{hi}")
        for e in exacts:
            if e < lo or (hi is not None and e > hi):
                raise LedgerError(
                    f"{fact.subject}: exact order p^{e} escapes [p^{lo}, p^{hi}]")
        if len(set(exacts)) > 1:
            raise LedgerError(f"{fact.subject}: conflicting exact orders {exacts}")

    def for_subject(self, subject: str) -> list[Fact]:
        return list(self._by_subject.get(subject, []))

    def best_upper(self, subject: str) -> Fact | None:
        cands = [f for f in self.for_subject(subject) if f.kind == KIND_UPPER]
        return min(cands, key=lambda f: f.exponent) if cands else None

    def best_lower(self, subject: str) -> Fact | None:
        cands = [f for f in self.for_subject(subject) if f.kind == KIND_LOWER]
        return max(cands, key=lambda f: f.exponent) if cands else None

    def exact(self, subject: str) -> Fact | None:
        for f in self.for_subject(subject):
            if f.kind == KIND_EXACT:
                return f
        return None

    def capability(self, subject: str) -> Fact | None:
        for f in self.for_subject(subject):
            if f.kind == KIND_CAPABLE:
                return f
        return None

    def trace(self, fact: Fact) -> list[Fact]:
        """The fact and its premise closure, in derivation order."""
        seen: set[int] = set()
        out: list[Fact] = []

        def visit(f: Fact):
            if f.fact_id in seen:
                return
            seen.add(f.fact_id)
            for pid in f.provenance.premises:
                visit(self.facts[pid])
            out.append(f)

        visit(fact)
        return out


# -- rules ---------------------------------------------------------------------


def rule_green(ledger: Ledger, subject: str, p: int, n: int) -> Fact:
    """Upper bound p^{n(n-1)/2} for any group of order p^n."""
    if n < 0:
        raise LedgerError("order exponent must be nonnegative")
    return ledger.add(subject, KIND_UPPER, p, exponent=n * (n - 1) // 2,
                      provenance=Provenance.computed("green-bound"))


def _order_premise(premise: Fact | None, wanted: str, allowed=(KIND_EXACT, KIND_UPPER)):
    if premise is None:
        raise MissingPremiseError(f"need a fact for {wanted}")
    if premise.kind not in allowed:
        raise MissingPremiseError(
            f"premise for {wanted} must be one of {allowed}, got {premise.kind}")
    return premise.exponent


def rule_jones(ledger: Ledger, subject: str, pres: PcPresentation, K: Subgroup,
               premise: Fact | None) -> Fact:
    """|M(G)| <= |M(G/K)| |M(K)| |(G/K)^ab (x) K| / |G' cap K| for central K."""
    if not K.is_central():
        raise LedgerError("K is not central")
    p = pres.p
    e_mq = _order_premise(premise, "|M(G/K)|")
    k_inv = K.abelian_invariants()
    e_mk = exterior_square(k_inv).order_exponent(p)
    a_ab = abelian_quotient_invariants(pres, list(K.igs.values()))
    e_t = tensor(a_ab, k_inv).order_exponent(p)
    e_cap = derived_subgroup(pres).intersection(K).order_exponent
    exp = e_mq + e_mk + e_t - e_cap
    if exp < 0:
        raise LedgerError("divisibility bound went negative; premises inconsistent")
    return ledger.add(
        subject, KIND_UPPER, p, exponent=exp,
        provenance=Provenance.rule(
            f"jones[|M(A)|=p^{e_mq},|M(K)|=p^{e_mk},|A^ab(x)K|=p^{e_t},|G'^K|=p^{e_cap}]",
            (premise.fact_id,)))


def rule_class_bound(ledger: Ledger, subject: str, pres: PcPresentation,
                     premise: Fact | None) -> Fact:
    """|gamma_c| |M(G)| <= |M(G/gamma_c)| |(G/Z_{c-1})^ab (x) gamma_c| at class c >= 2."""
    st = structure_report(pres)
    c = st.nilpotency_class
    if c < 2:
        raise LedgerError(f"nilpotency class is {c}, rule needs >= 2")
    p = pres.p
    gamma_c = st.lower_central[c - 1]
    z_prev = st.upper_central[c - 1]
    e_mq = _order_premise(premise, "|M(G/gamma_c)|")
    g_inv = gamma_c.abelian_invariants()
    q_ab = abelian_quotient_invariants(pres, list(z_prev.igs.values()))
    e_t = tensor(q_ab, g_inv).order_exponent(p)
    exp = e_mq + e_t - gamma_c.order_exponent
    if exp < 0:
        raise LedgerError("class bound went negative; premises inconsistent")
    return ledger.add(subject, KIND_UPPER, p, exponent=exp,
                      provenance=Provenance.rule(
                          f"class_bound[c={c},|gamma_c|=p^{gamma_c.order_exponent}]",
                          (premise.fact_id,)))


def rule_extraspecial(ledger: Ledger, subject: str, pres: PcPresentation) -> Fact:
    """Exact |M| for verified extraspecial groups: p^{2n^2-n-1} for order
    p^{2n+1}, n >= 2, and the four classical n = 1 structures."""
    st = structure_report(pres)
    p = pres.p
    if not (st.derived.order_exponent == 1 and st.center.order_exponent == 1
            and st.derived == st.center
            and abelianization(pres).is_elementary(p)):
        raise LedgerError("group is not extraspecial")
    if pres.order_exponent % 2 == 0:
        raise LedgerError("extraspecial groups have odd order exponent")
    n = (pres.order_exponent - 1) // 2
    if n >= 2:
        exp = 2 * n * n - n - 1
        return ledger.add(subject, KIND_EXACT, p, exponent=exp,
                          provenance=Provenance.computed(f"extraspecial-formula[n={n}]"))
    if p == 2:
        involutions = sum(1 for x in pres.elements()
                          if pres.element_order(tuple(x)) == 2)
        structure = AbelianGroup.cyclic(2) if involutions > 1 else AbelianGroup.trivial()
    else:
        structure = (AbelianGroup.elementary(p, 2) if st.exponent == p
                     else AbelianGroup.trivial())
    ledger.add(subject, KIND_STRUCTURE, p, structure=structure,
               provenance=Provenance.computed("extraspecial-formula[n=1]"))
    return ledger.add(subject, KIND_EXACT, p, exponent=structure.order_exponent(p),
                      provenance=Provenance.computed("extraspecial-formula[n=1]"))


def rule_transgression_lower(ledger: Ledger, subject: str, pres: PcPresentation,
                             Z: Subgroup, capability: Fact | None,
                             premise: Fact | None) -> Fact:
    """For capable G and central Z: |M(G)| > |M(G/Z)| / |G' cap Z|, promoted
    to the next p-power, via the inflation-transgression five-term sequence."""
    if capability is None or capability.kind != KIND_CAPABLE:
        raise MissingPremiseError(
            "refusing to assume the transgression connecting map is nontrivial "
            "without a capability fact")
    if not Z.is_central():
        raise LedgerError("Z is not central")
    p = pres.p
    e_mq = _order_premise(premise, "|M(G/Z)|", allowed=(KIND_EXACT, KIND_LOWER))
    e_cap = derived_subgroup(pres).intersection(Z).order_exponent
    exp = e_mq - e_cap + 1
    return ledger.add(subject, KIND_LOWER, p, exponent=exp,
                      provenance=Provenance.rule(
                          f"transgression[|M(G/Z)|=p^{e_mq},|G'^Z|=p^{e_cap}]",
                          (capability.fact_id, premise.fact_id)))


def squeeze_exact(ledger: Ledger, subject: str, p: int) -> Fact | None:
    """Derive an exact order when the best bounds meet."""
    lo, hi = ledger.best_lower(subject), ledger.best_upper(subject)
    if lo is None or hi is None or lo.exponent != hi.exponent:
        return None
    return ledger.add(subject, KIND_EXACT, p, exponent=lo.exponent,
                      provenance=Provenance.rule("squeeze", (lo.fact_id, hi.fact_id)))


# -- script replay ---------------------------------------------------------------


class GroupResolver(Protocol):
    """What the replay runner needs from the catalog layer."""

    def load_group(self, group_id: str, p: int) -> PcPresentation: ...

    def multiplier(self, pres: PcPresentation) -> MultiplierResult: ...

    def entry_multiplier(self, group_id: str, p: int) -> MultiplierResult: ...


@dataclass
class ReplayResult:
    subject: str
    ledger: Ledger
    trace: list[str]
    assumed: list[Fact]

    def assumed_bounds(self) -> list[Fact]:
        """Assumed order facts (capability assumptions are gate conditions,
        tracked separately)."""
        return [f for f in self.assumed if f.kind != KIND_CAPABLE]

    def assumed_capabilities(self) -> list[Fact]:
        return [f for f in self.assumed if f.kind == KIND_CAPABLE]

    def final_exact(self) -> Fact | None:
        return self.ledger.exact(self.subject)


def _parse_power(token: str, p: int) -> int:
    token = token.strip()
    if token == "1":
        return 0
    if token.startswith("p^"):
        return int(token[2:])
    raise LedgerError(f"order values are written 1 or p^E, got {token!r}")


def _resolve_subgroup(pres: PcPresentation, spec: str) -> Subgroup:
    st = structure_report(pres)
    if spec == "center":
        return st.center
    if spec == "derived":
        return st.derived
    if spec.startswith("gamma"):
        idx = int(spec[5:])
        return st.lower_central[idx - 1]
    if spec.startswith("gens:"):
        names = spec[5:].split(",")
        return Subgroup.generate(pres, [pres.gen(pres.gen_index(n)) for n in names])
    raise LedgerError(f"unknown subgroup spec {spec!r}")


def replay_script(script: str, p: int, resolver: GroupResolver,
                  ledger: Ledger | None = None) -> ReplayResult:
    """Execute a bound-derivation script and assert its declared expectations."""
    ledger = ledger if ledger is not None else Ledger()
    subject: str | None = None
    pres: PcPresentation | None = None
    trace: list[str] = []
    assumed: list[Fact] = []

    def premise_for(quot_subject: str, quot_pres: PcPresentation) -> Fact:
        existing = ledger.exact(quot_subject)
        if existing is not None:
            return existing
        result = resolver.multiplier(quot_pres)
        fact = ledger.add(quot_subject, KIND_EXACT, p,
                          exponent=result.order_exponent,
                          provenance=Provenance.computed(result.method))
        trace.append(fact.describe())
        return fact

    for step_no, raw in enumerate(script.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        verb = parts[0]
        try:
            if verb == "use":
                subject = parts[1]
                pres = resolver.load_group(subject, p)
                trace.append(f"use {subject} at p={p} (order p^{pres.order_exponent})")
                continue
            if subject is None or pres is None:
                raise LedgerError("script must start with `use <group>`")
            if verb == "assume":
                kind_tok = parts[1]
                if kind_tok == "capable":
                    citation = line.split('"')[1]
                    fact = ledger.add(subject, KIND_CAPABLE, p,
                                      provenance=Provenance.assumed(citation))
                else:
                    kind = {"upper": KIND_UPPER, "lower": KIND_LOWER,
                            "exact": KIND_EXACT}[kind_tok]
                    citation = line.split('"')[1]
                    fact = ledger.add(subject, kind, p,
                                      exponent=_parse_power(parts[2], p),
                                      provenance=Provenance.assumed(citation))
                assumed.append(fact)
                trace.append(fact.describe())
            elif verb == "apply":
                rule = parts[1]
                args = dict(kv.split("=", 1) for kv in parts[2:])
                if rule == "green":
                    fact = rule_green(ledger, subject, p, pres.order_exponent)
                elif rule == "extraspecial":
                    fact = rule_extraspecial(ledger, subject, pres)
                elif rule == "jones":
                    K = _resolve_subgroup(pres, args["K"])
                    quot = central_quotient(pres, K)
                    prem = premise_for(f"{subject}/{args['K']}", quot)
                    fact = rule_jones(ledger, subject, pres, K, prem)
                elif rule == "class_bound":
                    st = structure_report(pres)
                    gamma_c = st.lower_central[st.nilpotency_class - 1]
                    quot = central_quotient(pres, gamma_c)
                    prem = premise_for(f"{subject}/gamma_c", quot)
                    fact = rule_class_bound(ledger, subject, pres, prem)
                elif rule == "transgression":
                    Z = _resolve_subgroup(pres, args["Z"])
                    quot = central_quotient(pres, Z)
                    prem = premise_for(f"{subject}/{args['Z']}", quot)
                    fact = rule_transgression_lower(
                        ledger, subject, pres, Z, ledger.capability(subject), prem)
                else:
                    raise LedgerError(f"unknown rule {rule!r}")
                trace.append(fact.describe())
            elif verb == "compute":
                result = resolver.entry_multiplier(subject, p)
                fact = ledger.add(subject, KIND_EXACT, p,
                                  exponent=result.order_exponent,
                                  provenance=Provenance.computed(result.method))
                trace.append(fact.describe())
            elif verb == "expect":
                kind_tok, value = parts[1], _parse_power(parts[2], p)
                if kind_tok == "upper":
                    best = ledger.best_upper(subject)
                    found = best.exponent if best else None
                elif kind_tok == "lower":
                    best = ledger.best_lower(subject)
                    found = best.exponent if best else None
                elif kind_tok == "exact":
                    if squeeze_exact(ledger, subject, p) is not None:
                        trace.append(ledger.facts[-1].describe())
                    exact = ledger.exact(subject)
                    found = exact.exponent if exact else None
                else:
                    raise LedgerError(f"unknown expectation {kind_tok!r}")
                if found != value:
                    raise ReplayAssertionError(
                        step_no, line,
                        f"expected {kind_tok} p^{value}, ledger has "
                        f"{'nothing' if found is None else f'p^{found}'}")
                trace.append(f"expect {kind_tok} p^{value}: OK")
            else:
                raise LedgerError(f"unknown verb {verb!r}")
        except ReplayAssertionError:
            raise
        except (LedgerError, KeyError, IndexError) as exc:
            raise ReplayAssertionError(step_no, line, str(exc)) from exc
    if subject is None:
        raise LedgerError("empty script")
    return ReplayResult(subject, ledger, trace, assumed)
