"""Method selection and orchestration for multiplier computations.

`auto` prefers the direct-product identity (for catalog product recipes),
then the class-2 tensor construction, then the abelian exterior square,
then the cohomology oracle.  When more than one method applies, all of them
run and their invariant lists must agree exactly; the oracle joins such
cross-checks only up to order 81 so that large product entries stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abelian import exterior_square, kunneth
from .blackburn_evens import BePreconditionError, multiplier_via_be
from .entries import Catalog, CatalogEntry
from .oracle import multiplier_via_oracle, oracle_cap
from .pcgroup import PcPresentation, abelianization
from .results import (
    METHOD_ABELIAN,
    METHOD_BE,
    METHOD_KUNNETH,
    METHOD_LEDGER,
    METHOD_ORACLE,
    MultiplierResult,
)

ORACLE_CROSS_CAP = 81  # largest order at which the oracle runs as a cross-check

ASSUMED_MARK = "assumed:"


class NoApplicableMethod(RuntimeError):
    def __init__(self, reasons: dict[str, str]):
        self.reasons = dict(reasons)
        lines = "; ".join(f"{m}: {r}" for m, r in reasons.items())
        super().__init__(f"no applicable method ({lines})")


class CrossMethodDisagreement(RuntimeError):
    pass


def compute_t(pres: PcPresentation, mult: MultiplierResult) -> int:
    """t = n(n-1)/2 - log_p |M(G)| for |G| = p^n."""
    n = pres.order_exponent
    return n * (n - 1) // 2 - mult.order_exponent


@dataclass
class Computer:
    """Multiplier computation bound to a catalog (for product recipes)."""

    catalog: Catalog

    # -- single-method routes ------------------------------------------------

    def via_kunneth(self, entry: CatalogEntry, p: int) -> MultiplierResult:
        recipe = self.catalog.resolve_recipe(entry.entry_id)
        if not recipe.is_product:
            raise ValueError(f"{entry.entry_id} is not a product recipe")
        trace: list[str] = []
        total = None
        total_ab = None
        for fid in recipe.factors:
            fpres = self.catalog.instantiate(fid, p)
            fres = self.factor_multiplier(fid, fpres, p)
            trace.extend(fres.trace)
            fab = abelianization(fpres)
            if total is None:
                total, total_ab = fres.invariants, fab
            else:
                total = kunneth(total, fres.invariants, total_ab, fab)
                from .abelian import direct_sum
                total_ab = direct_sum(total_ab, fab)
        trace.append(f"kunneth: factors {list(recipe.factors)} -> {total.render()}")
        return MultiplierResult(p, total, METHOD_KUNNETH, trace=tuple(trace))

    def factor_multiplier(self, fid: str, fpres: PcPresentation, p: int) -> MultiplierResult:
        """Multiplier of a product factor; falls back to the entry's declared
        literature value (marked as assumed) when no method applies."""
        try:
            return self.compute(fid, p)
        except NoApplicableMethod:
            fentry = self.catalog[fid]
            if fentry.fallback_multiplier is None:
                raise
            tokens, citation = fentry.fallback_multiplier
            from .entries import Expect
            invs = Expect("multiplier", tokens, citation).multiplier_at(p)
            return MultiplierResult(
                p, invs, METHOD_LEDGER,
                trace=(f'{ASSUMED_MARK} M({fid}) = {invs.render()} "{citation}"',))

    # -- applicability ---------------------------------------------------------

    def applicable(self, pres: PcPresentation, entry: CatalogEntry | None):
        p = pres.p
        methods: list[str] = []
        reasons: dict[str, str] = {}
        if entry is not None and self.catalog.resolve_recipe(entry.entry_id).is_product:
            methods.append(METHOD_KUNNETH)
        else:
            reasons[METHOD_KUNNETH] = "not a catalog product recipe"
        try:
            from .blackburn_evens import build_be_data
            build_be_data(pres)
            methods.append(METHOD_BE)
        except BePreconditionError as exc:
            reasons[METHOD_BE] = exc.reason
        if not pres.comms:
            methods.append(METHOD_ABELIAN)
        else:
            reasons[METHOD_ABELIAN] = "group is nonabelian"
        cap = oracle_cap()
        n = pres.group_order()
        limit = cap if not methods else min(cap, ORACLE_CROSS_CAP)
        if n <= limit:
            methods.append(METHOD_ORACLE)
        else:
            reasons[METHOD_ORACLE] = (
                f"order {n} exceeds the oracle cap {cap}" if n > cap
                else f"order {n} exceeds the cross-check cap {ORACLE_CROSS_CAP}")
        return methods, reasons

    # -- public entry points -----------------------------------------------------

    def compute(self, target: str | PcPresentation, p: int | None = None,
                method: str = "auto") -> MultiplierResult:
        if isinstance(target, str):
            if p is None:
                raise ValueError("a prime is required with an entry id")
            entry = self.catalog[target]
            pres = self.catalog.instantiate(target, p)
        else:
            pres = target
            entry = None
            name = pres.name
            if name is not None and name in self.catalog.entries:
                entry = self.catalog[name]
        if method != "auto":
            return self._run(method, pres, entry)
        methods, reasons = self.applicable(pres, entry)
        if not methods:
            raise NoApplicableMethod(reasons)
        results = [self._run(m, pres, entry) for m in methods]
        first = results[0]
        for other in results[1:]:
            if other.invariants != first.invariants:
                raise CrossMethodDisagreement(
                    f"{pres.name or 'group'}: {first.method} gives "
                    f"{first.invariants.render()} but {other.method} gives "
                    f"{other.invariants.render()}")
        trace = list(first.trace)
        for other in results[1:]:
            trace.extend(other.trace)
        if len(results) > 1:
            trace.append(f"auto: methods {[r.method for r in results]} agree")
        return MultiplierResult(pres.p, first.invariants, first.method,
                                trace=tuple(trace))

    def _run(self, method: str, pres: PcPresentation,
             entry: CatalogEntry | None) -> MultiplierResult:
        if method == METHOD_KUNNETH:
            if entry is None:
                raise ValueError("kunneth needs a catalog product recipe")
            return self.via_kunneth(entry, pres.p)
        if method == METHOD_BE:
            return multiplier_via_be(pres)
        if method == METHOD_ABELIAN:
            invs = exterior_square(abelianization(pres))
            return MultiplierResult(pres.p, invs, METHOD_ABELIAN,
                                    trace=(f"abelian: exterior square -> {invs.render()}",))
        if method == METHOD_ORACLE:
            return multiplier_via_oracle(pres)
        raise ValueError(f"unknown method {method!r}")
