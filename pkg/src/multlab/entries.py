"""Catalog of group presentations: parsing, registry, and instantiation.

Entries live as one `.grp` file each under the packaged `catalog/` directory.
A file is either a direct presentation (DSL statements), a product recipe
(`product <id> <id> ...`), or an alias, plus header lines:

    name Phi2_211b
    constraint odd              # odd | two | any
    expect multiplier [p,p] "source"
    expect order p^9 "source"
    expect t 6 "source"
    fallback-multiplier [p,p] "citation"   # assumed value when no method applies
    squeeze phi7_15_squeeze.script         # bound-replay fallback
    disabled <reason>
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .abelian import AbelianGroup
from .dsl import DslError, _parse_scalar, load_presentation
from .pcgroup import PcPresentation, direct_product

CONSTRAINTS = ("odd", "two", "any")


class CatalogError(ValueError):
    pass


class ConstraintError(CatalogError):
    pass


@dataclass(frozen=True)
class Expect:
    kind: str                       # multiplier | order | t
    value: str                      # raw token(s); instantiated per prime
    source: str

    def multiplier_at(self, p: int) -> AbelianGroup:
        assert self.kind == "multiplier"
        inner = self.value.strip()[1:-1].strip()
        if not inner:
            return AbelianGroup.trivial()
        return AbelianGroup.from_orders(
            _parse_scalar(tok, p, 0) for tok in inner.split(","))

    def order_exponent_at(self, p: int) -> int:
        assert self.kind == "order"
        v = self.value.strip()
        if v == "1":
            return 0
        if v.startswith("p^"):
            return int(v[2:])
        raise CatalogError(f"order expectation must be 1 or p^E, got {v!r}")

    def t_value(self) -> int:
        assert self.kind == "t"
        return int(self.value)


@dataclass(frozen=True)
class CatalogEntry:
    entry_id: str
    constraint: str
    dsl_text: str | None = None
    factors: tuple[str, ...] = ()
    alias_of: str | None = None
    expects: tuple[Expect, ...] = ()
    fallback_multiplier: tuple[str, str] | None = None   # (tokens, citation)
    squeeze_script: str | None = None
    disabled_reason: str | None = None

    @property
    def is_product(self) -> bool:
        return bool(self.factors)

    @property
    def is_disabled(self) -> bool:
        return self.disabled_reason is not None

    def allows(self, p: int) -> bool:
        if self.constraint == "two":
            return p == 2
        if self.constraint == "odd":
            return p != 2
        return True


def _take_citation(line: str) -> tuple[str, str]:
    if '"' in line:
        head, _, rest = line.partition('"')
        return head.strip(), rest.rsplit('"', 1)[0]
    return line.strip(), ""


def parse_entry(text: str, fallback_name: str | None = None) -> CatalogEntry:
    name = fallback_name
    constraint = "any"
    expects: list[Expect] = []
    factors: list[str] = []
    alias_of = None
    fallback = None
    squeeze = None
    disabled = None
    dsl_lines: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw = line.split()[0]
        if kw == "name":
            name = line.split()[1]
        elif kw == "constraint":
            constraint = line.split()[1]
            if constraint not in CONSTRAINTS:
                raise CatalogError(f"unknown constraint {constraint!r}")
        elif kw == "expect":
            head, citation = _take_citation(line)
            parts = head.split(None, 2)
            if len(parts) < 3:
                raise CatalogError(f"malformed expect line: {line!r}")
            expects.append(Expect(parts[1], parts[2], citation))
        elif kw == "fallback-multiplier":
            head, citation = _take_citation(line)
            fallback = (head.split(None, 1)[1], citation)
        elif kw == "squeeze":
            squeeze = line.split()[1]
        elif kw == "product":
            factors = line.split()[1:]
        elif kw == "alias":
            alias_of = line.split()[1]
        elif kw == "disabled":
            disabled = line.split(None, 1)[1] if " " in line else "disabled"
        else:
            dsl_lines.append(raw)
    if name is None:
        raise CatalogError("entry has no name")
    modes = sum(1 for x in (factors, alias_of, dsl_lines) if x)
    if modes != 1 and disabled is None:
        raise CatalogError(f"{name}: entry must be exactly one of direct/product/alias")
    return CatalogEntry(
        entry_id=name,
        constraint=constraint,
        dsl_text="\n".join(dsl_lines) if dsl_lines else None,
        factors=tuple(factors),
        alias_of=alias_of,
        expects=tuple(expects),
        fallback_multiplier=fallback,
        squeeze_script=squeeze,
        disabled_reason=disabled,
    )


class Catalog:
    def __init__(self, entries: dict[str, CatalogEntry]):
        self.entries = entries
        self._cache: dict[tuple[str, int], PcPresentation] = {}

    @classmethod
    def bundled(cls) -> "Catalog":
        entries = {}
        root = resources.files("multlab") / "catalog"
        for item in sorted(root.iterdir(), key=lambda f: f.name):
            if item.name.endswith(".grp"):
                entry = parse_entry(item.read_text(), item.name[:-4])
                entries[entry.entry_id] = entry
        return cls(entries)

    def __getitem__(self, entry_id: str) -> CatalogEntry:
        try:
            return self.entries[entry_id]
        except KeyError:
            raise CatalogError(f"no catalog entry named {entry_id!r}") from None

    def ids(self) -> list[str]:
        return sorted(self.entries)

    def resolve_recipe(self, entry_id: str) -> CatalogEntry:
        """Follow alias links to the defining entry."""
        entry = self[entry_id]
        seen = {entry_id}
        while entry.alias_of:
            if entry.alias_of in seen:
                raise CatalogError(f"alias cycle at {entry_id}")
            seen.add(entry.alias_of)
            entry = self[entry.alias_of]
        return entry

    def instantiate(self, entry_id: str, p: int) -> PcPresentation:
        key = (entry_id, p)
        if key in self._cache:
            return self._cache[key]
        entry = self[entry_id]
        if entry.is_disabled:
            raise CatalogError(f"{entry_id} is disabled: {entry.disabled_reason}")
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ConstraintError(f"{p} is not prime")
        if not entry.allows(p):
            raise ConstraintError(
                f"{entry_id} requires a {entry.constraint} prime, got {p}")
        target = self.resolve_recipe(entry_id)
        if target.is_disabled:
            raise CatalogError(f"{entry_id} aliases disabled {target.entry_id}")
        if target.is_product:
            parts = [self.instantiate(fid, p) for fid in target.factors]
            pres = parts[0]
            for q in parts[1:]:
                pres = direct_product(pres, q)
            pres = PcPresentation(pres.p, pres.names, pres.orders, pres.powers,
                                  pres.comms, name=entry_id)
        else:
            try:
                pres = load_presentation(target.dsl_text, p, name=entry_id)
            except DslError as exc:
                raise CatalogError(f"{entry_id}: {exc}") from exc
        self._cache[key] = pres
        return pres


def load_group_dsl(text: str, p: int, name: str | None = None) -> PcPresentation:
    """Parse and instantiate a bare presentation text (consistency-checked)."""
    return load_presentation(text, p, name=name)
