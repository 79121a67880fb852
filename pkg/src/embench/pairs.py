"""Labeled disease-pair lists used as ground truth for neighbourhood benchmarks."""

import csv
import warnings
from dataclasses import dataclass

RELATIONS = ("comorbid", "causal")

PAIRLIST_HEADER = ("code_a", "code_b", "source", "relation")


@dataclass(frozen=True)
class DiseasePair:
    """An unordered pair of disease codes, stored with code_a < code_b."""

    code_a: str
    code_b: str
    source: str
    relation: str

    def __post_init__(self):
        if self.code_a == self.code_b:
            raise ValueError(f"self-pair {self.code_a!r} is not a valid disease pair")
        if self.relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {self.relation!r}")
        if self.code_a > self.code_b:
            a, b = self.code_b, self.code_a
            object.__setattr__(self, "code_a", a)
            object.__setattr__(self, "code_b", b)

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.source, self.relation, self.code_a, self.code_b)


class PairList:
    """A deduplicated collection of DiseasePair records.

    Pairs are unordered; duplicates are keyed on (source, relation, pair) so a
    single source may contribute both a comorbid and a causal list.
    """

    def __init__(self, pairs):
        seen = set()
        kept = []
        for p in pairs:
            if p.key in seen:
                warnings.warn(f"duplicate pair {p.code_a}/{p.code_b} in source {p.source!r} collapsed")
                continue
            seen.add(p.key)
            kept.append(p)
        self.pairs = tuple(kept)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __eq__(self, other):
        return isinstance(other, PairList) and self.pairs == other.pairs

    def groups(self) -> list[tuple[str, str]]:
        """Distinct (source, relation) labels, in first-appearance order."""
        out = []
        for p in self.pairs:
            if (p.source, p.relation) not in out:
                out.append((p.source, p.relation))
        return out

    def subset(self, source: str, relation: str) -> "PairList":
        return PairList(p for p in self.pairs if p.source == source and p.relation == relation)


def load_pairlist(path) -> PairList:
    """Read a pair-list CSV with header code_a,code_b,source,relation."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty pair-list file") from None
        if tuple(header) != PAIRLIST_HEADER:
            raise ValueError(f"{path}: expected header {','.join(PAIRLIST_HEADER)}, got {','.join(header)}")
        pairs = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            a, b, source, relation = (field.strip() for field in row)
            if not a or not b or not source:
                raise ValueError(f"{path}:{lineno}: empty field")
            try:
                pairs.append(DiseasePair(a, b, source, relation))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return PairList(pairs)


def save_pairlist(pairlist: PairList, path) -> None:
    """Write a pair list as CSV; output bytes are deterministic."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(PAIRLIST_HEADER) + "\n")
        for p in pairlist:
            fh.write(f"{p.code_a},{p.code_b},{p.source},{p.relation}\n")
