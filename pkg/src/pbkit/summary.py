from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Optional

from pbkit.model import PbInstance, dsum


@dataclass(frozen=True)
class InstanceSummary:
    """Headline facts about an instance. Counts come from the sections
    themselves, not from the META claims."""

    description: str
    country: str
    unit: str
    instance: str
    vote_type: str
    rule: str
    num_projects: int
    num_votes: int
    budget: Decimal
    total_project_cost: Decimal
    min_vote_length: Optional[Decimal]
    max_vote_length: Optional[Decimal]
    mean_vote_length: Optional[Decimal]
    category_counts: dict

    def to_dict(self) -> dict:
        def num(d):
            return None if d is None else format(d, "f")

        return {
            "description": self.description,
            "country": self.country,
            "unit": self.unit,
            "instance": self.instance,
            "vote_type": self.vote_type,
            "rule": self.rule,
            "num_projects": self.num_projects,
            "num_votes": self.num_votes,
            "budget": num(self.budget),
            "total_project_cost": num(self.total_project_cost),
            "min_vote_length": num(self.min_vote_length),
            "max_vote_length": num(self.max_vote_length),
            "mean_vote_length": num(self.mean_vote_length),
            "category_counts": dict(self.category_counts),
        }

    def to_text(self) -> str:
        d = self.to_dict()
        cats = d.pop("category_counts")
        width = max(len(k) for k in d)
        lines = [f"{k.ljust(width)}  {'-' if v is None else v}" for k, v in d.items()]
        if cats:
            lines.append("categories:")
            lines += [f"  {name}: {count}" for name, count in cats.items()]
        return "\n".join(lines) + "\n"


def summarize(instance: PbInstance) -> InstanceSummary:
    meta = instance.meta
    lengths = [len(v.vote) for v in instance.votes]
    mean = None
    if lengths:
        mean = (Decimal(sum(lengths)) / Decimal(len(lengths))).quantize(Decimal("0.0001"), ROUND_HALF_EVEN)
    cats = Counter()
    for p in instance.projects:
        for label in p.category or ():
            cats[label] += 1
    return InstanceSummary(
        description=meta.description,
        country=meta.country,
        unit=meta.unit,
        instance=meta.instance,
        vote_type=str(meta.vote_type),
        rule=meta.rule,
        num_projects=len(instance.projects),
        num_votes=len(instance.votes),
        budget=meta.budget,
        total_project_cost=dsum(p.cost for p in instance.projects),
        min_vote_length=Decimal(min(lengths)) if lengths else None,
        max_vote_length=Decimal(max(lengths)) if lengths else None,
        mean_vote_length=mean,
        category_counts=dict(sorted(cats.items(), key=lambda kv: (-kv[1], kv[0]))),
    )
