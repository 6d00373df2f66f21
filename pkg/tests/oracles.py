"""Deliberately naive reference computations, written independently of
pbkit.rules, used to cross-check it."""

from decimal import Decimal


def naive_scores(instance):
    vt = str(instance.meta.vote_type)
    m = len(instance.projects)
    scores = {}
    for project in instance.projects:
        pid = project.project_id
        total = Decimal(0)
        for vote in instance.votes:
            if vt == "approval":
                if pid in vote.vote:
                    total += 1
            elif vt == "ordinal":
                for k in range(1, len(vote.vote) + 1):
                    w = m - k
                    if vote.vote[k - 1] == pid:
                        total += w
            else:
                listed = False
                for j in range(len(vote.vote)):
                    if vote.vote[j] == pid:
                        total += vote.points[j]
                        listed = True
                if not listed and vt == "scoring":
                    total += instance.meta.default_score
        scores[pid] = total
    return scores


def _id_key(pid):
    if pid.isdigit():
        return (0, int(pid), pid)
    return (1, 0, pid)


def naive_greedy_funded(instance):
    """Literal sort-and-scan, skipping projects that no longer fit."""
    scores = naive_scores(instance)
    order = sorted(instance.projects, key=lambda p: (-scores[p.project_id], _id_key(p.project_id)))
    left = instance.meta.budget
    funded = []
    for p in order:
        if p.cost <= left:
            funded.append(p.project_id)
            left = left - p.cost
    return funded
