#!/usr/bin/env python3
"""Writes the three evolution-pattern archetype stores (12 months each).

Every contributor is active in a single month only, so a contributor with
k commits has workforce exactly k and the monthly health value is set
directly by the commit counts. All PRs open and close in the same month,
so monthly wealth equals the PR count.

  steady_wealth.jsonl  health alternates 2 / 36, wealth constant 10
  both_changing.jsonl  health alternates 2 / 36, wealth alternates 2 / 20
  growing_wealth.jsonl health constant 3, wealth 2, 5, 8, ..., 35
"""
import json

MONTHS = 12


def stamp(month, day, hour=12, minute=0):
    return "2011-%02d-%02dT%02d:%02d:00Z" % (month, day, hour, minute)


def build(project, health, wealth):
    lines = []
    who_seq = 0
    ref_seq = 0
    pr_seq = 0
    for k in range(MONTHS):
        month = k + 1
        commits_each, people = health(k)
        authors = []
        for _ in range(people):
            who_seq += 1
            who = "dev-%03d" % who_seq
            authors.append(who)
            for c in range(commits_each):
                ref_seq += 1
                lines.append({"type": "commit", "project": project, "contributor": who,
                              "timestamp": stamp(month, 1 + c % 27, 9 + c % 10, c % 60),
                              "ref": "r%05d" % ref_seq})
        for i in range(wealth(k)):
            pr_seq += 1
            lines.append({"type": "pr_record", "project": project, "pr_id": str(pr_seq),
                          "author": authors[i % len(authors)], "opened_at": stamp(month, 2 + i % 20, 8),
                          "closed_at": stamp(month, 3 + i % 20, 17), "merged": True})
    return lines


def alternating_health(k):
    return (2, 5) if k % 2 == 0 else (36, 3)


ARCHETYPES = {
    "steady_wealth.jsonl": ("archetype/steady-wealth", alternating_health, lambda k: 10),
    "both_changing.jsonl": ("archetype/both-changing", alternating_health, lambda k: 2 if k % 2 == 0 else 20),
    "growing_wealth.jsonl": ("archetype/growing-wealth", lambda k: (3, 5), lambda k: 2 + 3 * k),
}

for name, (project, health, wealth) in ARCHETYPES.items():
    with open(name, "w") as fh:
        for rec in build(project, health, wealth):
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
