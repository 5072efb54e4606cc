#!/usr/bin/env python3
"""Generate the synthetic QA fixtures under data/.

Each record carries the canonical fields (id, question, golds) plus two
extra fields used by the offline toy backend:

  contexts      retrieved passages for the RAG prompt (first one is the
                "top" document; sometimes it is a distractor)
  toy_answer    what the toy model answers closed-book

The output is deterministic for a given seed, so the committed files can be
regenerated with `python3 tools/make_toy_datasets.py`.
"""

import json
import random
from pathlib import Path

SYLLABLES = ["var", "en", "holt", "mir", "ta", "lun", "dor", "ka", "vel", "os",
             "bri", "sen", "tor", "al", "qui", "ne", "ro", "zan", "pel", "ith"]
FIRST_NAMES = ["Anna", "Marek", "Ilse", "Tomas", "Clara", "Oren", "Lidia",
               "Pavel", "Rosa", "Emil", "Nadia", "Ivo"]
FILLER = ("This is a commonly cited fact and it appears in many reference "
          "works . Historians and geographers often discuss the background "
          "in more detail , including the economic and cultural context of "
          "the period , the people involved , and later developments that "
          "shaped how the topic is remembered today . Further sources give "
          "additional dates , names , and places that are related to the "
          "question but are not needed for a short answer .").split()

# (name, size, probability the toy model knows an answer, probability the
# top retrieved passage is relevant)
DATASETS = [
    ("toy_nq", 200, 0.60, 0.85),
    ("toy_asqa", 60, 0.62, 0.88),
    ("toy_hotpotqa", 60, 0.25, 0.65),
    ("toy_triviaqa", 60, 0.85, 0.90),
    ("toy_popqa", 60, 0.15, 0.55),
    ("toy_sciq", 60, 0.90, 0.70),
]


def word(rng, parts=2):
    return "".join(rng.choice(SYLLABLES) for _ in range(parts)).capitalize()


def make_fact(rng):
    kind = rng.randrange(4)
    if kind == 0:
        country = word(rng, 3)
        city = word(rng, 2)
        return (f"What is the capital of {country}?", [city],
                f"{city} is the capital of {country} .")
    if kind == 1:
        title = f"The {word(rng)} of {word(rng)}"
        first, last = rng.choice(FIRST_NAMES), word(rng, 3)
        return (f"Who wrote the novel {title}?", [f"{first} {last}", last],
                f"The novel {title} was written by {first} {last} .")
    if kind == 2:
        org = f"{word(rng)} {rng.choice(['University', 'Company', 'Society'])}"
        year = str(rng.randrange(1400, 2000))
        return (f"In which year was the {org} founded?", [year],
                f"The {org} was founded in {year} .")
    city = word(rng, 2)
    river = word(rng, 2)
    return (f"Which river flows through {city}?", [river, f"{river} River"],
            f"The {river} River flows through the town of {city} .")


def filler(rng, n):
    start = rng.randrange(len(FILLER))
    return " ".join(FILLER[(start + i) % len(FILLER)] for i in range(n))


def make_dataset(name, size, p_know, p_relevant, rng):
    records = []
    facts = [make_fact(rng) for _ in range(size)]
    for i, (question, golds, fact) in enumerate(facts):
        distractor = facts[(i + 1 + rng.randrange(size - 1)) % size][2]
        docs = [fact, distractor, facts[rng.randrange(size)][2]]
        if rng.random() >= p_relevant:
            docs = [distractor, facts[rng.randrange(size)][2]]
        if rng.random() < p_know:
            lead = f"The answer is {golds[0]} ."
        else:
            wrong = word(rng, 2)
            lead = rng.choice([f"The answer is {wrong} .",
                               f"I am not sure , but it might be {wrong} ."])
        answer = lead + " " + filler(rng, rng.randrange(20, 110))
        records.append({
            "id": f"{name}-{i:04d}",
            "question": question,
            "golds": golds,
            "contexts": docs,
            "toy_answer": answer,
        })
    return records


def main():
    out = Path(__file__).resolve().parent.parent / "data"
    out.mkdir(exist_ok=True)
    rng = random.Random(20241019)
    for name, size, p_know, p_relevant in DATASETS:
        records = make_dataset(name, size, p_know, p_relevant, rng)
        with open(out / f"{name}.jsonl", "w", encoding="utf-8") as f:
            for r in records:
                f.write(json.dumps(r, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
