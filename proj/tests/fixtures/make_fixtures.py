"""Regenerates the small JSONL fixtures checked in next to this script."""

import json
import random

TERM = "planck"
FILLER = ["the", "of", "and", "a", "in", "is", "to"]
TOPICS = {
    "MISSION": ["satellite", "data", "cmb", "launch", "survey"],
    "UNITS": ["length", "scale", "gravity", "natural", "units"],
    "MPS": ["society", "institute", "max", "director", "research"],
    "FOKKER": ["equation", "diffusion", "probability", "drift", "fokker"],
}


def write(path, records, dim):
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(r, sort_keys=True) + "\n")
    with open(path.replace(".jsonl", ".header.json"), "w") as f:
        json.dump({"dim": dim, "corpus_id": "fixture"}, f, sort_keys=True)
        f.write("\n")


def record(oid, vec, label=None, year=None, ctx=None):
    r = {
        "occurrence_id": oid,
        "term": TERM,
        "vector": [round(x, 6) for x in vec],
        "corpus_id": "fixture",
        "paragraph_id": "p-" + oid,
    }
    if label is not None:
        r["label"] = label
    if year is not None:
        r["year"] = year
    if ctx is not None:
        r["context_tokens"] = ctx
    return r


def labeled(rng):
    dim = 16
    counts = {"MISSION": 40, "UNITS": 30, "MPS": 20, "FOKKER": 10}
    out = []
    for li, (label, n) in enumerate(counts.items()):
        for i in range(n):
            vec = [rng.gauss(0, 1) for _ in range(dim)]
            vec[li] += 8.0
            ctx = [TERM] + rng.sample(TOPICS[label], 3) + rng.sample(FILLER, 2)
            out.append(record(f"{label.lower()}-{i:03d}", vec, label, 1990 + rng.randrange(6), ctx))
    # one unlabeled, undated occurrence
    out.append(record("stray-000", [rng.gauss(0, 1) for _ in range(dim)], ctx=[TERM, "the"]))
    rng.shuffle(out)
    write("labeled.jsonl", out, dim)


def purity8():
    vecs = [[1, 0], [1, 0.1], [1, 0.2], [1, 0.3], [0, 1], [0.1, 1], [0.2, 1], [0.3, 1]]
    labels = ["A", "A", "A", "B", "B", "B", "B", "B"]
    recs = [record(f"p{i}", v, labels[i]) for i, v in enumerate(vecs)]
    write("purity8.jsonl", recs, 2)
    sol = {
        "k": 2,
        "seed": 0,
        "centroids": [[1, 0.15], [0.15, 1]],
        "assignment": {f"p{i}": (0 if i < 4 else 1) for i in range(8)},
        "inertia": 0.0,
    }
    with open("purity8.solution.json", "w") as f:
        json.dump(sol, f, sort_keys=True, indent=1)
        f.write("\n")


def sense_switch(rng):
    # Two senses; the share of sense B jumps from 10% to 90% between 2004 and 2005.
    dim = 8
    out = []
    for year in range(2000, 2010):
        share_b = 0.1 if year < 2005 else 0.9
        for i in range(50):
            b = i < round(share_b * 50)
            vec = [rng.gauss(0, 0.3) for _ in range(dim)]
            vec[1 if b else 0] += 5.0
            out.append(record(f"s{year}-{i:02d}", vec, "B" if b else "A", year))
    write("sense_switch.jsonl", out, dim)


if __name__ == "__main__":
    rng = random.Random(20240611)
    labeled(rng)
    purity8()
    sense_switch(rng)
