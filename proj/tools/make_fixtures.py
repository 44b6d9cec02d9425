#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under data/fixtures/.

Everything is derived from a fixed seed, so rerunning produces identical
files. Labels are computed with the same additive-logistic rule the C++
reference classifier uses (bias -2, toxic iff p > 0.5).
"""

import json
import math
import random
import re
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures"
BIAS = -2.0
DIM = 8

# benign word -> (weight, toxic counterpart)
PAIRS = {
    "pleasant": (-1.5, "nasty"),
    "lovely": (-1.5, "repulsive"),
    "gentle": (-1.2, "bully"),
    "happy": (-1.0, "idiot"),
    "smart": (-1.3, "stupid"),
    "wonderful": (-1.5, "disgusting"),
    "calm": (-1.0, "pathetic"),
    "great": (-1.0, "trash"),
    "friendly": (-1.2, "hateful"),
    "nice": (-1.0, "moron"),
    "kind": (-1.2, "vile"),
    "beautiful": (-1.4, "ugly"),
    "cheerful": (-1.3, "loser"),
    "helpful": (-1.2, "worthless"),
    "bright": (-1.0, "dumb"),
    "好": (-1.0, "蠢"),
}

TOXIC = {
    "nasty": 4.0, "repulsive": 3.0, "bully": 2.5, "idiot": 4.0, "stupid": 3.5,
    "disgusting": 4.0, "pathetic": 3.0, "trash": 3.0, "hateful": 3.5,
    "moron": 4.0, "vile": 4.0, "ugly": 3.0, "loser": 3.5, "worthless": 4.0,
    "dumb": 3.0, "蠢": 4.0, "贱": 4.0,
}

SYNONYMS = {
    "nasty": "unpleasant", "repulsive": "troubling", "bully": "criticize",
    "idiot": "person", "stupid": "unwise", "disgusting": "disappointing",
    "pathetic": "weak", "trash": "mediocre", "hateful": "harsh",
    "moron": "person", "vile": "unkind", "ugly": "plain", "loser": "beginner",
    "worthless": "unhelpful", "dumb": "careless", "蠢": "笨", "贱": "坏",
}

NEUTRAL = [
    "today", "weather", "the", "movie", "team", "game", "city", "food",
    "music", "book", "teacher", "neighbor", "coffee", "train", "weekend",
    "concert", "office", "market", "garden", "river", "fans", "artists",
    "celebrities", "people", "show", "night", "morning", "class", "park",
]

SUBJECTS = ["the movie", "that referee", "the new phone", "my neighbor", "this team",
            "the concert", "that show", "the manager", "the train service", "this book",
            "the coach", "that singer", "the restaurant", "the game", "the teacher"]
FRAMES_TOXIC = [
    "{s} was {t} and everyone knows it",
    "honestly {s} is {t} today",
    "I think {s} is a {t} and I am done",
    "what a {t} thing {s} did this weekend",
    "{s} looked {t} again at the event last night",
    "people say {s} is {t} but it is worse",
]
FRAMES_NEUTRAL = [
    "{s} starts at eight in the morning",
    "I watched {s} with my family this weekend",
    "we talked about {s} during lunch today",
    "{s} was {b} and the weather was {b2}",
    "my friends think {s} was {b} this time",
    "I went to see {s} after class",
    "{s} moved to a new place near the river",
]

TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:'[A-Za-z0-9]+)*|[一-鿿]")


def weight(tok):
    tok = tok.lower()
    if tok in TOXIC:
        return TOXIC[tok]
    for benign, (w, _) in PAIRS.items():
        if tok == benign:
            return w
    return 0.0


def prob(text):
    z = BIAS + sum(weight(t) for t in TOKEN_RE.findall(text))
    return 1.0 / (1.0 + math.exp(-z))


def label(text):
    return 1 if prob(text) > 0.5 else 0


def unit(rng):
    v = [rng.gauss(0.0, 1.0) for _ in range(DIM)]
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def fmt(v):
    return " ".join(f"{x:.6f}" for x in v)


def write_csv(path, rows, header):
    import csv
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def toxic_post(rng):
    s = rng.choice(SUBJECTS)
    t = rng.choice(list(TOXIC))
    text = rng.choice(FRAMES_TOXIC).format(s=s, t=t)
    if rng.random() < 0.3:
        text += " and so " + rng.choice(list(TOXIC))
    return text


def neutral_post(rng):
    s = rng.choice(SUBJECTS)
    benign = list(PAIRS)
    return rng.choice(FRAMES_NEUTRAL).format(s=s, b=rng.choice(benign[:-1]),
                                             b2=rng.choice(benign[:-1]))


def main():
    rng = random.Random(20240611)
    OUT.mkdir(parents=True, exist_ok=True)

    with open(OUT / "lexicon.tsv", "w", encoding="utf-8") as f:
        for tok, w in TOXIC.items():
            f.write(f"{tok}\t{w}\n")
        for tok, (w, _) in PAIRS.items():
            f.write(f"{tok}\t{w}\n")

    with open(OUT / "synonyms.tsv", "w", encoding="utf-8") as f:
        for tok, rep in SYNONYMS.items():
            f.write(f"{tok}\t{rep}\n")

    with open(OUT / "embeddings.tsv", "w", encoding="utf-8") as f:
        f.write(f"{DIM}\n")
        for benign, (_, toxic) in PAIRS.items():
            base = unit(rng)
            f.write(f"{benign}\t{fmt(base)}\n")
            near = [x + rng.uniform(-0.05, 0.05) for x in base]
            f.write(f"{toxic}\t{fmt(near)}\n")
        f.write(f"贱\t{fmt(unit(rng))}\n")
        for tok in NEUTRAL:
            f.write(f"{tok}\t{fmt([rng.uniform(-1, 1) for _ in range(DIM)])}\n")

    # 500-post word-space corpus; every toxic token appears at least once.
    corpus = []
    for tok in TOXIC:
        corpus.append(f"{rng.choice(SUBJECTS)} is {tok} and I said it loudly")
    corpus.append("这个人真的很蠢而且很贱")
    while len(corpus) < 500:
        corpus.append(toxic_post(rng) if rng.random() < 0.4 else neutral_post(rng))
    write_csv(OUT / "corpus_500.csv", [[label(t), t] for t in corpus], ["label", "text"])

    # 60-post detection set: labels from the lexicon rule.
    detect = [toxic_post(rng) for _ in range(30)] + [neutral_post(rng) for _ in range(30)]
    rng.shuffle(detect)
    write_csv(OUT / "detect_60.csv", [[label(t), t, "Synthetic"] for t in detect],
              ["label", "text", "topic"])

    # 60 toxic posts for the modification loop.
    toxic = []
    while len(toxic) < 60:
        t = toxic_post(rng)
        if label(t) == 1:
            toxic.append(t)
    write_csv(OUT / "toxic_60.csv", [[1, t] for t in toxic], ["label", "text"])

    demo_history = [
        "today the weather is pleasant and calm",
        "my neighbor is so kind and helpful with the garden",
        "the concert last night was wonderful and the crowd was cheerful",
        "our teacher is smart and gentle with every class",
        "the coffee at the market is great this weekend",
        "the river park looks beautiful in the morning light",
        "my team was friendly and happy after the game",
        "this book has a lovely ending and a bright cover",
        "the train staff were nice and helpful today",
        "we had a pleasant dinner with smart friends downtown",
    ]
    comments = {
        "friend": [{"text": f"haha that is so you, comment {i}", "timestamp": 1700000000 + i * 60}
                   for i in range(3)],
        "parent": [{"text": "Please dress warmly, it is cold outside.", "timestamp": 1700001000}],
        "alice": [{"text": f"alice comment number {i}", "timestamp": 1700100000 + i * 60}
                  for i in range(30)],
    }
    platform = {
        "users": [
            {"id": "u1001", "nickname": "demo", "posts": demo_history,
             "connections": ["alice", "bob"], "comments": comments},
            {"id": "u1002", "nickname": "quiet", "posts": [], "connections": [],
             "comments": {}},
            {"id": "u1003", "nickname": "mixed",
             "posts": ["the referee was a total idiot in the game today",
                       "the garden looks pleasant and calm this morning",
                       "#Weekend# the concert was wonderful and the crowd was friendly"],
             "connections": ["carol"],
             "comments": {"carol": [{"text": "see you at the concert", "timestamp": 1700200000}]}},
        ]
    }
    with open(OUT / "mock_platform.json", "w", encoding="utf-8") as f:
        json.dump(platform, f, ensure_ascii=False, indent=2)
        f.write("\n")

    # Hand-checkable scored corpus for the threshold baseline.
    scored = [
        (1, 0.95, "you are a vile moron"),
        (1, 0.71, "what a stupid idea"),
        (1, 0.70, "this is trash honestly"),
        (1, 0.40, "the team is pathetic"),
        (0, 0.70, "the weather is pleasant"),
        (0, 0.10, "we went to the park"),
        (0, 0.75, "the movie was long"),
        (0, 0.69, "coffee with friends"),
        (0, 0.20, "a calm morning"),
        (1, 0.88, "that singer is ugly"),
    ]
    write_csv(OUT / "scored_10.csv", [[l, s, t] for l, s, t in scored],
              ["label", "score", "text"])


if __name__ == "__main__":
    main()
