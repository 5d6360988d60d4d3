#!/usr/bin/env python3
"""Generate the bundled sample corpus under data/sample/.

Everything is synthetic and derived from a fixed seed, so rerunning the
script reproduces the files byte for byte.

Outputs:
  labeled.jsonl    1,500 annotated posts (1,154 relevant, 346 irrelevant)
  stream.jsonl     unlabeled posts, about 10% of them duplicates
  embeddings.tsv   32-dim vectors for every id in both corpora
  timeline.json    dated events used for trend alignment
"""

import argparse
import json
import math
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

THEMES = [
    ("case statistics", "cases deaths confirmed toll rise numbers reported count total recovered tally infections"),
    ("origin of the virus", "wuhan china market bats outbreak origin lab seafood province source animal pneumonia"),
    ("staying home", "lockdown stay home quarantine isolation curfew closed restrictions order distancing indoors schools"),
    ("economy", "stocks crash economy jobs unemployment business recession oil prices stimulus workers shops"),
    ("hospitals and testing", "hospital testing masks ventilators nurses doctors tests kits ppe icu beds shortage"),
    ("government response", "president government briefing governor congress administration officials policy minister press federal"),
    ("travel", "flights travel ban airport cruise ship passengers border screening airlines tourists visa"),
    ("vaccine research", "vaccine trial research scientists treatment drug study cure antibodies chloroquine lab results"),
]

# Week of peak attention per theme (week 0 starts 2020-01-01).
PEAKS = [9, 1, 11, 10, 12, 8, 5, 15]

NOISE = ("beer lime bottle party giveaway followers crypto bitcoin sale discount album concert football game "
         "match tickets song video stream promo code win prize music fans").split()

FILLERS = "the a is in of to and for this just now today people new news update so we it".split()
KEYWORDS = ["coronavirus", "Coronavirus", "#coronavirus", "COVID-19", "#COVID-19", "covid-19", "SARS-nCoV"]

START = datetime(2020, 1, 1, tzinfo=timezone.utc)
WEEKS = 18


def theme_weights(week):
    return [0.2 + math.exp(-((week - p) ** 2) / 8.0) for p in PEAKS]


def pick_week(rng):
    return rng.randrange(WEEKS)


def timestamp(rng, week):
    t = START + timedelta(days=7 * week, seconds=rng.randrange(7 * 86400))
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def decorate(rng, words):
    words = list(words)
    words.insert(rng.randrange(len(words) + 1), rng.choice(KEYWORDS))
    if rng.random() < 0.3:
        words.insert(0, "@user%d" % rng.randrange(1000))
    if rng.random() < 0.4:
        words.append("https://t.co/%06x" % rng.randrange(1 << 24))
    if rng.random() < 0.2:
        words[rng.randrange(len(words))] += "!"
    if rng.random() < 0.3:
        words[0] = words[0].capitalize()
    return " ".join(words)


def relevant_text(rng, week):
    theme = rng.choices(range(len(THEMES)), weights=theme_weights(week))[0]
    vocab = THEMES[theme][1].split()
    n = rng.randint(5, 9)
    words = [rng.choice(vocab) for _ in range(n)]
    if rng.random() < 0.3:
        other = THEMES[rng.randrange(len(THEMES))][1].split()
        words.append(rng.choice(other))
    words += rng.sample(FILLERS, rng.randint(1, 3))
    rng.shuffle(words)
    return decorate(rng, words), theme


def irrelevant_text(rng):
    n = rng.randint(5, 9)
    words = [rng.choice(NOISE) for _ in range(n)]
    if rng.random() < 0.2:
        words.append(rng.choice(THEMES[rng.randrange(len(THEMES))][1].split()))
    words += rng.sample(FILLERS, rng.randint(1, 3))
    rng.shuffle(words)
    return decorate(rng, words)


def dedup_key(text):
    """Rough stand-in for the cleaned token sequence."""
    words = []
    for w in text.lower().split():
        if w.startswith(("@", "http")) or w.strip("#!") in {k.lower() for k in KEYWORDS}:
            continue
        w = w.strip("#!")
        if w in FILLERS:
            continue
        words.append(w.rstrip("s"))
    return " ".join(words)


def embedding(rng, relevant, theme, dim=32):
    v = [rng.gauss(0.0, 1.0) for _ in range(dim)]
    v[0] += 2.5 if relevant else -2.5
    if relevant:
        v[1 + theme] += 2.0
    return v


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "sample"))
    ap.add_argument("--seed", type=int, default=20200101)
    ap.add_argument("--stream", type=int, default=4000)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    labels = ["relevant"] * 1154 + ["irrelevant"] * 346
    rng.shuffle(labels)
    labeled, emb = [], []
    seen = set()
    for i, label in enumerate(labels):
        while True:
            week = pick_week(rng)
            if label == "relevant":
                text, theme = relevant_text(rng, week)
            else:
                text, theme = irrelevant_text(rng), -1
            key = dedup_key(text)
            if key not in seen:
                seen.add(key)
                break
        doc_id = "L%04d" % i
        labeled.append({"id": doc_id, "text": text, "ts": timestamp(rng, week), "label": label})
        emb.append((doc_id, embedding(rng, label == "relevant", max(theme, 0))))

    stream = []
    n_dup = args.stream // 10
    for i in range(args.stream - n_dup):
        week = pick_week(rng)
        if rng.random() < 0.85:
            text, theme = relevant_text(rng, week)
            rel = True
        else:
            text, theme, rel = irrelevant_text(rng), 0, False
        doc_id = "S%05d" % i
        stream.append({"id": doc_id, "text": text, "ts": timestamp(rng, week)})
        emb.append((doc_id, embedding(rng, rel, theme)))
    emb_of = dict(emb)
    for j in range(n_dup):
        src = stream[rng.randrange(args.stream - n_dup)]
        doc_id = "S%05d" % (args.stream - n_dup + j)
        ts = datetime.strptime(src["ts"], "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
        ts = min(ts + timedelta(hours=rng.randint(1, 48)), START + timedelta(days=7 * WEEKS - 1))
        stream.append({"id": doc_id, "text": src["text"], "ts": ts.strftime("%Y-%m-%dT%H:%M:%SZ")})
        emb.append((doc_id, emb_of[src["id"]]))
    order = list(range(len(stream)))
    rng.shuffle(order)
    stream = [stream[i] for i in order]

    with open(out / "labeled.jsonl", "w", newline="\n") as f:
        for d in labeled:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")
    with open(out / "stream.jsonl", "w", newline="\n") as f:
        for d in stream:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")
    with open(out / "embeddings.tsv", "w", newline="\n") as f:
        f.write("dim=32\n")
        for doc_id, v in emb:
            f.write(doc_id + "\t" + " ".join("%.4f" % x for x in v) + "\n")

    timeline = [
        {"start": "2020-01-01", "end": "2020-01-11", "description": "Unexplained pneumonia cluster reported in Wuhan"},
        {"start": "2020-01-12", "end": "2020-01-25", "description": "Genome shared and first cases confirmed abroad"},
        {"start": "2020-01-26", "end": "2020-02-08", "description": "International health emergency declared and flight restrictions begin"},
        {"start": "2020-02-09", "end": "2020-02-29", "description": "Cruise ship quarantine and the disease receives its name"},
        {"start": "2020-03-01", "end": "2020-03-14", "description": "Pandemic declared as stock markets fall"},
        {"start": "2020-03-15", "end": "2020-03-31", "description": "Stay-at-home orders spread and a relief package passes"},
        {"start": "2020-04-01", "end": "2020-04-30", "description": "Vaccine trials begin as global cases pass one million"},
    ]
    with open(out / "timeline.json", "w", newline="\n") as f:
        json.dump(timeline, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
