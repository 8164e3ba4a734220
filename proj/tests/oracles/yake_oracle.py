#!/usr/bin/env python3
"""Independent reference computation for the keyphrase scoring formulas.

Used to freeze expected values in tests/unit/keyphrase_test.cpp. It shares no
code with the C++ implementation: tokenization is a plain regex, statistics are
recomputed from scratch, and candidate generation is a direct window scan.

Run: python3 tests/oracles/yake_oracle.py [file]
"""
import math
import re
import statistics
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
STOP = {l.strip() for l in (ROOT / "core/data/stopwords_en.txt").read_text().splitlines()
        if l.strip() and not l.startswith("#")}


def sentences(text):
    parts = re.split(r"(?<=[.!?])\s+", text.strip())
    return [p for p in parts if p]


def words(sentence):
    return re.findall(r"[A-Za-z0-9]+", sentence)


def term_scores(text):
    sents = [words(s) for s in sentences(text)]
    occ = {}
    for si, ws in enumerate(sents):
        for wi, w in enumerate(ws):
            occ.setdefault(w.lower(), []).append((si, wi, w))
    tf = {t: len(v) for t, v in occ.items()}
    valid = [tf[t] for t in tf if t not in STOP]
    mean_tf = statistics.mean(valid)
    std_tf = statistics.pstdev(valid)
    max_tf = max(valid)
    n_sent = len(sents)
    scores = {}
    for t, occs in occ.items():
        caps = sum(1 for si, wi, w in occs if wi > 0 and w[0].isupper())
        acro = sum(1 for si, wi, w in occs if len(w) > 1 and w.isupper())
        w_case = max(caps, acro) / (1 + math.log(tf[t]))
        sent_ids = sorted({si for si, _, _ in occs})
        w_pos = math.log(math.log(3 + statistics.median(sent_ids)))
        w_freq = tf[t] / (mean_tf + std_tf)
        left, right = [], []
        for si, wi, _ in occs:
            if wi > 0:
                left.append(sents[si][wi - 1].lower())
            if wi + 1 < len(sents[si]):
                right.append(sents[si][wi + 1].lower())
        dl = len(set(left)) / len(left) if left else 0.0
        dr = len(set(right)) / len(right) if right else 0.0
        w_rel = 1 + (dl + dr) * tf[t] / max_tf
        w_spread = len(sent_ids) / n_sent
        scores[t] = (w_rel * w_pos) / (w_case + w_freq / w_rel + w_spread / w_rel)
    return sents, scores


def keyphrases(text, k=20, max_n=3):
    sents, s = term_scores(text)
    counts = {}
    for ws in sents:
        low = [w.lower() for w in ws]
        for n in range(1, max_n + 1):
            for i in range(len(low) - n + 1):
                g = low[i:i + n]
                if g[0] in STOP or g[-1] in STOP:
                    continue
                key = " ".join(g)
                counts[key] = counts.get(key, 0) + 1
    scored = []
    for phrase, cnt in counts.items():
        toks = phrase.split()
        prod = math.prod(s[t] for t in toks)
        scored.append((prod / (cnt * (1 + sum(s[t] for t in toks))), phrase))
    scored.sort()

    def lev(a, b):
        prev = list(range(len(b) + 1))
        for i, ca in enumerate(a, 1):
            cur = [i]
            for j, cb in enumerate(b, 1):
                cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
            prev = cur
        return prev[-1]

    kept = []
    for score, phrase in scored:
        if all(1 - lev(phrase, p) / max(len(phrase), len(p)) < 0.9 for _, p in kept):
            kept.append((score, phrase))
        if len(kept) == k:
            break
    return kept


FIXTURE = (
    "It is about spin chirality. "
    "Theory predicts spin chirality near interfaces. "
    "Large spin chirality enhances anomalous transport. "
    "Careful samples reveal spin chirality clearly. "
    "Neutron scattering confirms spin chirality directly. "
    "Future devices exploit magnetic textures."
)

if __name__ == "__main__":
    text = Path(sys.argv[1]).read_text() if len(sys.argv) > 1 else FIXTURE
    _, s = term_scores(text)
    for t in sorted(s):
        print(f"term {t!r}: {s[t]!r}")
    for score, phrase in keyphrases(text, k=8):
        print(f"{score!r}\t{phrase}")
