"""Regenerate src/deplen/data/sample.conllu and its expected ingest tallies.

The sentences are synthetic: uniform random labeled trees laid out in a
depth-first order (so most dependencies are short), each followed by a
sentence-final PUNCT token attached to the root.  A handful of malformed
structures and very short sentences are appended so the ingest tallies
exercise every branch.  Tallies are recorded from the construction itself,
not by running the parser.
"""
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "src" / "deplen" / "data" / "sample.conllu"
EXPECTED = ROOT / "tests" / "fixtures" / "sample.expected.json"

UPOS = ["NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "PROPN"]


def random_heads(n, rng):
    """Head vector of a random tree over n words laid out depth-first."""
    seq = [rng.randint(1, n) for _ in range(n - 2)]
    degree = [1] * (n + 1)
    for v in seq:
        degree[v] += 1
    adj = {v: [] for v in range(1, n + 1)}
    for v in seq:
        leaf = min(u for u in range(1, n + 1) if degree[u] == 1)
        adj[leaf].append(v)
        adj[v].append(leaf)
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = [v for v in range(1, n + 1) if degree[v] == 1]
    adj[u].append(w)
    adj[w].append(u)
    root = rng.randint(1, n)
    order, parent = [], {root: 0}
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        kids = [c for c in adj[v] if c not in parent]
        rng.shuffle(kids)
        for c in kids:
            parent[c] = v
            stack.append(c)
    pos = {v: i + 1 for i, v in enumerate(order)}
    heads = [0] * n
    for v in order:
        heads[pos[v] - 1] = pos[parent[v]] if parent[v] else 0
    return heads


def block(sid, heads, upos, ranges=()):
    lines = [f"# sent_id = {sid}", "# text = " + " ".join(f"w{i}" for i in range(1, len(heads) + 1))]
    for i, (h, tag) in enumerate(zip(heads, upos), start=1):
        for start, end in ranges:
            if start == i:
                lines.append(f"{start}-{end}\tmw{start}\t_\t_\t_\t_\t_\t_\t_\t_")
        rel = "root" if h == 0 else ("punct" if tag == "PUNCT" else "dep")
        lines.append(f"{i}\tw{i}\tw{i}\t{tag}\t_\t_\t{h}\t{rel}\t_\t_")
    return "\n".join(lines) + "\n"


def main():
    rng = random.Random(20130501)
    blocks = []
    tally = {"sentences_read": 0, "sentences_kept": 0, "rejected_non_tree": 0,
             "rejected_below_n_min": 0, "rejection_reasons": {}}
    kept_drop = 0
    for k in range(1, 91):
        n = rng.randint(2, 24)
        heads = random_heads(n, rng)
        root = heads.index(0) + 1
        heads.append(root)
        upos = [rng.choice(UPOS) for _ in range(n)] + ["PUNCT"]
        ranges = [(2, 3)] if k % 15 == 0 and n >= 3 else []
        blocks.append(block(f"sample-{k:03d}", heads, upos, ranges))
        tally["sentences_read"] += 1
        tally["sentences_kept"] += 1  # n + 1 >= 3 words with the final PUNCT
        kept_drop += n >= 3
    # one-word and two-word sentences
    blocks.append(block("short-1", [0], ["INTJ"]))
    blocks.append(block("short-2", [2, 0], ["PRON", "VERB"]))
    tally["sentences_read"] += 2
    tally["rejected_below_n_min"] += 2
    bad = {
        "cycle": [2, 3, 1, 0],  # 1->2->3->1 never reaches the root
        "multiple roots": [0, 1, 0],
        "no root": [2, 1],
        "head out of range": [0, 9, 1],
    }
    for reason, heads in bad.items():
        blocks.append(block(f"bad-{reason.replace(' ', '-')}", heads, ["NOUN"] * len(heads)))
        tally["sentences_read"] += 1
        tally["rejected_non_tree"] += 1
        tally["rejection_reasons"][reason] = 1
    tally["rejection_reasons"] = dict(sorted(tally["rejection_reasons"].items()))
    OUT.write_text("\n".join(blocks), encoding="utf-8")
    expected = {"keep": tally, "drop": {**tally, "sentences_kept": kept_drop,
                "rejected_below_n_min": tally["rejected_below_n_min"] + (90 - kept_drop)}}
    EXPECTED.write_text(json.dumps({"n_min": 3, "by_punct_mode": expected}, indent=2) + "\n")


if __name__ == "__main__":
    main()
