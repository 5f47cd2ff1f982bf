#!/usr/bin/env python3
# Copyright 2026 The sagetok Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Builds an offline English desk corpus, one sentence per line.

Encyclopedic sources come first: the English Wikipedia sample dumps shipped
with gensim's test data, the Lee news corpus, and any --extra files. The
pool is topped up with prose sentences from Python docstrings found on
sys.path. Output is shuffled with a fixed seed and split into train and
held-out files, plus a JSON manifest with counts and hashes.
"""

import argparse
import ast
import bz2
import hashlib
import json
import os
import random
import re
import sys

SENT_SPLIT = re.compile(r"(?<=[.!?])\s+(?=[A-Z\"'(])")
PROSE_WORD = re.compile(r"^[A-Za-z][A-Za-z'\-]*[,.;:!?]?$")
MARKUP = re.compile(r"[|{}<>=\[\]#*_\\]|https?:|\.\.\.|::")


def clean(line):
    line = line.replace("'''", "").replace("''", "")
    return " ".join(line.split())


def is_sentence(s, min_words=6, max_words=80):
    words = s.split()
    if not min_words <= len(words) <= max_words:
        return False
    if not s[0].isupper() or s[-1] not in ".!?":
        return False
    if MARKUP.search(s):
        return False
    if sum(1 for ch in s if ord(ch) > 127) > 2:
        return False
    return sum(1 for w in words if PROSE_WORD.match(w)) >= 0.8 * len(words)


def split_sentences(paragraph):
    return [s for s in SENT_SPLIT.split(clean(paragraph)) if is_sentence(s)]


def gensim_data_dir():
    try:
        import gensim.test.utils  # noqa: F401
    except ImportError:
        return None
    import gensim
    return os.path.join(os.path.dirname(gensim.__file__), "test", "test_data")


def wiki_dump_sentences(data_dir):
    from gensim.corpora.wikicorpus import extract_pages, filter_wiki
    out = []
    for name in sorted(os.listdir(data_dir)):
        if not (name.startswith("enwiki") and name.endswith(".bz2")):
            continue
        with bz2.open(os.path.join(data_dir, name), "rb") as f:
            for _, text, _ in extract_pages(f):
                for para in filter_wiki(text).split("\n"):
                    out.extend(split_sentences(para))
    return out


def text8_lines(data_dir, words_per_line=24):
    # Lowercase, punctuation-free Wikipedia text; cut into fixed-size chunks.
    path = os.path.join(data_dir, "head500.noblanks.cor")
    if not os.path.exists(path):
        return []
    words = open(path, encoding="utf-8").read().split()
    return [" ".join(words[i:i + words_per_line])
            for i in range(0, len(words) - words_per_line + 1, words_per_line)]


def lee_sentences(data_dir):
    path = os.path.join(data_dir, "lee_background.cor")
    if not os.path.exists(path):
        return []
    out = []
    for doc in open(path, encoding="utf-8", errors="replace"):
        out.extend(split_sentences(doc))
    return out


def extra_sentences(paths):
    out = []
    for p in paths:
        for line in open(p, encoding="utf-8", errors="replace"):
            out.extend(split_sentences(line))
    return out


def docstring_sentences():
    roots = sorted({p for p in sys.path if p.endswith("-packages") and os.path.isdir(p)})
    stdlib = os.path.dirname(os.__file__)
    roots.append(stdlib)
    out = []
    for root in roots:
        for dirpath, dirnames, filenames in os.walk(root):
            dirnames.sort()
            if root != stdlib and dirpath == root:
                continue
            for name in sorted(filenames):
                if not name.endswith(".py"):
                    continue
                try:
                    with open(os.path.join(dirpath, name), encoding="utf-8") as f:
                        tree = ast.parse(f.read())
                except (SyntaxError, UnicodeDecodeError, ValueError, OSError):
                    continue
                for node in ast.walk(tree):
                    if not isinstance(node, (ast.Module, ast.ClassDef, ast.FunctionDef,
                                             ast.AsyncFunctionDef)):
                        continue
                    doc = ast.get_docstring(node)
                    if not doc:
                        continue
                    for para in doc.split("\n\n"):
                        out.extend(split_sentences(para))
    return out


def dedupe(lines, seen):
    out = []
    for s in lines:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", required=True)
    ap.add_argument("--train-lines", type=int, default=120000)
    ap.add_argument("--heldout-lines", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=20240101)
    ap.add_argument("--extra", action="append", default=[],
                    help="additional plain-text file (one paragraph per line)")
    args = ap.parse_args()

    seen = set()
    sources = {}
    data_dir = gensim_data_dir()
    if data_dir:
        sources["wiki_dump"] = dedupe(wiki_dump_sentences(data_dir), seen)
        sources["wiki_text8"] = dedupe(text8_lines(data_dir), seen)
        sources["lee_news"] = dedupe(lee_sentences(data_dir), seen)
    sources["extra"] = dedupe(extra_sentences(args.extra), seen)
    primary = [s for lines in sources.values() for s in lines]

    need = args.train_lines + args.heldout_lines
    rng = random.Random(args.seed)
    if len(primary) < need:
        docs = dedupe(docstring_sentences(), seen)
        rng.shuffle(docs)
        sources["docstrings"] = docs[:need - len(primary)]
    pool = primary + sources.get("docstrings", [])
    if len(pool) < need:
        sys.exit(f"only {len(pool)} sentences available, {need} needed")
    pool = pool[:need]
    rng.shuffle(pool)

    os.makedirs(args.out_dir, exist_ok=True)
    heldout, train = pool[:args.heldout_lines], pool[args.heldout_lines:]
    files = {"train": os.path.join(args.out_dir, "train.txt"),
             "heldout": os.path.join(args.out_dir, "heldout.txt")}
    for key, lines in (("train", train), ("heldout", heldout)):
        with open(files[key], "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
    manifest = {
        "seed": args.seed,
        "sources": {k: len(v) for k, v in sources.items()},
        "train": {"lines": len(train), "sha256": sha256(files["train"])},
        "heldout": {"lines": len(heldout), "sha256": sha256(files["heldout"])},
    }
    with open(os.path.join(args.out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    print(json.dumps(manifest))


if __name__ == "__main__":
    main()
