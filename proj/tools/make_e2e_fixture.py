#!/usr/bin/env python3
"""Regenerates tests/fixtures/e2e: a small Java tree, a title dump and a query set.

The output is committed; this script only records how it was made.
Usage: make_e2e_fixture.py OUT_DIR
"""
import random
import sys
from pathlib import Path

CONSONANTS = "bdfgklmnprstvz"
VOWELS = "aiou"
COMMON = ["data", "value", "manager", "result", "buffer", "context", "util", "entry"]


def words(rng, n, taken):
    out = []
    while len(out) < n:
        w = "".join(rng.choice(CONSONANTS) + rng.choice(VOWELS) for _ in range(rng.randint(2, 3)))
        w += rng.choice(CONSONANTS)
        if w not in taken:
            taken.add(w)
            out.append(w)
    return out


def camel(a, b):
    return a + b[0].upper() + b[1:]


def main(out):
    rng = random.Random(7)
    taken = set(COMMON)
    concepts = [{"q": words(rng, 2, taken), "g": words(rng, 3, taken)} for _ in range(14)]
    noise = words(rng, 40, taken)
    qwords = [w for c in concepts for w in c["q"]]

    src = out / "src"
    methods = {}
    for i, c in enumerate(concepts):
        g = c["g"]
        body = [f"    {camel(g[2], 'entry')} {g[1]} = {g[2]}.{g[0]}(data);",
                f"    return {g[1]}.{camel(g[0], g[2])}({rng.choice(noise)});"]
        methods[f"concept{i}/Gold{i}.java"] = [(camel(g[0], g[1]), body)]

    # Every other document mentions a few query words next to common ones,
    # so the verbatim titles rank these well above the gold methods.
    for d in range(50):
        ms = []
        for m in range(2):
            picks = rng.sample(qwords, 3)
            body = [f"    {p}.{rng.choice(COMMON)}({rng.choice(noise)});" for p in picks]
            body.append(f"    {rng.choice(COMMON)} = {rng.choice(noise)} + {rng.choice(noise)};")
            ms.append((camel(rng.choice(noise), rng.choice(picks)), body))
        methods[f"mod{d % 5}/Part{d}.java"] = ms

    for rel, ms in sorted(methods.items()):
        path = src / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        cls = Path(rel).stem
        lines = [f"package {Path(rel).parent.as_posix().replace('/', '.')};", "", f"public class {cls} {{"]
        for name, body in ms:
            lines += ["  // generated fixture method", f"  public Object {name}(Object data) {{"] + body + ["  }", ""]
        lines[-1] = "}"
        path.write_text("\n".join(lines) + "\n")

    titles = []
    for i, c in enumerate(concepts[:12]):
        q, g = c["q"], c["g"]
        # Strong links for the first eight concepts, thin ones after that.
        links = 6 if i < 8 else (2 if i < 10 else 0)
        for k in range(links):
            titles.append(f"How to {q[k % 2]} {g[k % 3]} in Java")
            titles.append(f"{g[(k + 1) % 3]} {q[(k + 1) % 2]} {rng.choice(noise)} problem")
        titles.append(f"{q[0]} {rng.choice(noise)} {q[1]} {rng.choice(noise)}")
    while len(titles) < 220:
        titles.append(" ".join(rng.choice(noise + COMMON) for _ in range(rng.randint(3, 7))))
    rows = []
    for n, t in enumerate(titles):
        rows.append(f"{1000 + n}\t{t}\tjava;generics" if n % 3 == 0 else f"{1000 + n}\t{t}\tjava")
    # Off-tag titles that would link the last concepts if the filter leaked.
    for c in concepts[10:12]:
        for k in range(5):
            rows.append(f"{5000 + len(rows)}\t{c['q'][0]} {c['g'][k % 3]} tips\tpython")
    (out / "dump.tsv").write_text("\n".join(rows) + "\n")

    queries = []
    for i, c in enumerate(concepts[:12]):
        q = c["q"]
        queries.append(f"CR-{i + 1:02d}\t{q[0].capitalize()} {camel(q[1], 'value')} fails with data error\t"
                       f"concept{i}/Gold{i}.java")
    g = concepts[12]["g"]
    queries.append(f"CR-13\tWrong {g[0]} {g[1]} {g[2]}\tconcept12/Gold12.java")
    queries.append(f"CR-14\tNothing {noise[0]} here\tconcept13/Gold13.java")
    (out / "queries.tsv").write_text("\n".join(queries) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1]))
