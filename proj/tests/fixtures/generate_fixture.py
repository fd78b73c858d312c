#!/usr/bin/env python3
"""Writes fixture_repo.json: a small two-project issue tracker export.

The output is a pure function of SEED. Rerun after changing the generator,
then refresh the goldens with tests/oracles/golden_metrics.py.
"""

import json
import random
import sys
from pathlib import Path

SEED = 20240517
CORE_ISSUES = 150
WEB_ISSUES = 50

TOPICS = [
    ["parser", "token", "grammar", "syntax", "lexer", "ast", "literal", "escape"],
    ["login", "session", "cookie", "password", "token", "oauth", "redirect", "expiry"],
    ["cache", "eviction", "memory", "ttl", "hit", "miss", "warmup", "invalidate"],
    ["upload", "file", "chunk", "multipart", "progress", "resume", "quota", "storage"],
    ["render", "template", "layout", "css", "font", "theme", "widget", "canvas"],
    ["query", "index", "join", "planner", "optimizer", "scan", "cursor", "predicate"],
    ["export", "csv", "report", "column", "header", "delimiter", "encoding", "download"],
    ["network", "socket", "timeout", "retry", "proxy", "handshake", "latency", "packet"],
    ["build", "compiler", "linker", "toolchain", "flags", "artifact", "gradle", "maven"],
    ["search", "ranking", "score", "relevance", "stemming", "synonym", "facet", "highlight"],
    ["backup", "restore", "snapshot", "archive", "retention", "schedule", "volume", "incremental"],
    ["notification", "email", "digest", "subscriber", "webhook", "template", "queue", "bounce"],
    ["permission", "role", "group", "admin", "grant", "revoke", "audit", "policy"],
    ["locale", "translation", "unicode", "plural", "timezone", "calendar", "currency", "rtl"],
    ["metrics", "dashboard", "chart", "gauge", "histogram", "sampling", "alert", "threshold"],
    ["plugin", "extension", "hook", "loader", "manifest", "sandbox", "registry", "version"],
    ["thread", "deadlock", "mutex", "race", "executor", "pool", "scheduler", "starvation"],
    ["editor", "cursor", "undo", "selection", "clipboard", "shortcut", "indent", "wrap"],
    ["payment", "invoice", "refund", "tax", "checkout", "currency", "gateway", "receipt"],
    ["migration", "schema", "upgrade", "rollback", "column", "constraint", "seed", "legacy"],
]

FILLER = [
    "the", "when", "after", "with", "user", "sometimes", "fails", "error", "crash", "wrong",
    "value", "page", "server", "client", "request", "response", "shows", "missing", "slow",
    "unexpected", "behaviour", "configuration", "default", "option", "screen", "button",
    "log", "exception", "stack", "trace", "version", "release", "update", "setting",
]

CLOSED = ["Closed", "Resolved", "Done"]
OPEN = ["Open", "In Progress", "Reopened"]


def words(rng, topic, n, topic_share):
    out = []
    for _ in range(n):
        pool = TOPICS[topic] if rng.random() < topic_share else FILLER
        out.append(rng.choice(pool))
    return out


def make_issues(rng):
    issues = []
    keys = [f"CORE-{i}" for i in range(1, CORE_ISSUES + 1)] + [f"WEB-{i}" for i in range(1, WEB_ISSUES + 1)]
    for n, key in enumerate(keys):
        topic = rng.randrange(len(TOPICS))
        closed = rng.random() < 0.75
        status = rng.choice(CLOSED) if closed else rng.choice(OPEN)
        resolution = rng.choice(["Fixed", "Fixed", "Won't Fix", "Cannot Reproduce"]) if closed else None
        day = 1 + n % 28
        month = 1 + (n // 28) % 12
        stamp = [
            f"2019-{month:02d}-{day:02d}T10:{n % 60:02d}:00Z",
            f"2019-{month:02d}-{day:02d}T08:15:00+02:00",
            f"2019-{month:02d}-{day:02d}",
        ][n % 3]
        title = " ".join(words(rng, topic, rng.randint(4, 7), 0.7)).capitalize()
        description = " ".join(words(rng, topic, rng.randint(18, 40), 0.5)) + "."
        issues.append({
            "key": key,
            "project": key.split("-")[0],
            "title": title,
            "description": description,
            "issue_type": rng.choice(["Bug", "Bug", "Improvement", "Task", "New Feature"]),
            "status": status,
            "resolution": resolution,
            "created": stamp,
            "is_private": False,
            "_topic": topic,
        })
    return issues


def near_copy(rng, text, keep):
    tokens = text.split()
    return " ".join(t for t in tokens if rng.random() < keep) or tokens[0]


class Linker:
    def __init__(self, rng, issues):
        self.rng = rng
        self.issues = {i["key"]: i for i in issues}
        # Private issues never receive structural links; they only appear in
        # the deliberately dirty links at the end.
        self.free = [i["key"] for i in issues if not i["is_private"]]
        rng.shuffle(self.free)
        self.used = []
        self.links = []

    def fresh(self):
        key = self.free.pop()
        self.used.append(key)
        return key

    def reuse(self):
        return self.rng.choice(self.used)

    def endpoint(self, reuse_share):
        if self.used and self.rng.random() < reuse_share:
            return self.reuse()
        return self.fresh()

    def link(self, a, b, raw_type, direction=None):
        self.links.append({"source": a, "target": b, "type": raw_type, "direction": direction})

    def share_topic(self, master, other, keep):
        m, o = self.issues[master], self.issues[other]
        o["_topic"] = m["_topic"]
        o["title"] = near_copy(self.rng, m["title"], keep).capitalize()
        o["description"] = near_copy(self.rng, m["description"], keep) + " " + " ".join(
            words(self.rng, m["_topic"], 6, 0.5))


def build_links(rng, issues):
    L = Linker(rng, issues)

    # Duplication: mostly isolated pairs, a few small stars around a master.
    for _ in range(22):
        a, b = L.fresh(), L.fresh()
        L.share_topic(a, b, 0.8)
        L.issues[b]["status"], L.issues[b]["resolution"] = "Closed", "Duplicate"
        L.link(b, a, rng.choice(["Duplicate", "duplicates", "is duplicated by", "Duplicated by"]), "outward")
    for _ in range(4):
        master = L.fresh()
        for _ in range(rng.randint(2, 3)):
            dup = L.fresh()
            L.share_topic(master, dup, 0.75)
            L.issues[dup]["status"], L.issues[dup]["resolution"] = "Resolved", "Duplicate"
            L.link(dup, master, "Duplicate")
    for _ in range(6):
        a, b = L.reuse(), L.fresh()
        L.share_topic(a, b, 0.95)
        L.link(b, a, rng.choice(["Cloners", "clones", "Cloned by"]))

    # Composition: epics and parents with children, mostly trees.
    for _ in range(6):
        parent = L.fresh()
        children = [L.fresh() for _ in range(rng.randint(2, 5))]
        for child in children:
            L.share_topic(parent, child, 0.35)
            L.link(parent, child, rng.choice(["Epic", "sub-task", "Subtask"]))
    for _ in range(5):
        a, b = L.endpoint(0.3), L.fresh()
        L.link(a, b, rng.choice(["Incorporates", "contains", "is contained by"]))
    # One composition cycle so not every complex component is a tree.
    x, y, z = L.fresh(), L.fresh(), L.fresh()
    L.link(x, y, "Incorporates")
    L.link(y, z, "Incorporates")
    L.link(z, x, "included by")

    # Relation: loose pairs, two triangles and a chain.
    for _ in range(16):
        a, b = L.endpoint(0.35), L.fresh()
        if rng.random() < 0.5:
            L.share_topic(a, b, 0.4)
        L.link(a, b, rng.choice(["Relates", "relates to", "Reference", "references", "related issue"]))
    for _ in range(2):
        a, b, c = L.fresh(), L.fresh(), L.fresh()
        L.link(a, b, "Relates")
        L.link(b, c, "Relates")
        L.link(c, a, "Relates")
    chain = [L.fresh() for _ in range(4)]
    for u, v in zip(chain, chain[1:]):
        L.link(u, v, "Reference")

    # Temporal / causal: blocker chains and pairs.
    for _ in range(4):
        run = [L.endpoint(0.2) for _ in range(rng.randint(2, 4))]
        for u, v in zip(run, run[1:]):
            if u != v:
                L.link(u, v, rng.choice(["Blocker", "blocks", "is blocked by", "Depends on", "causes"]))
    for _ in range(4):
        a, b = L.fresh(), L.endpoint(0.4)
        if a != b:
            L.link(a, b, rng.choice(["Gantt: finish-start", "Precedes", "Regression", "Caused by"]))

    # Workflow.
    for _ in range(6):
        a, b = L.endpoint(0.4), L.fresh()
        L.link(a, b, rng.choice(["Test", "is tested by", "Fixes", "Supersedes", "Documented by", "Implements"]))

    return L


def add_dirt(L, issues):
    """Links the cleaner must drop or collapse."""
    rng = L.rng
    private = [i for i in issues if i["key"] in L.free][:3]
    for p in private:
        p["is_private"] = True
        L.free.remove(p["key"])
        L.link(p["key"], L.reuse(), "Relates")
    some = L.reuse()
    L.link(some, some, "Relates")  # self-link
    L.link(L.reuse(), "CORE-999", "Blocks")  # missing endpoint
    a, b = L.fresh(), L.fresh()
    L.link(a, b, "Relates")  # multi-typed pair: both links removed
    L.link(b, a, "Blocks")
    first = L.links[0]
    L.link(first["target"], first["source"], first["type"])  # repeated edge, reverse orientation
    rng.shuffle(L.links)


def main():
    rng = random.Random(SEED)
    issues = make_issues(rng)
    linker = build_links(rng, issues)
    add_dirt(linker, issues)
    for issue in issues:
        del issue["_topic"]
    doc = {"name": "fixture", "issues": issues, "links": linker.links}
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("fixture_repo.json")
    out.write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {out}: {len(issues)} issues, {len(linker.links)} raw links")


if __name__ == "__main__":
    main()
