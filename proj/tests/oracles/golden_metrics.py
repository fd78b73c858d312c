#!/usr/bin/env python3
"""Independent oracle for the graph metric goldens.

Re-implements link cleaning and type normalization from the written rules,
builds each slice with networkx and computes every metric with exact
fractions. Writes tests/fixtures/golden_metrics.json.

usage: golden_metrics.py [fixture_repo.json] [link_taxonomy.json] [out.json]
"""

import hashlib
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import networkx as nx

ROOT = Path(__file__).resolve().parents[2]
CLOSED = {"closed", "done", "resolved"}


def fold(name):
    return " ".join(name.casefold().split())


def strip_gantt(name):
    for prefix in ("gantt:", "gantt-"):
        if name.startswith(prefix):
            name = name[len(prefix):].strip()
    for suffix in ("[gantt]", "(gantt)"):
        if name.endswith(suffix):
            name = name[: -len(suffix)].strip()
    return name


class Taxonomy:
    def __init__(self, doc):
        self.rules = [(re.compile(r["pattern"]), r["canonical"]) for r in doc["rules"]]
        self.categories = doc["categories"]
        self.by_fold = {fold(c): c for c in self.categories}

    def canonical(self, raw):
        name = strip_gantt(fold(raw))
        for pattern, canonical in self.rules:
            if pattern.fullmatch(name):
                return canonical
        if name in self.by_fold:
            return self.by_fold[name]
        raise KeyError(raw)

    def category(self, raw):
        return self.categories[self.canonical(raw)]


def clean(repo):
    issues = {i["key"]: i for i in repo["issues"]}
    kept = []
    for link in repo["links"]:
        s, t = link["source"], link["target"]
        if s not in issues or t not in issues:
            continue
        if issues[s]["is_private"] or issues[t]["is_private"]:
            continue
        if s == t:
            continue
        kept.append(link)
    types_by_pair = {}
    for link in kept:
        pair = frozenset((link["source"], link["target"]))
        types_by_pair.setdefault(pair, set()).add(fold(link["type"]))
    seen = set()
    out = []
    for link in kept:
        pair = frozenset((link["source"], link["target"]))
        if len(types_by_pair[pair]) > 1 or pair in seen:
            continue
        seen.add(pair)
        out.append(link)
    return issues, out


def to_float(value):
    return None if value is None else float(value)


def metrics(graph):
    n = graph.number_of_nodes()
    comps = [graph.subgraph(c) for c in nx.connected_components(graph)]
    isolated = sum(1 for c in comps if c.number_of_nodes() == 1)
    nonsingleton = [c for c in comps if c.number_of_nodes() >= 2]
    complex_ = [c for c in comps if c.number_of_nodes() >= 3]
    report = {
        "vertices": n,
        "edges": graph.number_of_edges(),
        "components": len(nonsingleton),
        "complex_components": len(complex_),
        "pct_isolated": Fraction(isolated, n) if n else None,
        "pct_2comp": None,
        "pct_3comp_plus": None,
        "avg_density": None,
        "pct_trees": None,
        "pct_stars": None,
        "assortativity": None,
        "transitivity": Fraction(0),
    }
    if nonsingleton:
        two = sum(1 for c in nonsingleton if c.number_of_nodes() == 2)
        report["pct_2comp"] = Fraction(two, len(nonsingleton))
        report["pct_3comp_plus"] = Fraction(len(complex_), len(nonsingleton))
    if complex_:
        densities = [Fraction(2 * c.number_of_edges(), c.number_of_nodes() * (c.number_of_nodes() - 1))
                     for c in complex_]
        report["avg_density"] = sum(densities) / len(densities)
        trees = [c for c in complex_ if nx.is_tree(c)]
        stars = [c for c in trees if max(d for _, d in c.degree()) == c.number_of_nodes() - 1]
        report["pct_trees"] = Fraction(len(trees), len(complex_))
        report["pct_stars"] = Fraction(len(stars), len(complex_))
    if graph.number_of_edges():
        xs, ys = [], []
        for u, v in graph.edges():
            du, dv = graph.degree(u), graph.degree(v)
            xs += [du, dv]
            ys += [dv, du]
        m = len(xs)
        mx, my = Fraction(sum(xs), m), Fraction(sum(ys), m)
        cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
        var = sum((x - mx) ** 2 for x in xs)
        if var:
            # Symmetrized pairs share one marginal, so sqrt(var_x var_y) = var.
            report["assortativity"] = cov / var
            reference = nx.degree_pearson_correlation_coefficient(graph)
            assert abs(float(report["assortativity"]) - reference) < 1e-9, (report["assortativity"], reference)
        triangles = sum(nx.triangles(graph).values()) // 3
        triads = sum(d * (d - 1) // 2 for _, d in graph.degree())
        if triads:
            report["transitivity"] = Fraction(3 * triangles, triads)
        assert abs(float(report["transitivity"]) - nx.transitivity(graph)) < 1e-12
    return {k: (to_float(v) if isinstance(v, Fraction) or v is None else v) for k, v in report.items()}


def main():
    fixture = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "tests/fixtures/fixture_repo.json"
    taxonomy_path = Path(sys.argv[2]) if len(sys.argv) > 2 else ROOT / "core/data/link_taxonomy.json"
    out = Path(sys.argv[3]) if len(sys.argv) > 3 else ROOT / "tests/fixtures/golden_metrics.json"

    raw = fixture.read_bytes()
    repo = json.loads(raw)
    taxonomy = Taxonomy(json.loads(taxonomy_path.read_text()))
    issues, links = clean(repo)

    slices = {"all": lambda link: True}
    for category in ["Relation", "Duplication", "Composition", "TemporalCausal", "Workflow"]:
        slices["category:" + category] = lambda link, c=category: taxonomy.category(link["type"]) == c

    golden = {"fixture_sha256": hashlib.sha256(raw).hexdigest(), "issues": len(issues), "links": len(links),
              "slices": {}}
    for name, keep in slices.items():
        graph = nx.Graph()
        graph.add_nodes_from(issues)
        graph.add_edges_from((l["source"], l["target"]) for l in links if keep(l))
        golden["slices"][name] = metrics(graph)
    out.write_text(json.dumps(golden, indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
