#!/usr/bin/env python3
"""Writes the fixture networks and prints the expected results for them.

Expected values are computed here with ElementTree and networkx, without
reference to the Rust implementation, and pinned in the Rust tests.
Run from this directory: python3 derive_expected.py
"""

import json
from collections import Counter
import random
import xml.etree.ElementTree as ET
from fractions import Fraction
from pathlib import Path

import networkx as nx

HERE = Path(__file__).resolve().parent


def write_network(name, directed, nodes, edges):
    """nodes: list of (key, inner_xml); edges: list of (from, to[, weight])."""
    lines = [f'<network directed="{"true" if directed else "false"}">']
    for key, inner in nodes:
        if inner:
            lines.append(f'  <node key="{key}">{inner}</node>')
        else:
            lines.append(f'  <node key="{key}"/>')
    for e in edges:
        if len(e) == 3:
            lines.append(f'  <edge from="{e[0]}" to="{e[1]}" weight="{e[2]}"/>')
        else:
            lines.append(f'  <edge from="{e[0]}" to="{e[1]}"/>')
    lines.append("</network>")
    (HERE / f"{name}.xml").write_text("\n".join(lines) + "\n")


def load(name):
    root = ET.parse(HERE / f"{name}.xml").getroot()
    directed = root.get("directed", "true") == "true"
    g = nx.MultiDiGraph() if directed else nx.MultiGraph()
    payload = {}
    for node in root.findall("node"):
        g.add_node(node.get("key"))
        payload[node.get("key")] = node
    for e in root.findall("edge"):
        g.add_edge(e.get("from"), e.get("to"), weight=float(e.get("weight", "1")))
    return g, payload


def succ(g, v):
    return set(g.successors(v)) if g.is_directed() else set(g.neighbors(v))


def pred(g, v):
    return set(g.predecessors(v)) if g.is_directed() else set(g.neighbors(v))


def text(el, tag):
    child = el.find(tag)
    return None if child is None else "".join(child.itertext())


def person(first, last):
    return f"<first>{first}</first><last>{last}</last>"


# ---------------------------------------------------------------- fixtures

def build_fixtures():
    write_network(
        "web",
        True,
        [
            ("home", "<title>Home</title>"),
            ("google", "<title>Google</title>"),
            ("news", "<title>News</title>"),
            ("blog", "<title>Blog</title>"),
            ("about", "<title>About</title>"),
            ("search", "<title>Google Search</title>"),
        ],
        [
            ("home", "news"), ("home", "google"), ("news", "google"),
            ("blog", "news"), ("about", "home"), ("search", "about"),
            ("google", "search"),
        ],
    )
    write_network(
        "citations",
        True,
        [
            ("vardi", person("Moshe", "Vardi")),
            ("cohen", person("Moshe", "Cohen")),
            ("halpern", person("Joseph", "Halpern")),
            ("clarke", person("Edmund", "Clarke")),
            ("emerson", person("Allen", "Emerson")),
            ("fagin", person("Ronald", "Fagin")),
            ("pnueli", person("Amir", "Pnueli")),
        ],
        [
            ("vardi", "halpern"), ("vardi", "clarke"), ("fagin", "vardi"),
            ("clarke", "emerson"), ("emerson", "vardi"), ("cohen", "pnueli"),
            ("halpern", "fagin"),
        ],
    )
    kw = lambda s: f"<title>{s[0]}</title><keywords>{s[1]}</keywords>"
    write_network(
        "papers",
        True,
        [
            ("p1", kw(("Scale-free networks", "network analysis, power laws"))),
            ("p2", kw(("Small worlds", "network analysis"))),
            ("p3", kw(("Graph structure in the Web", "web, network analysis"))),
            ("p4", kw(("Survey", "network analysis"))),
            ("p5", kw(("Temporal logic", "model checking"))),
            ("p6", kw(("XPath complexity", "query languages"))),
            ("p7", kw(("Isolated", "network"))),
        ],
        [
            ("p1", "p2"), ("p1", "p3"), ("p4", "p2"), ("p4", "p5"),
            ("p6", "p4"), ("p3", "p2"), ("p5", "p6"),
        ],
    )
    mol = lambda n: f"<name>{n}</name>"
    write_network(
        "molecules",
        True,
        [
            ("glucose", mol("glucose")),
            ("g6p", mol("G6P")),
            ("f6p", mol("F6P")),
            ("f16bp", mol("F16BP")),
            ("pep", mol("PEP")),
            ("atp", mol("ATP")),
            ("adp", mol("ADP")),
            ("pi", mol("Pi")),
            ("water", mol("water")),
        ],
        [
            ("glucose", "g6p"), ("g6p", "f6p"), ("f6p", "f16bp"),
            ("f16bp", "pep"), ("pep", "atp"), ("adp", "atp"), ("pi", "adp"),
            ("atp", "adp"), ("atp", "water"),
        ],
    )
    write_network(
        "contacts",
        False,
        [
            ("dugas", person("Gaetan", "Dugas")),
            ("p01", person("Alan", "Smith")),
            ("p02", person("Bruno", "Rossi")),
            ("p03", person("Carl", "Young")),
            ("p04", person("Gaetan", "Martin")),
            ("p05", person("Diego", "Lopez")),
            ("p06", person("Eric", "Dugas")),
            ("p07", person("Frank", "Moreau")),
            ("p08", person("Gus", "Weber")),
        ],
        [
            ("dugas", "p01"), ("p01", "p02"), ("p02", "p03"), ("dugas", "p05"),
            ("p04", "p06"), ("p06", "p07"), ("p08", "p08"),
        ],
    )

    def scholar(first, last, papers):
        return person(first, last) + "<papers>" + "<paper/>" * papers + "</papers>"

    # count(paper) counts `paper` children, so papers sit directly under node.
    def scholar_flat(first, last, papers):
        return person(first, last) + "<paper/>" * papers

    write_network(
        "collaboration",
        False,
        [
            ("erdos", scholar_flat("Paul", "Erdos", 150)),
            ("renyi", scholar_flat("Alfred", "Renyi", 120)),
            ("turan", scholar_flat("Pal", "Turan", 101)),
            ("light", scholar_flat("Lena", "Light", 5)),
            ("heavy", scholar_flat("Hugo", "Heavy", 130)),
            ("exact", scholar_flat("Ella", "Exact", 100)),
            ("nested", scholar("Nora", "Nested", 140)),
            ("far", scholar_flat("Fritz", "Far", 200)),
        ],
        [
            ("erdos", "renyi"), ("renyi", "turan"), ("erdos", "light"),
            ("light", "heavy"), ("turan", "exact"), ("exact", "far"),
            ("renyi", "nested"),
        ],
    )

    abstract = lambda words: f"<abstract>{words}</abstract>"
    bib = []
    bib.append(("FH05", (HERE / "bibitem.xml").read_text().strip()))
    bib.append(("B09", '<bibitem key="B09" type="article"><author><first>Albert-Laszlo</first><last>Barabasi</last></author>'
                '<title>Scale-free networks: a decade and beyond</title><year>2009</year>'
                + abstract("Hubs and <em>power laws</em> in real networks.") + "</bibitem>"))
    bib.append(("N03", '<bibitem key="N03" type="article"><author><first>Mark</first><last>Newman</last></author>'
                '<title>The structure and function of complex networks</title><year>2003</year>'
                + abstract("A survey of <em>network</em> models and <em>XML</em>-free methods.") + "</bibitem>"))
    bib.append(("F10", '<bibitem key="F10" type="article"><author><first>Massimo</first><last>Franceschet</last></author>'
                '<title>PageRank: standing on the shoulders of giants</title><year>2010</year>'
                + abstract("Ranking in <em>XML</em> and web graphs.") + "</bibitem>"))
    write_network(
        "bibliography",
        True,
        bib,
        [("F10", "B09"), ("F10", "N03"), ("F10", "FH05"), ("B09", "N03"), ("FH05", "N03")],
    )

    write_network("k3", False, [(k, "") for k in "abc"], [("a", "b"), ("b", "c"), ("a", "c")])
    write_network("chain3", False, [(k, "") for k in "abc"], [("a", "b"), ("b", "c")])
    write_network(
        "square_diag",
        False,
        [(k, "") for k in "1234"],
        [("1", "2"), ("2", "3"), ("3", "4"), ("4", "1"), ("1", "3")],
    )
    # Land masses: kneiphof (the island), north bank, south bank, east.
    write_network(
        "koenigsberg",
        False,
        [(k, f"<name>{k}</name>") for k in ["east", "kneiphof", "north", "south"]],
        [
            ("kneiphof", "north"), ("kneiphof", "north"),
            ("kneiphof", "south"), ("kneiphof", "south"),
            ("kneiphof", "east"), ("north", "east"), ("south", "east"),
        ],
    )
    rng = random.Random(20240611)
    while True:
        g = nx.gnp_random_graph(8, 0.35, seed=rng.randrange(1 << 30))
        if nx.is_connected(g) and nx.diameter(g) >= 3:
            break
    write_network(
        "random8",
        False,
        [(f"v{i}", f"<label>{i}</label>") for i in range(8)],
        [(f"v{a}", f"v{b}") for a, b in sorted(g.edges())],
    )


# ---------------------------------------------------------------- oracles

def sat_ex(g, phi):
    return sorted(v for v in g.nodes if any(w in phi for w in succ(g, v)))


def sat_iex(g, phi):
    return sorted(v for v in g.nodes if any(w in phi for w in pred(g, v)))


def sat_ax(g, phi):
    return sorted(v for v in g.nodes if all(w in phi for w in succ(g, v)))


def sat_ef(g, phi):
    out = set()
    for v in g.nodes:
        reach = ({v} | nx.descendants(g, v)) if g.is_directed() else nx.node_connected_component(g, v)
        if reach & phi:
            out.add(v)
    return sorted(out)


def sat_eu(g, phi, psi):
    # Nodes with a path v = u0 .. uk, uk in psi, u0..u(k-1) in phi.
    sub = nx.DiGraph()
    sub.add_nodes_from(g.nodes)
    for u in g.nodes:
        if u in phi:
            for w in succ(g, u):
                sub.add_edge(u, w)
    return sorted(v for v in g.nodes if ({v} | nx.descendants(sub, v)) & psi)


def metrics(name):
    g, _ = load(name)
    simple = nx.Graph()
    simple.add_nodes_from(g.nodes)
    simple.add_edges_from((u, v) for u, v in g.edges() if u != v)
    tri = sum(nx.triangles(simple).values()) // 3
    triples = sum(d * (d - 1) // 2 for _, d in simple.degree())
    clustering = Fraction(3 * tri, triples) if triples else Fraction(0)
    comps = sorted((sorted(c) for c in nx.connected_components(simple)), key=lambda c: (-len(c), c[0]))
    giant = simple.subgraph(comps[0]) if comps else None
    if giant is not None:
        lengths = dict(nx.all_pairs_shortest_path_length(giant))
        diam = max(max(d.values()) for d in lengths.values())
        k = giant.number_of_nodes()
        total = sum(sum(d.values()) for d in lengths.values()) // 2
        mean = Fraction(total, k * (k - 1) // 2) if k > 1 else Fraction(0)
    else:
        diam, mean = None, None
    if g.is_directed():
        hist = {
            "out": dict(sorted(Counter(d for _, d in g.out_degree()).items())),
            "in": dict(sorted(Counter(d for _, d in g.in_degree()).items())),
        }
    else:
        hist = dict(sorted(Counter(d for _, d in g.degree()).items()))
    und = nx.MultiGraph(g)
    touched = [v for v in und.nodes if und.degree(v) > 0]
    euler = (
        nx.is_connected(und.subgraph(touched)) if touched else True
    ) and sum(1 for v in und.nodes if und.degree(v) % 2) in (0, 2)
    return {
        "triangles": tri,
        "triples": triples,
        "clustering": str(clustering),
        "components": [len(c) for c in comps],
        "diameter": diam,
        "mean_geodesic": str(mean) if mean is not None else None,
        "degree_histogram": hist,
        "eulerian_path": euler,
    }


def main():
    build_fixtures()
    out = {}

    g, pl = load("web")
    google = {v for v, n in pl.items() if text(n, "title") == "Google"}
    out["web EX [title = \"Google\"]"] = sat_ex(g, google)

    g, pl = load("citations")
    vardi = {v for v, n in pl.items() if text(n, "first") == "Moshe" and text(n, "last") == "Vardi"}
    out["citations IEX vardi"] = sat_iex(g, vardi)

    g, pl = load("papers")
    na = {v for v, n in pl.items() if "network analysis" in text(n, "keywords")}
    out["papers AX network analysis"] = sat_ax(g, na)

    g, pl = load("molecules")
    atp = {v for v, n in pl.items() if text(n, "name") == "ATP"}
    one = set(sat_ex(g, atp))
    two = set(sat_ex(g, one))
    three = set(sat_ex(g, two))
    out["molecules ATP within 3"] = sorted(one | two | three)
    # Cross-check: nonzero entries of A + A^2 + A^3 count walks of length 1..3.
    order = sorted(g.nodes)
    a = nx.to_numpy_array(nx.DiGraph(g), nodelist=order)
    walks = a + a @ a + a @ a @ a
    by_len = sorted(v for i, v in enumerate(order) if any(walks[i, j] > 0 for j, t in enumerate(order) if t in atp))
    assert by_len == out["molecules ATP within 3"], (by_len, out["molecules ATP within 3"])

    g, pl = load("contacts")
    dugas = {v for v, n in pl.items() if text(n, "first") == "Gaetan" and text(n, "last") == "Dugas"}
    out["contacts EF dugas"] = sat_ef(g, dugas)

    g, pl = load("collaboration")
    heavy = {v for v, n in pl.items() if len(n.findall("paper")) > 100}
    erdos = {v for v, n in pl.items() if text(n, "first") == "Paul" and text(n, "last") == "Erdos"}
    out["collaboration EU heavy erdos"] = sat_eu(g, heavy, erdos)
    out["collaboration heavy"] = sorted(heavy)

    g, pl = load("bibliography")
    out["bibliography count(author)=2 and year=2005"] = sorted(
        v for v, n in pl.items() if len(n.findall("bibitem/author")) == 2 and text(n.find("bibitem"), "year") == "2005"
    )
    out["bibliography em contains XML"] = sorted(
        v for v, n in pl.items() if any("XML" in "".join(e.itertext()) for e in n.findall("bibitem/abstract/em"))
    )
    xml_items = set(out["bibliography em contains XML"])
    out["bibliography EX em XML"] = sat_ex(g, xml_items)

    for name in ["k3", "chain3", "square_diag", "koenigsberg", "random8", "contacts", "collaboration", "web"]:
        out[f"metrics {name}"] = metrics(name)

    print(json.dumps(out, indent=1, sort_keys=True))


if __name__ == "__main__":
    main()
