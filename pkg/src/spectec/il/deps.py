"""Recursion groups: strongly connected components of the reference graph."""

from __future__ import annotations

import networkx as nx

from . import ast as il


def _type_refs(t, out: set):
    if isinstance(t, il.SynT):
        out.add(t.name)
    elif isinstance(t, il.IterT):
        _type_refs(t.base, out)
    elif isinstance(t, il.TupleT):
        for x in t.types:
            _type_refs(x, out)


def _exp_refs(e, out: set):
    for n in il.walk(e):
        if isinstance(n, il.CallE):
            out.add("$" + n.function)


def reference_graph(script: il.IlScript) -> nx.DiGraph:
    """Edges run from a definition to the definitions it mentions.

    Function names carry their ``$`` so they never collide with syntax names.
    """
    g = nx.DiGraph()
    for name, syn in script.syntax_table.items():
        g.add_node(name)
        refs: set = set()
        for _, args in syn.cases or []:
            for t in args:
                _type_refs(t, refs)
        g.add_edges_from((name, r) for r in sorted(refs))
    for name, f in script.func_table.items():
        g.add_node("$" + name)
        refs = set()
        for c in f.clauses:
            for e in list(c.args) + [c.result] + list(c.premises):
                _exp_refs(e, refs)
        g.add_edges_from(("$" + name, r) for r in sorted(refs))
    for name, rel in script.relation_table.items():
        g.add_node(name)
        refs = set()
        for r in rel.rules:
            for e in (r.lhs_state, r.lhs, r.rhs_state, r.rhs, *r.premises):
                if e is not None:
                    _exp_refs(e, refs)
        g.add_edges_from((name, x) for x in sorted(refs))
    return g


def dependency_groups(script: il.IlScript) -> list[il.RecGroup]:
    """Components in dependency-first order; ties broken by definition order."""
    g = reference_graph(script)
    if not g:
        return []
    position = {n: i for i, n in enumerate(g.nodes)}
    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    comps = {c: sorted(cond.nodes[c]["members"], key=position.get) for c in cond.nodes}
    # condensation edges point at dependencies, so sort the reversed graph
    order = nx.lexicographical_topological_sort(cond.reverse(copy=True),
                                                key=lambda c: position[comps[c][0]])
    groups = []
    for c in order:
        names = comps[c]
        recursive = len(names) > 1 or g.has_edge(names[0], names[0])
        groups.append(il.RecGroup(tuple(names), recursive))
    assert len(members) == len(g)
    return groups
