"""
Graphviz DOT and JSON views of systems and distance results.
"""
from __future__ import annotations

import re
from typing import List, Optional, Union

import pydot
from pydantic import BaseModel

from app.models.lattice import format_extended
from app.models.mecs import Mecs, edge_key
from app.models.smts import DistanceResult, Smts, transition_key
from app.services.dsl import format_guard, format_label, state_names


class TransitionExport(BaseModel):
    source: str
    label: str
    target: str


class SmtsExport(BaseModel):
    """JSON shape of a finite SMTS."""
    states: List[str]
    initial: str
    may: List[TransitionExport]
    must: List[TransitionExport]


class DistanceExport(BaseModel):
    """JSON shape of a distance computation; value is an exact rational or "inf"."""
    value: str
    saturated: bool
    iterations: int
    lead_bound: str
    step: str


def smts_to_export(system: Smts) -> SmtsExport:
    names = state_names(system.states)

    def rows(transitions) -> List[TransitionExport]:
        return [TransitionExport(source=names[t.source], label=format_label(t.label), target=names[t.target])
                for t in sorted(transitions, key=transition_key)]

    return SmtsExport(
        states=sorted(names.values()),
        initial=names[system.initial],
        may=rows(system.may),
        must=rows(system.must),
    )


def distance_to_export(result: DistanceResult) -> DistanceExport:
    return DistanceExport(
        value=format_extended(result.value),
        saturated=result.saturated,
        iterations=result.iterations,
        lead_bound=format_extended(result.grid.lead_bound),
        step=format_extended(result.grid.step),
    )


def _graph(name: str) -> pydot.Dot:
    graph = pydot.Dot(graph_name=re.sub(r"\W", "_", name), graph_type="digraph", rankdir="LR")
    graph.add_node(pydot.Node("__init", shape="point"))
    return graph


def _node(graph: pydot.Dot, node_id: str, label: str, **attrs) -> None:
    attrs = {"shape": "circle", **attrs}
    graph.add_node(pydot.Node(node_id, label=label, **attrs))


def smts_to_dot(system: Smts, name: str = "smts") -> str:
    """May edges dashed, must edges solid; a may edge under a must edge is not drawn."""
    names = state_names(system.states)
    ids = {state: f"s{index}" for index, state in enumerate(sorted(names, key=names.get))}
    graph = _graph(name)
    for state, node_id in ids.items():
        _node(graph, node_id, names[state])
    graph.add_edge(pydot.Edge("__init", ids[system.initial]))
    for t in sorted(system.must, key=transition_key):
        graph.add_edge(pydot.Edge(ids[t.source], ids[t.target], label=format_label(t.label)))
    for t in sorted(system.may - system.must, key=transition_key):
        graph.add_edge(pydot.Edge(ids[t.source], ids[t.target], label=format_label(t.label),
                                  style="dashed"))
    return graph.to_string()


def mecs_to_dot(mecs: Mecs, name: str = "mecs") -> str:
    names = state_names(mecs.locations)
    ids = {location: f"q{index}" for index, location in enumerate(sorted(names, key=names.get))}
    graph = _graph(name)
    for location, node_id in ids.items():
        extra = {}
        if location in mecs.bad:
            extra = {"style": "filled", "fillcolor": "gray"}
        elif location in mecs.universal:
            extra = {"shape": "doublecircle"}
        _node(graph, node_id, names[location], **extra)
    graph.add_edge(pydot.Edge("__init", ids[mecs.initial]))

    def label(e) -> str:
        return f"{e.action}{format_guard(e.guard)}"

    for e in sorted(mecs.must, key=edge_key):
        graph.add_edge(pydot.Edge(ids[e.source], ids[e.target], label=label(e)))
    for e in sorted(mecs.may - mecs.must, key=edge_key):
        graph.add_edge(pydot.Edge(ids[e.source], ids[e.target], label=label(e), style="dashed"))
    return graph.to_string()


def to_dot(system: Union[Smts, Mecs], name: Optional[str] = None) -> str:
    if isinstance(system, Mecs):
        return mecs_to_dot(system, name or "mecs")
    return smts_to_dot(system, name or "smts")
