"""Text renderings of automata and query results: DOT graphs, JSON reports and CSV tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .analysis import DistTable
from .automata import Pga


def frac(x: Fraction) -> str:
    """Exact ``p/q`` rendering; integers print without a denominator."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def approx(x: Fraction) -> str:
    return f"{float(x):.10g}"


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _quote(s: str) -> str:
    return '"' + _escape(s) + '"'


def dot_export(a: Pga, name: str = "pga") -> str:
    """Graphviz rendering: one node per state, one edge per transition.

    Nodes carry their nonzero initial (``in``) and final (``out``) weights;
    final states are drawn as double circles and initial states get an entry
    arrow from an invisible point node.
    """
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for q in a.states:
        parts = [f"q{q}"]
        if q in a.initial:
            parts.append(f"in: {frac(a.initial[q])}")
        if q in a.final:
            parts.append(f"out: {frac(a.final[q])}")
        shape = "doublecircle" if q in a.final else "circle"
        label = "\\n".join(_escape(part) for part in parts)
        lines.append(f'  q{q} [label="{label}", shape={shape}];')
    for q in sorted(a.initial):
        lines.append(f"  init{q} [shape=point];")
        lines.append(f"  init{q} -> q{q} [label={_quote(frac(a.initial[q]))}];")
    for src, label, dst in a.edges():
        lines.append(f"  q{src} -> q{dst} [label={_quote(str(label))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class QueryResult:
    kind: str  # "point", "marginal" or "expectation"
    target: str
    value: object  # Fraction, or DistTable for marginals
    residual: Fraction = Fraction(0)


def _table_key(vars, key) -> str:
    if len(vars) == 1:
        return str(key[0])
    return ",".join(f"{v}={x}" for v, x in zip(vars, key))


def _value_json(r: QueryResult):
    if isinstance(r.value, DistTable):
        t = r.value
        return {_table_key(t.vars, key): frac(w) for key, w in sorted(t.entries.items())}
    return frac(r.value)


def json_report(
    program: str,
    normalized: bool,
    mass: Fraction,
    results: list,
    oracle: Optional[dict] = None,
) -> str:
    """Single JSON object; every rational is serialised as a ``"p/q"`` string."""
    doc = {
        "program": program,
        "normalized": normalized,
        "mass": frac(mass),
        "queries": [
            {
                "kind": r.kind,
                "target": r.target,
                "value": _value_json(r),
                "residual": frac(r.residual),
            }
            for r in results
        ],
    }
    if oracle is not None:
        doc["oracle_check"] = oracle
    return json.dumps(doc, indent=2) + "\n"


def csv_table(table: DistTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["valuation", "probability"])
    for key, p in sorted(table.entries.items()):
        w.writerow([" ".join(f"{v}={x}" for v, x in zip(table.vars, key)), frac(p)])
    return buf.getvalue()
