"""Superposition (message / encoding) graphs over transmitter-set labels."""

from dataclasses import dataclass

from .expr import tx_symbol
from .model import MessageLabel, SpecError


class CapError(RuntimeError):
    pass


def is_satellite(a, b):
    """a is layered on top of b: a's transmitter set is a proper subset of b's."""
    return set(a.tx) < set(b.tx)


def _tx(x):
    if isinstance(x, MessageLabel):
        return x.tx
    return tuple(sorted(x))


def _column_order(txs):
    # columns high -> low, lexicographic inside a column
    return sorted(txs, key=lambda d: (-len(d), d))


def _reduction(txs):
    """Cover relation of strict inclusion: d1 -> d2 iff d2 < d1 with nothing strictly between."""
    edges = []
    sets = {d: set(d) for d in txs}
    for d1 in txs:
        below = [d2 for d2 in txs if sets[d2] < sets[d1]]
        for d2 in below:
            if not any(sets[d2] < sets[d3] < sets[d1] for d3 in below):
                edges.append((d1, d2))
    return edges


@dataclass(frozen=True)
class MessageGraph:
    k1: int
    nodes: tuple     # tx tuples in column order
    labels: dict     # tx -> MessageLabel or None
    edges: tuple     # (cloud center tx, satellite tx)

    @property
    def columns(self):
        cols = {}
        for d in self.nodes:
            cols.setdefault(len(d), []).append(d)
        return cols

    def successors(self, d):
        return [b for a, b in self.edges if a == d]

    def reachable(self, src):
        seen, stack = set(), [src]
        while stack:
            for nxt in self.successors(stack.pop()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def name(self, d):
        m = self.labels.get(d)
        return str(m) if m is not None else "M_{%s}" % ",".join(map(str, d))


def build_message_graph(labels, k1):
    txs = []
    annot = {}
    for m in labels:
        d = _tx(m)
        if any(i < 1 or i > k1 for i in d):
            raise SpecError(f"transmitter index out of range in {m}")
        if d in annot:
            raise SpecError(f"two messages share transmitter set {d}")
        annot[d] = m if isinstance(m, MessageLabel) else None
        txs.append(d)
    nodes = tuple(_column_order(txs))
    return MessageGraph(k1, nodes, annot, tuple(_reduction(nodes)))


@dataclass(frozen=True)
class EncodingGraph:
    k1: int
    nodes: tuple        # codeword symbols, column order
    edges: tuple        # symbol pairs
    factors: tuple      # (symbol, conditioning symbols, deterministic)
    with_q: bool

    def law_string(self):
        parts = []
        for sym, cond, det in self.factors:
            parts.append(("P_{%s|%s}" % (sym, ",".join(cond)) if cond else "P_{%s}" % sym)
                         + ("[det]" if det else ""))
        return " x ".join(parts)


def to_encoding_graph(graph):
    k1 = graph.k1
    present = set(graph.nodes)
    txs = list(graph.nodes) + [(i,) for i in range(1, k1 + 1) if (i,) not in present]
    txs = _column_order(txs)
    full = tuple(range(1, k1 + 1))
    with_q = full not in present
    sym = {d: tx_symbol(d) for d in txs}

    factors = []
    for d in txs:
        centers = [sym[g] for g in _column_order(present) if set(d) < set(g)]
        cond = tuple(centers) + (("Q",) if with_q else ())
        det = len(d) == 1 and d not in present
        factors.append((sym[d], cond, det))
    edges = tuple((sym[a], sym[b]) for a, b in _reduction(txs))
    return EncodingGraph(k1, tuple(sym[d] for d in txs), edges, tuple(factors), with_q)


def export_dot(graph):
    lines = ["digraph G {", "  rankdir=LR;"]
    if isinstance(graph, EncodingGraph):
        names = {s: s for s in graph.nodes}
        nodes, edges = graph.nodes, graph.edges
    else:
        names = {d: graph.name(d) for d in graph.nodes}
        nodes, edges = graph.nodes, graph.edges
    for n in nodes:
        lines.append(f'  "{names[n]}";')
    for a, b in edges:
        lines.append(f'  "{names[a]}" -> "{names[b]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def enumerate_right_sided(labels, cap=20):
    """All subsets closed under taking messages whose transmitter set is contained in a member's."""
    labels = list(labels)
    if len(labels) > cap:
        raise CapError(f"{len(labels)} labels exceed the right-sided enumeration cap of {cap}")
    # labels sharing a transmitter set stand or fall together; visit subsets before supersets
    units = {}
    for i, m in enumerate(labels):
        units.setdefault(_tx(m), []).append(i)
    order = sorted(units, key=lambda d: (len(d), d))
    below = {d: [e for e in order if set(e) < set(d)] for d in order}
    found = []

    def dfs(pos, chosen):
        if pos == len(order):
            found.append(sorted(i for d in chosen for i in units[d]))
            return
        d = order[pos]
        dfs(pos + 1, chosen)
        if all(e in chosen for e in below[d]):
            chosen.add(d)
            dfs(pos + 1, chosen)
            chosen.discard(d)

    dfs(0, set())
    found.sort(key=lambda s: (len(s), s))
    return [[labels[i] for i in s] for s in found]
