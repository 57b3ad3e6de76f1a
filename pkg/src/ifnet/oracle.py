"""Brute-force evaluation on small finite-alphabet networks."""

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .expr import RateExpression
from .model import MessageLabel, SpecError, discrete_channel
from .sumrate import degraded_prune, sumrate_expression


class BudgetError(RuntimeError):
    pass


# ---- entropies --------------------------------------------------------------------------------


def _h(p, axis=None):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return t.sum(axis=axis)


def binary_entropy(p):
    return float(_h([p, 1 - p]))


@dataclass
class JointPMF:
    names: tuple
    table: np.ndarray   # one axis per name

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=float)
        if self.table.ndim != len(self.names):
            raise ValueError("one table axis per variable name")
        if np.any(self.table < 0) or abs(self.table.sum() - 1) > 1e-12:
            raise ValueError("table must be a probability distribution")

    @property
    def sizes(self):
        return self.table.shape

    def axes(self, names):
        out = []
        for n in names:
            if n not in self.names:
                raise KeyError(f"unknown variable {n}")
            out.append(self.names.index(n))
        return out

    def entropy(self, names):
        keep = set(self.axes(names))
        if not keep:
            return 0.0
        drop = tuple(a for a in range(len(self.names)) if a not in keep)
        return float(_h(self.table.sum(axis=drop)))


def mutual_information(pmf, info, output, given=()):
    """I(info; output | given) in bits."""
    info, output, given = list(info), list(output), list(given)
    pmf.axes(info + output + given)
    if set(info) & set(output) or set(info) & set(given) or set(output) & set(given):
        raise ValueError("variable groups must be disjoint")
    val = (pmf.entropy(info + given) + pmf.entropy(output + given)
           - pmf.entropy(info + output + given) - pmf.entropy(given))
    return max(0.0, val)


# ---- channels ---------------------------------------------------------------------------------


def _check_stochastic(W):
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or np.any(W < 0) or np.any(np.abs(W.sum(axis=1) - 1) > 1e-9):
        raise ValueError("channel must be a row-stochastic matrix")
    return W


def bsc(p):
    return np.array([[1 - p, p], [p, 1 - p]])


def z_channel(p):
    """Input 0 is received cleanly; input 1 flips to 0 with probability p."""
    return np.array([[1.0, 0.0], [p, 1 - p]])


def random_stochastic(rng, n, m):
    return rng.dirichlet(np.ones(m), size=n)


def strong_channel(rng, n, eps=0.2):
    """Well-conditioned square channel: mostly identity plus a random stochastic part."""
    return (1 - eps) * np.eye(n) + eps * random_stochastic(rng, n, n)


def blahut_arimoto_capacity(W, tol=1e-9, max_iter=100000):
    """max over input laws of I(X;Y) in bits, stopped when the upper and lower bounds meet within tol."""
    W = _check_stochastic(W)
    n = W.shape[0]
    r = np.full(n, 1.0 / n)
    logW = np.log2(np.where(W > 0, W, 1.0))
    lower = 0.0
    for _ in range(max_iter):
        q = r @ W
        logq = np.log2(np.where(q > 0, q, 1.0))
        d = np.sum(W * (logW - logq), axis=1)     # divergence of each row from the output law
        lower = float(np.log2(np.sum(r * np.exp2(d))))
        upper = float(d.max())
        if upper - lower < tol:
            break
        r = r * np.exp2(d)
        r /= r.sum()
    return lower


def project_simplex_rows(M):
    """Euclidean projection of each row onto the probability simplex."""
    M = np.asarray(M, dtype=float)
    n = M.shape[1]
    u = -np.sort(-M, axis=1)
    css = np.cumsum(u, axis=1) - 1
    idx = np.arange(1, n + 1)
    cond = u - css / idx > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(len(M)), rho] / (rho + 1)
    return np.maximum(M - theta[:, None], 0.0)


@dataclass
class DegradednessFit:
    T: np.ndarray
    residual: float
    iterations: int


def stochastic_degradedness_fit(strong, weak, tol=1e-6, max_iter=10000, target=None):
    """Look for a row-stochastic T with strong @ T == weak; None when the best fit misses by more than tol."""
    A = _check_stochastic(strong)
    B = _check_stochastic(weak)
    if A.shape[0] != B.shape[0]:
        raise ValueError("both channels need the same input alphabet")
    target = tol * 1e-3 if target is None else target
    L = np.linalg.norm(A, 2) ** 2
    step = 0.5 / L
    T = np.full((A.shape[1], B.shape[1]), 1.0 / B.shape[1])
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        R = A @ T - B
        res = float(np.abs(R).max())
        if res <= target:
            break
        T = project_simplex_rows(T - step * (A.T @ R))
    res = float(np.abs(A @ T - B).max())
    if res > tol:
        return None
    return DegradednessFit(T, res, it)


# ---- discrete networks -------------------------------------------------------------------------


def cascade_network(first, links, in_alphabets):
    """Physically degraded network: first = P(y_1 | joint x), then y_{k+1} drawn from links[k] given y_k."""
    first = _check_stochastic(first)
    joint = first
    outs = [first.shape[1]]
    for T in links:
        T = _check_stochastic(T)
        joint = _extend(joint, T)
        outs.append(T.shape[1])
    return discrete_channel(in_alphabets, outs, joint)


def _extend(joint, T):
    # joint: rows x, columns (y_1..y_k) flattened with y_k last; append y_{k+1} ~ T[y_k]
    n, cols = joint.shape
    a = T.shape[0]
    J = joint.reshape(n, cols // a, a)
    return np.einsum("xpa,ab->xpab", J, T).reshape(n, -1)


def marginal_channel(channel, j):
    """P(y_j | x) as a flat matrix, j 1-based."""
    t = channel.tensor()
    k1 = len(channel.in_alphabets)
    keep = k1 + j - 1
    drop = tuple(a for a in range(k1, t.ndim) if a != keep)
    return t.sum(axis=drop).reshape(int(np.prod(channel.in_alphabets)), -1)


def factorizes(channel, parents, tol=1e-9):
    """Does P(y | x) factor as a product over receivers of P(y_j | parents_j)?

    parents: list (in conditioning order) of (receiver j, earlier receivers, transmitter indices).
    """
    t = channel.tensor()
    k1 = len(channel.in_alphabets)
    k2 = len(channel.out_alphabets)
    seq = [p[0] for p in parents]
    if sorted(seq) != list(range(1, k2 + 1)):
        raise ValueError("parents must cover every receiver once")
    # reorder outputs into the conditioning sequence
    t = np.moveaxis(t, [k1 + j - 1 for j in seq], list(range(k1, k1 + k2)))
    prev = np.ones(t.shape[:k1])
    prev_m = None
    for pos, (j, ys, xs) in enumerate(parents):
        m = t.sum(axis=tuple(range(k1 + pos + 1, k1 + k2)))
        denom = prev_m if prev_m is not None else prev
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = m / denom[..., None]
        cond = np.where(denom[..., None] > 1e-15, cond, np.nan)
        # axes of cond: x_1..x_K1, y_seq[0..pos]; parent axes keep, all others must not matter
        keep = {i - 1 for i in xs} | {k1 + seq.index(y) for y in ys} | {k1 + pos}
        other = tuple(a for a in range(cond.ndim) if a not in keep)
        if other:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                hi = np.nanmax(cond, axis=other)
                lo = np.nanmin(cond, axis=other)
            spread = np.nan_to_num(hi - lo, nan=0.0)
            if np.max(spread) > tol:
                return False
        prev_m = m
    return True


def physically_degraded(channel, order, tol=1e-9):
    k1 = len(channel.in_alphabets)
    xs = tuple(range(1, k1 + 1))
    parents = [(order[0], (), xs)] + [(order[k], (order[k - 1],), ()) for k in range(1, len(order))]
    return factorizes(channel, parents, tol)


# ---- exhaustive encoder enumeration ----------------------------------------------------------


@dataclass
class EncoderAssignment:
    messages: tuple
    caps: tuple
    tables: tuple     # per transmitter: tuple of output symbols over its message-domain (mixed radix)

    def to_json(self):
        return {"messages": [str(m) for m in self.messages], "caps": list(self.caps),
                "tables": [list(map(int, t)) for t in self.tables]}


class EncoderSpace:
    """All deterministic encoder tables for a message set, in mixed-radix order (transmitter 1 slowest)."""

    def __init__(self, spec, messages, caps=2):
        if not spec.is_discrete:
            raise SpecError("oracle evaluation needs a discrete channel")
        self.spec = spec
        self.messages = tuple(messages)
        if isinstance(caps, int):
            caps = {m: caps for m in self.messages}
        self.caps = tuple(int(caps[m]) for m in self.messages)
        self.ch = spec.discrete
        grids = np.indices(self.caps).reshape(len(self.caps), -1).T if self.messages else np.zeros((1, 0), int)
        self.n_msg = len(grids)
        self.dom, self.tables = [], []
        for i in range(1, spec.k1 + 1):
            carried = [k for k, m in enumerate(self.messages) if i in m.tx]
            sizes = [self.caps[k] for k in carried]
            idx = np.zeros(self.n_msg, dtype=np.int64)
            for k in carried:
                idx = idx * self.caps[k] + grids[:, k]
            self.dom.append(idx)
            self.tables.append((self.ch.in_alphabets[i - 1], int(np.prod(sizes)) if sizes else 1))
        self.counts = [a ** d for a, d in self.tables]
        self.size = int(np.prod([float(c) for c in self.counts]))

    def table_values(self, i, t):
        a, d = self.tables[i]
        return np.array(np.unravel_index(t, (a,) * d)).reshape(d) if d else np.zeros(0, int)

    def all_tables(self, i):
        a, d = self.tables[i]
        return np.array(list(itertools.product(range(a), repeat=d)), dtype=np.int64).reshape(-1, d)

    def assignment(self, c):
        ids = np.unravel_index(c, self.counts)
        return EncoderAssignment(self.messages, self.caps,
                                 tuple(tuple(self.all_tables(i)[t]) for i, t in enumerate(ids)))

    def batches(self, chunk=2048):
        """Yield (first config index, joint array of shape (C, msgs..., x_1..x_K1, y_1..y_K2))."""
        tabs = [self.all_tables(i) for i in range(self.spec.k1)]
        ins = self.ch.in_alphabets
        xstride = np.cumprod((1,) + tuple(ins[::-1]))[:-1][::-1]
        W = self.ch.table
        nx = int(np.prod(ins))
        ny = W.shape[1]
        for start in range(0, self.size, chunk):
            ids = np.arange(start, min(self.size, start + chunk))
            parts = np.unravel_index(ids, self.counts)
            xflat = np.zeros((len(ids), self.n_msg), dtype=np.int64)
            for i in range(self.spec.k1):
                xi = tabs[i][parts[i]][:, self.dom[i]] if tabs[i].shape[1] else np.zeros((len(ids), self.n_msg), int)
                xflat += xi * xstride[i]
            J = np.zeros((len(ids), self.n_msg, nx, ny))
            ci, mi = np.meshgrid(np.arange(len(ids)), np.arange(self.n_msg), indexing="ij")
            J[ci, mi, xflat] = W[xflat] / self.n_msg
            yield start, J.reshape((len(ids),) + self.caps + tuple(ins) + tuple(self.ch.out_alphabets))


class _Axes:
    def __init__(self, space, composite=None):
        self.nm = len(space.messages)
        self.k1 = space.spec.k1
        self.index = {m: k for k, m in enumerate(space.messages)}
        self.composite = composite or {}

    def var(self, v):
        if v == "Q":
            return []
        if isinstance(v, MessageLabel):
            if v in self.composite:
                return [self.index[m] for m in self.composite[v]]
            if v not in self.index:
                raise KeyError(f"message {v} is not part of the enumerated set")
            return [self.index[v]]
        if isinstance(v, str) and v.startswith("X_"):
            body = v[2:].strip("{}")
            return [self.nm + int(i) - 1 for i in body.split(",")]
        raise KeyError(f"variable {v} cannot be evaluated by the oracle")

    def out(self, js):
        return [self.nm + self.k1 + j - 1 for j in js]


def _batch_entropy(J, axes, cache):
    key = frozenset(axes)
    if key not in cache:
        if not axes:
            cache[key] = np.zeros(J.shape[0])
        else:
            drop = tuple(a + 1 for a in range(J.ndim - 1) if a not in key)
            p = J.sum(axis=drop) if drop else J
            cache[key] = _h(p.reshape(J.shape[0], -1), axis=1)
    return cache[key]


def term_values(expr, J, ax):
    cache = {}
    out = []
    for t in expr.terms:
        a = sorted(set(x for v in t.info for x in ax.var(v)))
        c = sorted(set(x for v in t.given for x in ax.var(v)) - set(a))
        b = ax.out(t.output)
        val = (_batch_entropy(J, a + c, cache) + _batch_entropy(J, b + c, cache)
               - _batch_entropy(J, a + b + c, cache) - _batch_entropy(J, c, cache))
        out.append(np.maximum(val, 0.0) if a else np.zeros(J.shape[0]))
    return np.array(out)


def _messages_of(expr):
    return tuple(sorted(expr.messages()))


def expression_values(expr, spec, caps=2, messages=None, composite=None, budget=10 ** 7):
    """Value of expr for every encoder configuration, shape (configs,)."""
    msgs = tuple(messages) if messages is not None else _messages_of(expr)
    space = EncoderSpace(spec, msgs, caps)
    if space.size > budget:
        raise BudgetError(f"{space.size} encoder configurations exceed the budget of {budget}")
    ax = _Axes(space, composite)
    vals = np.empty(space.size)
    for start, J in space.batches():
        vals[start:start + len(J)] = term_values(expr, J, ax).sum(axis=0)
    return vals


@dataclass
class OracleResult:
    value: float
    assignment: EncoderAssignment
    contributions: tuple
    configurations: int

    def to_json(self):
        return {"value": self.value, "encoders": self.assignment.to_json(),
                "terms": list(self.contributions), "configurations": self.configurations}


def maximize_expression(expr, spec, caps=2, budget=10 ** 7):
    """Exact maximum over deterministic encoder tables with uniform messages; lowest index wins ties."""
    msgs = _messages_of(expr)
    space = EncoderSpace(spec, msgs, caps)
    if space.size > budget:
        raise BudgetError(f"{space.size} encoder configurations exceed the budget of {budget}")
    ax = _Axes(space)
    best, best_c, best_terms = -np.inf, 0, None
    for start, J in space.batches():
        tv = term_values(expr, J, ax)
        tot = tv.sum(axis=0)
        k = int(np.argmax(tot))
        if tot[k] > best:
            best, best_c, best_terms = float(tot[k]), start + k, tv[:, k]
    return OracleResult(best, space.assignment(best_c), tuple(float(x) for x in best_terms), space.size)


# ---- pruning equivalence ---------------------------------------------------------------------


def composite_map(spec, report):
    """Each surviving message absorbs its transmitter-set group and any layered message it covers."""
    pos = {j: p for p, j in enumerate(report.order, start=1)}
    worst = {m: max(pos[r] for r in m.rx) for m in report.m_tilde}
    star = set(report.m_star)

    def home(m):
        while m not in star:
            m = next(c for c in report.m_tilde if worst[c] <= worst[m] and set(m.tx) < set(c.tx))
        return m

    groups = {m: [] for m in report.m_star}
    for m in spec.messages:
        groups[home(report.chosen[m.tx])].append(m)
    return {k: tuple(v) for k, v in groups.items()}


@dataclass
class PruningReport:
    configurations: int
    min_gap: float
    max_gap: float
    holds: bool
    identical: bool

    def to_json(self):
        return {"configurations": self.configurations, "min_gap": self.min_gap, "max_gap": self.max_gap,
                "holds": self.holds, "identical": self.identical}


def pruning_equivalence_check(spec, caps=2, budget=10 ** 7, tol=1e-9):
    """Compare, configuration by configuration, the full-message chain with the pruned chain on the same law.

    The pruned chain treats every surviving message as the tuple of full messages it absorbs.
    """
    if not spec.is_discrete:
        raise SpecError("pruning check needs a discrete channel")
    order = spec.receiver_order
    if not physically_degraded(spec.discrete, order):
        raise SpecError("channel is not physically degraded in the given receiver order")
    rep = degraded_prune(spec, order)
    full = sumrate_expression(spec, order, mode="lemma2", with_q=False)
    pruned = sumrate_expression(spec, order, mode="theorem1", with_q=False)

    composite = composite_map(spec, rep)

    msgs = spec.messages
    f = expression_values(full, spec, caps, msgs, budget=budget)
    p = expression_values(pruned, spec, caps, msgs, composite=composite, budget=budget)
    gap = p - f
    return PruningReport(len(f), float(gap.min()), float(gap.max()), bool(gap.min() >= -tol),
                         bool(np.max(np.abs(gap)) <= tol))


def as_expression(terms):
    return RateExpression(tuple(terms))


def bsc_capacity(p):
    return 1 - binary_entropy(p)


def z_capacity(p):
    return math.log2(1 + (1 - p) * p ** (p / (1 - p)))
