"""Sum-rate outer bounds for non-degraded networks, structural classes with exact formulas, region bounds."""

import itertools
import math
from dataclasses import dataclass, field

from .expr import FactorizationLaw, MITerm, RateExpression, chain_terms, tx_symbol
from .graph import CapError
from .model import SpecError, check_order, derive_views
from .sumrate import degraded_prune, message_law, sumrate_expression


def virtual_output(order, j):
    """Outputs of the j-th (0-based) virtual receiver: the order's suffix starting at j."""
    return tuple(order[j:])


def _with_q(spec, with_q):
    return (not spec.is_discrete) if with_q is None else with_q


def orders_for(k2, orders="all", max_k2=6):
    if orders == "all":
        if k2 > max_k2:
            raise CapError(f"{k2}! receiver orders exceed the cap (K2 <= {max_k2})")
        return list(itertools.permutations(range(1, k2 + 1)))
    return [check_order(o, k2) for o in orders]


def theorem2_expression(spec, order=None, with_q=None, tie="declaration"):
    """Successive chain on the virtual receivers (suffixes of the order); pruning is redone for this order."""
    order = check_order(order if order is not None else spec.receiver_order, spec.k2)
    q = _with_q(spec, with_q)
    rep = degraded_prune(spec, order, tie)
    sets = [rep.m_star_rx[j] for j in order]
    outs = [virtual_output(order, k) for k in range(len(order))]
    terms = chain_terms(sets, outs, with_q=q, drop_empty=True)
    return RateExpression(terms, message_law(rep.m_star, spec.k1, q), "theorem2")


# ---- multiple-access-interference structure ---------------------------------------------------


@dataclass(frozen=True)
class MainStructure:
    groups: tuple          # groups[j-1] = transmitters serving receiver j
    markov: bool = False   # the per-receiver Markov chains hold, so virtual outputs collapse

    @property
    def sizes(self):
        return tuple(len(g) for g in self.groups)


def group_symbol(group):
    return tx_symbol(group) if len(group) == 1 else "X_{%s}" % ",".join(map(str, sorted(group)))


def main_structure(spec, markov=None):
    """Detect disjoint transmitter groups, each serving exactly one receiver."""
    groups = [set() for _ in range(spec.k2)]
    for m in spec.messages:
        if len(m.rx) != 1:
            raise SpecError(f"{m} is addressed to several receivers; not a multiple-access-interference network")
        groups[m.rx[0] - 1] |= set(m.tx)
    for a, b in itertools.combinations(range(spec.k2), 2):
        if groups[a] & groups[b]:
            raise SpecError(f"receivers {a + 1} and {b + 1} share transmitters")
    if set().union(*groups) != set(range(1, spec.k1 + 1)):
        raise SpecError("some transmitter serves no receiver")
    if markov is None:
        markov = bool((spec.structure or {}).get("markov", False))
    return MainStructure(tuple(tuple(sorted(g)) for g in groups), markov)


def _main_law(spec, structure, with_q):
    star = tuple(m for m in spec.messages if not any(set(m.tx) < set(c.tx) for c in spec.messages))
    indep = (("Q",) if with_q else ()) + star
    enc = []
    for j, g in enumerate(structure.groups, start=1):
        if g:
            cond = tuple(m for m in star if j in m.rx) + (("Q",) if with_q else ())
            enc.append((group_symbol(g), cond, True))
    return FactorizationLaw(indep, tuple(enc), with_q), star


def main_simplify(spec, structure=None, order=None, with_q=None):
    structure = structure or main_structure(spec)
    order = check_order(order if order is not None else spec.receiver_order, spec.k2)
    q = _with_q(spec, with_q)
    law, _ = _main_law(spec, structure, q)
    sets = [((group_symbol(structure.groups[j - 1]),) if structure.groups[j - 1] else ()) for j in order]
    if structure.markov:
        outs = [(j,) for j in order]
    else:
        outs = [virtual_output(order, k) for k in range(len(order))]
    return RateExpression(chain_terms(sets, outs, with_q=q, drop_empty=True), law, "main")


def noisy_gain_check(gains):
    """Interference coefficients seen by the shared receiver have total energy at most one."""
    return math.fsum(float(a) * float(a) for a in gains) <= 1.0


def tin_expression(spec, structure, with_q=None, eta1=None):
    """Each of the first eta1 receivers treats the rest as noise; the remaining ones decode successively."""
    q = _with_q(spec, with_q)
    k2 = spec.k2
    eta1 = k2 if eta1 is None else eta1
    law, _ = _main_law(spec, structure, q)
    sym = [group_symbol(g) for g in structure.groups]
    qq = ("Q",) if q else ()
    terms = [MITerm((sym[j],), (j + 1,), qq) for j in range(eta1)]
    rest = list(range(eta1, k2))
    terms += list(chain_terms([(sym[j],) for j in rest], [(j + 1,) for j in rest], with_q=q))
    return RateExpression(tuple(terms), law, "tin" if eta1 == k2 else "hybrid")


# ---- classification --------------------------------------------------------------------------


CLASSES = ("degraded", "generalized_z", "many_to_one", "hybrid", "none")


@dataclass(frozen=True)
class StructureClass:
    name: str
    eta1: int = None
    order: tuple = None
    evidence: tuple = field(default=())

    @property
    def exact(self):
        return self.name != "none"

    def to_json(self):
        doc = {"class": self.name, "exact": self.exact, "evidence": list(self.evidence)}
        if self.eta1 is not None:
            doc["eta1"] = self.eta1
            doc["eta2"] = None if self.order is None else len(self.order) - self.eta1
        if self.order is not None:
            doc["order"] = list(self.order)
        return doc


def _discrete_parents(kind, groups, k2, eta1=None):
    g = lambda j: groups[j - 1]
    if kind == "generalized_z":
        return [(1, (), g(1))] + [(j, (j - 1,), g(j)) for j in range(2, k2 + 1)]
    if kind == "many_to_one":
        return [(j, (), g(j)) for j in range(1, k2)] + [(k2, tuple(range(1, k2)), g(k2))]
    if kind == "hybrid":
        par = [(j, (), g(j)) for j in range(1, eta1)]
        par.append((eta1, tuple(range(1, eta1)), g(eta1)))
        par.append((eta1 + 1, (eta1,), tuple(i for j in range(eta1 + 1, k2 + 1) for i in g(j))))
        par += [(j, (j - 1,), ()) for j in range(eta1 + 2, k2 + 1)]
        return par
    raise ValueError(kind)


def _discrete_checks(spec, structure, max_k2=6):
    """Every class whose factorization the channel table satisfies, in priority order."""
    from .oracle import factorizes, physically_degraded
    ch = spec.discrete
    found = []
    if spec.k2 <= max_k2:
        for order in itertools.permutations(range(1, spec.k2 + 1)):
            if physically_degraded(ch, order):
                found.append(StructureClass("degraded", order=order, evidence=(f"cascade in order {order}",)))
                break
    if structure is not None and spec.k2 >= 2:
        gr = structure.groups
        for kind in ("generalized_z", "many_to_one"):
            if factorizes(ch, _discrete_parents(kind, gr, spec.k2)):
                found.append(StructureClass(kind, evidence=(f"{kind} factorization",)))
        for eta1 in range(1, spec.k2):
            if factorizes(ch, _discrete_parents("hybrid", gr, spec.k2, eta1)):
                found.append(StructureClass("hybrid", eta1=eta1, order=tuple(range(1, spec.k2 + 1)),
                                            evidence=(f"hybrid factorization with eta1={eta1}",)))
                break
    return found


def _gaussian_checks(spec, structure):
    from .gaussian import check_rank_one_degraded
    A = spec.gaussian.matrix
    found = []
    chain = check_rank_one_degraded(A)
    if chain is not None:
        found.append(StructureClass("degraded", order=chain.order,
                                    evidence=(f"rank-one gains, ratios {[round(b, 12) for b in chain.ratios]}",)))
    if structure is not None and spec.k2 >= 2 and all(len(g) == 1 for g in structure.groups):
        k2 = spec.k2
        own = [g[0] - 1 for g in structure.groups]
        clean = all(A[j, i] == 0 for j in range(k2 - 1) for i in range(spec.k1) if i != own[j])
        if clean and all(A[j, own[j]] != 0 for j in range(k2 - 1)):
            coeffs = [A[k2 - 1, own[j]] / A[j, own[j]] for j in range(k2 - 1)]
            if noisy_gain_check(coeffs):
                found.append(StructureClass("many_to_one",
                                            evidence=("one interfered receiver", "interference energy <= 1")))
    return found


def classify_and_bound(spec, with_q=None):
    """Return (StructureClass, expression); the expression is exact unless the class is "none"."""
    try:
        structure = main_structure(spec)
    except SpecError:
        structure = None
    declared = dict(spec.structure or {})
    dname = declared.get("class")
    if dname is not None and dname not in CLASSES:
        raise SpecError(f"unknown declared class {dname}")

    if spec.is_discrete:
        found = _discrete_checks(spec, structure)
    elif spec.gaussian is not None:
        found = _gaussian_checks(spec, structure)
    else:
        found = []

    if dname is not None and dname != "none":
        match = [c for c in found if c.name == dname and (dname != "hybrid" or c.eta1 == declared.get("eta1"))]
        if dname == "hybrid" and spec.is_discrete and not match and structure is not None:
            from .oracle import factorizes
            eta1 = declared.get("eta1")
            if isinstance(eta1, int) and 1 <= eta1 < spec.k2 and \
                    factorizes(spec.discrete, _discrete_parents("hybrid", structure.groups, spec.k2, eta1)):
                match = [StructureClass("hybrid", eta1=eta1, order=tuple(range(1, spec.k2 + 1)),
                                        evidence=(f"hybrid factorization with eta1={eta1}",))]
        if spec.is_discrete and not match:
            raise SpecError(f"declared class {dname} is not supported by the channel table")
        if not match:
            if dname != "degraded" and structure is None:
                raise SpecError(f"declared class {dname} needs a multiple-access-interference message layout")
            order = tuple(declared["order"]) if declared.get("order") else None
            if dname == "hybrid" and order is None:
                order = tuple(range(1, spec.k2 + 1))
            match = [StructureClass(dname, eta1=declared.get("eta1"), order=order, evidence=("declared",))]
        cls = match[0]
    else:
        cls = found[0] if found else StructureClass("none", evidence=("no factorization test passed",))

    if cls.name == "degraded":
        expr = sumrate_expression(spec, cls.order, "theorem1", _with_q(spec, with_q))
    elif cls.name in ("generalized_z", "many_to_one"):
        expr = tin_expression(spec, structure, with_q)
    elif cls.name == "hybrid":
        if not isinstance(cls.eta1, int) or not 1 <= cls.eta1 <= spec.k2:
            raise SpecError("hybrid class needs eta1 in 1..K2")
        expr = tin_expression(spec, structure, with_q, cls.eta1)
    else:
        expr = theorem2_expression(spec, with_q=with_q)
    return cls, expr


# ---- capacity-region outer bounds --------------------------------------------------------------


@dataclass(frozen=True)
class BoundConstraint:
    omega: tuple
    order: tuple
    terms: tuple
    source: str
    law: FactorizationLaw = None
    delta: tuple = None
    theta: int = None

    def rhs_strings(self, normalized=False):
        return [str(t.normalized() if normalized else t) for t in self.terms]

    def key(self):
        return (tuple(sorted(map(str, self.omega))), self.order, tuple(self.rhs_strings(True)))

    def to_json(self):
        doc = {"source": self.source, "omega": [str(m) for m in self.omega], "order": list(self.order),
               "rhs": self.rhs_strings()}
        if self.delta is not None:
            doc["delta"] = list(self.delta)
            doc["theta"] = self.theta
        return doc


def _subsets(items, cap):
    n = len(items)
    if n > cap:
        raise CapError(f"{n} messages exceed the subset cap of {cap}")
    masks = sorted(range(1, 2 ** n), key=lambda s: (bin(s).count("1"), [i for i in range(n) if s >> i & 1]))
    return [tuple(items[i] for i in range(n) if s >> i & 1) for s in masks]


MAX_CONSTRAINTS = 200000


def _check_count(n_msgs, n_orders, per=1, limit=MAX_CONSTRAINTS):
    total = (2 ** n_msgs - 1) * n_orders * per
    if total > limit:
        raise CapError(f"{total} constraints exceed the limit of {limit}")


def _region_law(spec):
    return message_law(spec.messages, spec.k1, True, deterministic=False)


def theorem6_constraints(spec, orders="all", cap=20, max_k2=6, limit=MAX_CONSTRAINTS):
    """For every nonempty message subset and receiver order, a virtual-receiver chain bound on its sum rate."""
    views = derive_views(spec)
    law = _region_law(spec)
    olist = orders_for(spec.k2, orders, max_k2)
    _check_count(len(spec.messages), len(olist), 1, limit)
    out = []
    for omega in _subsets(spec.messages, cap):
        rest = tuple(m for m in spec.messages if m not in omega)
        for order in olist:
            sets = [tuple(m for m in views.by_rx[j] if m in omega) for j in order]
            outs = [virtual_output(order, k) for k in range(spec.k2)]
            terms = chain_terms(sets, outs, extra_given=rest)
            out.append(BoundConstraint(omega, order, terms, "thm6", law))
    return out


def aggregate_symbol(delta):
    return "W_{%s}" % ",".join(map(str, delta))


def _theorem7_law(spec):
    views = derive_views(spec)
    deltas = [tuple(sorted(d)) for d in views.groups]
    indep = ("Q",) + tuple(aggregate_symbol(d) for d in deltas)
    enc = tuple((f"X_{i}", tuple(aggregate_symbol(d) for d in deltas if i in d) + ("Q",), True)
                for i in range(1, spec.k1 + 1))
    return FactorizationLaw(indep, enc, True)


def theta_position(omega, group, order):
    """Earliest order position at which some member of the group inside omega is fully decoded."""
    pos = {j: p for p, j in enumerate(order, start=1)}
    inside = [m for m in group if m in omega]
    if not inside:
        return len(order) + 1
    return min(max(pos[r] for r in m.rx) for m in inside)


def theorem7_constraints(spec, orders="all", cap=20, max_k2=6, limit=MAX_CONSTRAINTS):
    """Per (subset, order, transmitter set): the group either enters as one aggregate variable or stays conditioned."""
    views = derive_views(spec)
    law = _theorem7_law(spec)
    olist = orders_for(spec.k2, orders, max_k2)
    _check_count(len(spec.messages), len(olist), len(views.groups), limit)
    out = []
    for omega in _subsets(spec.messages, cap):
        for order in olist:
            k2 = len(order)
            outs = [virtual_output(order, k) for k in range(k2)]
            for d, group in views.groups.items():
                delta = tuple(sorted(d))
                theta = theta_position(omega, group, order)
                rest = tuple(m for m in spec.messages if m not in omega and m not in group)
                sets = [tuple(m for m in views.by_rx[j] if m in omega and m not in group) for j in order]
                if theta > k2:
                    terms = chain_terms(sets, outs, extra_given=rest + group)
                else:
                    w = aggregate_symbol(delta)
                    terms = []
                    for k in range(k2):
                        later = []
                        for s in sets[k + 1:]:
                            later += [m for m in s if m not in later]
                        info = tuple(m for m in sets[k] if m not in later)
                        if k + 1 == theta:
                            info += (w,)
                        given = tuple(later) + rest + ((w,) if k + 1 < theta else ()) + ("Q",)
                        terms.append(MITerm(info, outs[k], given))
                    terms = tuple(terms)
                out.append(BoundConstraint(omega, order, terms, "thm7", law, delta, theta))
    return out


def private_main_layout(spec):
    """Each transmitter sends exactly one message, addressed to one receiver."""
    structure = main_structure(spec)
    owner = {}
    for m in spec.messages:
        if len(m.tx) != 1:
            raise SpecError("private-message layout needs single-transmitter messages")
        if m.tx[0] in owner:
            raise SpecError(f"transmitter {m.tx[0]} sends more than one message")
        owner[m.tx[0]] = m
    return structure, owner


def main_private_constraints(spec, orders="all", max_k2=6, limit=MAX_CONSTRAINTS):
    """Region bound for private-message layouts, written with the transmit signals themselves."""
    _, owner = private_main_layout(spec)
    olist = orders_for(spec.k2, orders, max_k2)
    _check_count(len(spec.messages), len(olist), 1, limit)
    xs = {m: f"X_{i}" for i, m in owner.items()}
    law = FactorizationLaw(("Q",), tuple((f"X_{i}", ("Q",), False) for i in sorted(owner)), True)
    out = []
    for omega in _subsets(spec.messages, 20):
        rest = tuple(xs[m] for m in spec.messages if m not in omega)
        for order in olist:
            sets = [tuple(xs[m] for m in omega if m.rx[0] == j) for j in order]
            outs = [virtual_output(order, k) for k in range(spec.k2)]
            terms = chain_terms(sets, outs, extra_given=rest)
            out.append(BoundConstraint(tuple(xs[m] for m in omega), order, terms, "private"))
    return out


def signal_form(constraint, owner):
    """Rewrite a message-level constraint of a private layout with X_i in place of messages and aggregates."""
    mapping = {}
    for i, m in owner.items():
        mapping[m] = f"X_{i}"
        mapping[aggregate_symbol((i,))] = f"X_{i}"
    terms = tuple(t.substitute(mapping) for t in constraint.terms)
    omega = tuple(mapping[m] for m in constraint.omega)
    return BoundConstraint(omega, constraint.order, terms, constraint.source)
