"""Capacity-region constraints for multiple access with common messages, and sum-rate message pruning.

Receiver orders are tuples listing receiver indices strongest first; "position" means 1-based place
in that tuple.
"""

from dataclasses import dataclass

from .expr import FactorizationLaw, MITerm, RateExpression, chain_terms
from .graph import enumerate_right_sided
from .model import SpecError, check_order, derive_views


@dataclass(frozen=True)
class RegionConstraint:
    omega: tuple
    rhs: MITerm

    def __str__(self):
        return "R[%s] <= %s" % (",".join(map(str, self.omega)), self.rhs)


def _single_receiver(labels):
    labels = list(labels)
    if any(m.rx != (1,) for m in labels):
        raise SpecError("multiple-access constraints need every message addressed to receiver 1 only")
    return labels


def maccm_region_constraints(labels, han_variant=False, cap=20):
    labels = _single_receiver(labels)
    if han_variant:
        if len(labels) > cap:
            from .graph import CapError
            raise CapError(f"{len(labels)} labels exceed the cap of {cap}")
        n = len(labels)
        subsets = sorted((s for s in range(1, 2 ** n)), key=lambda s: (bin(s).count("1"),
                         [i for i in range(n) if s >> i & 1]))
        omegas = [[labels[i] for i in range(n) if s >> i & 1] for s in subsets]
    else:
        omegas = [o for o in enumerate_right_sided(labels, cap) if o]
    out = []
    for omega in omegas:
        info = tuple(m for m in labels if m in omega)
        rest = tuple(m for m in labels if m not in omega)
        out.append(RegionConstraint(info, MITerm(info, (1,), rest + ("Q",))))
    return out


def maccm_sumrate_messages(labels):
    """Messages with no strict transmitter-superset present, scanned from the widest column down."""
    labels = sorted(labels, key=lambda m: (-len(m.tx), m.tx, m.rx))
    return [m for m in labels if not any(set(m.tx) < set(c.tx) for c in labels)]


def _positions(order):
    return {j: p for p, j in enumerate(order, start=1)}


def _pick(group, pos, tie):
    worst = [max(pos[r] for r in m.rx) for m in group]
    theta = min(worst)
    tied = [m for m, w in zip(group, worst) if w == theta]
    chosen = min(tied, key=lambda m: m.rx) if tie == "lex" else tied[0]
    return theta, chosen


def bccm_sumrate_selector(labels, order, tie="declaration"):
    labels = list(labels)
    if not labels:
        raise SpecError("no messages to select from")
    if any(m.tx != labels[0].tx for m in labels):
        raise SpecError("broadcast selector needs a single common transmitter set")
    return _pick(labels, _positions(order), tie)


@dataclass(frozen=True)
class PruneReport:
    order: tuple
    theta: dict          # tx tuple -> weakest-position minimum
    chosen: dict         # tx tuple -> surviving label
    m_tilde: tuple
    m_tilde_rx: dict     # receiver -> labels
    m_arrow: dict        # receiver -> labels whose weakest decoder is this receiver
    m_star_rx: dict
    m_cross_rx: dict
    m_star: tuple
    m_star_tx: dict      # transmitter -> labels

    def to_json(self):
        names = lambda ms: [str(m) for m in ms]
        per = lambda d, p: {f"{p}_{k}": names(v) for k, v in sorted(d.items())}
        return {
            "order": list(self.order),
            "theta": {",".join(map(str, d)): t for d, t in self.theta.items()},
            "chosen": {",".join(map(str, d)): str(m) for d, m in self.chosen.items()},
            "m_tilde": names(self.m_tilde),
            "m_tilde_rx": per(self.m_tilde_rx, "Y"),
            "m_arrow": per(self.m_arrow, "Y"),
            "m_star_rx": per(self.m_star_rx, "Y"),
            "m_cross_rx": per(self.m_cross_rx, "Y"),
            "m_star": names(self.m_star),
            "m_star_tx": per(self.m_star_tx, "X"),
        }


def degraded_prune(spec, order=None, tie="declaration"):
    order = check_order(order if order is not None else spec.receiver_order, spec.k2)
    pos = _positions(order)
    views = derive_views(spec)
    worst = {m: max(pos[r] for r in m.rx) for m in spec.messages}

    theta, chosen = {}, {}
    for d, group in views.groups.items():
        key = tuple(sorted(d))
        theta[key], chosen[key] = _pick(group, pos, tie)
    keep = set(chosen.values())
    m_tilde = tuple(m for m in spec.messages if m in keep)

    m_tilde_rx, m_arrow, m_star_rx, m_cross_rx = {}, {}, {}, {}
    for j in range(1, spec.k2 + 1):
        p = pos[j]
        m_tilde_rx[j] = tuple(m for m in m_tilde if j in m.rx)
        m_arrow[j] = tuple(m for m in m_tilde_rx[j] if worst[m] == p)
        allowed = [c for c in m_tilde if worst[c] <= p]
        m_star_rx[j] = tuple(m for m in m_arrow[j] if not any(set(m.tx) < set(c.tx) for c in allowed))
        m_cross_rx[j] = tuple(m for m in m_arrow[j] if m not in m_star_rx[j])

    star = set().union(*m_star_rx.values())
    m_star = tuple(m for m in m_tilde if m in star)
    m_star_tx = {i: tuple(m for m in m_star if i in m.tx) for i in range(1, spec.k1 + 1)}
    return PruneReport(order, theta, chosen, m_tilde, m_tilde_rx, m_arrow, m_star_rx, m_cross_rx, m_star,
                       m_star_tx)


def message_law(messages, k1, with_q=True, deterministic=True):
    """Independent messages, each input a (by default deterministic) map of the messages it carries."""
    indep = (("Q",) if with_q else ()) + tuple(messages)
    enc = tuple((f"X_{i}", tuple(m for m in messages if i in m.tx) + (("Q",) if with_q else ()), deterministic)
                for i in range(1, k1 + 1))
    return FactorizationLaw(indep, enc, with_q)


def sumrate_expression(spec, order=None, mode="theorem1", with_q=None, tie="declaration"):
    """Successive-decoding sum-rate chain, weakest receiver last.

    theorem1 runs the pruning pipeline first; lemma2 keeps every message.
    Q is kept unless the network has a discrete (cost-free) channel.
    """
    order = check_order(order if order is not None else spec.receiver_order, spec.k2)
    if with_q is None:
        with_q = not spec.is_discrete
    if mode == "theorem1":
        rep = degraded_prune(spec, order, tie)
        sets = [rep.m_star_rx[j] for j in order]
        kept = rep.m_star
    elif mode == "lemma2":
        views = derive_views(spec)
        sets = [views.by_rx[j] for j in order]
        kept = spec.messages
    else:
        raise SpecError(f"unknown mode {mode}")
    terms = chain_terms(sets, [(j,) for j in order], with_q=with_q, drop_empty=(mode == "theorem1"))
    return RateExpression(terms, message_law(kept, spec.k1, with_q), mode)
