"""Network descriptions: message labels, channel payloads and the derived message views."""

import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class SpecError(ValueError):
    pass


def _fmt_set(idx):
    return ",".join(str(i) for i in idx)


@dataclass(frozen=True, order=True)
class MessageLabel:
    """A message sent cooperatively by transmitters `tx` and decoded by receivers `rx` (1-based)."""

    tx: tuple
    rx: tuple

    def __post_init__(self):
        object.__setattr__(self, "tx", tuple(sorted(set(self.tx))))
        object.__setattr__(self, "rx", tuple(sorted(set(self.rx))))
        if not self.tx or not self.rx:
            raise SpecError("message needs nonempty tx and rx sets")

    def __str__(self):
        return "M_{%s}^{%s}" % (_fmt_set(self.tx), _fmt_set(self.rx))

    __repr__ = __str__

    @property
    def txset(self):
        return frozenset(self.tx)


def msg(tx, rx):
    """Shorthand: msg("124", "3") or msg([1, 2, 4], [3])."""
    if isinstance(tx, str):
        tx = [int(c) for c in tx]
    if isinstance(rx, str):
        rx = [int(c) for c in rx]
    return MessageLabel(tuple(tx), tuple(rx))


@dataclass(frozen=True)
class GaussianChannel:
    gains: tuple   # K2 x K1, row j = receiver j
    powers: tuple

    @cached_property
    def matrix(self):
        return np.array(self.gains, dtype=float)


@dataclass(frozen=True)
class DiscreteChannel:
    in_alphabets: tuple
    out_alphabets: tuple
    pmf: tuple   # rows: joint input (mixed radix, X_1 most significant), cols: joint output

    @cached_property
    def table(self):
        return np.array(self.pmf, dtype=float)

    def tensor(self):
        """pmf reshaped to axes (x_1..x_K1, y_1..y_K2)."""
        return self.table.reshape(tuple(self.in_alphabets) + tuple(self.out_alphabets))


@dataclass(frozen=True)
class NetworkSpec:
    k1: int
    k2: int
    messages: tuple
    gaussian: GaussianChannel = None
    discrete: DiscreteChannel = None
    order: tuple = None
    structure: dict = field(default=None, compare=False)

    @property
    def receiver_order(self):
        return tuple(self.order) if self.order else tuple(range(1, self.k2 + 1))

    @property
    def is_discrete(self):
        return self.discrete is not None

    def position(self, m):
        return self.messages.index(m)


@dataclass(frozen=True)
class MessageViews:
    by_tx: dict     # i -> labels with i in tx
    by_rx: dict     # j -> labels with j in rx
    groups: dict    # frozenset(tx) -> labels sharing that tx set


def derive_views(spec):
    by_tx = {i: tuple(m for m in spec.messages if i in m.tx) for i in range(1, spec.k1 + 1)}
    by_rx = {j: tuple(m for m in spec.messages if j in m.rx) for j in range(1, spec.k2 + 1)}
    groups = {}
    for m in spec.messages:
        groups.setdefault(m.txset, []).append(m)
    return MessageViews(by_tx, by_rx, {d: tuple(v) for d, v in groups.items()})


def check_order(order, k2):
    order = tuple(int(j) for j in order)
    if sorted(order) != list(range(1, k2 + 1)):
        raise SpecError(f"order {order} is not a permutation of 1..{k2}")
    return order


def _int_list(v, what):
    if not isinstance(v, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in v):
        raise SpecError(f"{what} must be a list of integers")
    return v


def spec_from_dict(doc):
    if not isinstance(doc, dict):
        raise SpecError("spec document must be an object")
    try:
        k1, k2 = doc["k1"], doc["k2"]
        raw = doc["messages"]
    except KeyError as e:
        raise SpecError(f"missing field {e}") from None
    if not isinstance(k1, int) or not isinstance(k2, int) or k1 < 1 or k2 < 1:
        raise SpecError("k1 and k2 must be positive integers")
    if not isinstance(raw, list) or not raw:
        raise SpecError("messages must be a nonempty list")

    labels = []
    for item in raw:
        tx = _int_list(item.get("tx"), "tx")
        rx = _int_list(item.get("rx"), "rx")
        if any(i < 1 or i > k1 for i in tx):
            raise SpecError(f"tx index out of range in {item}")
        if any(j < 1 or j > k2 for j in rx):
            raise SpecError(f"rx index out of range in {item}")
        if len(set(tx)) != len(tx) or len(set(rx)) != len(rx):
            raise SpecError(f"repeated index in {item}")
        m = MessageLabel(tuple(tx), tuple(rx))
        if m in labels:
            raise SpecError(f"duplicate message label {m}")
        labels.append(m)

    used_tx = set().union(*(m.tx for m in labels))
    used_rx = set().union(*(m.rx for m in labels))
    if len(used_tx) < k1 or len(used_rx) < k2:
        warnings.warn("some transmitters or receivers carry no message", stacklevel=2)

    gaussian = discrete = None
    if doc.get("gaussian") is not None:
        g = doc["gaussian"]
        gains = np.asarray(g.get("gains"), dtype=float)
        powers = np.asarray(g.get("powers"), dtype=float)
        if gains.shape != (k2, k1) or powers.shape != (k1,):
            raise SpecError("gaussian gains must be k2 x k1 and powers length k1")
        if not np.all(np.isfinite(gains)) or not np.all(np.isfinite(powers)) or np.any(powers < 0):
            raise SpecError("gaussian gains must be finite and powers nonnegative")
        gaussian = GaussianChannel(tuple(map(tuple, gains.tolist())), tuple(powers.tolist()))
    if doc.get("discrete") is not None:
        d = doc["discrete"]
        ins = _int_list(d.get("in_alphabets"), "in_alphabets")
        outs = _int_list(d.get("out_alphabets"), "out_alphabets")
        if len(ins) != k1 or len(outs) != k2 or min(ins + outs) < 1:
            raise SpecError("alphabet lists must have lengths k1 and k2 with sizes >= 1")
        pmf = np.asarray(d.get("pmf"), dtype=float)
        if pmf.shape != (int(np.prod(ins)), int(np.prod(outs))):
            raise SpecError(f"pmf shape {pmf.shape} does not match the alphabets")
        if np.any(pmf < 0) or np.any(np.abs(pmf.sum(axis=1) - 1) > 1e-9):
            raise SpecError("pmf rows must be nonnegative and sum to 1")
        discrete = DiscreteChannel(tuple(ins), tuple(outs), tuple(map(tuple, pmf.tolist())))

    order = None
    if doc.get("order") is not None:
        order = check_order(_int_list(doc["order"], "order"), k2)

    return NetworkSpec(k1, k2, tuple(labels), gaussian, discrete, order, doc.get("structure"))


def parse_network_spec(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"bad JSON: {e}") from None
    return spec_from_dict(doc)


def spec_to_dict(spec):
    doc = {
        "k1": spec.k1,
        "k2": spec.k2,
        "messages": [{"tx": list(m.tx), "rx": list(m.rx)} for m in spec.messages],
    }
    if spec.gaussian:
        doc["gaussian"] = {"gains": [list(r) for r in spec.gaussian.gains], "powers": list(spec.gaussian.powers)}
    if spec.discrete:
        d = spec.discrete
        doc["discrete"] = {"in_alphabets": list(d.in_alphabets), "out_alphabets": list(d.out_alphabets),
                           "pmf": [list(r) for r in d.pmf]}
    if spec.order:
        doc["order"] = list(spec.order)
    if spec.structure:
        doc["structure"] = spec.structure
    return doc


def serialize_network_spec(spec):
    return json.dumps(spec_to_dict(spec), indent=1)


def make_spec(k1, k2, messages, **kw):
    return NetworkSpec(k1, k2, tuple(messages), **kw)


def discrete_channel(in_alphabets, out_alphabets, pmf):
    pmf = np.asarray(pmf, dtype=float).reshape(int(np.prod(in_alphabets)), int(np.prod(out_alphabets)))
    return DiscreteChannel(tuple(in_alphabets), tuple(out_alphabets), tuple(map(tuple, pmf.tolist())))
