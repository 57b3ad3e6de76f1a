"""Symbolic rate expressions: sums of conditional mutual-information terms plus a joint law.

Variables are either MessageLabel objects or plain symbol strings ("Q", "X_3", "W_{1,2}").
Outputs are tuples of receiver indices; a tuple longer than one is a virtual receiver.
"""

from dataclasses import dataclass, field

from .model import MessageLabel


def var_str(v):
    return str(v)


def var_key(v):
    # messages first (by tx then rx), then symbols; Q always last
    if isinstance(v, MessageLabel):
        return (0, len(v.tx), v.tx, v.rx, "")
    if v == "Q":
        return (2, 0, (), (), "")
    return (1, 0, (), (), v)


def output_str(out):
    return ",".join(f"Y_{j}" for j in out)


def tx_symbol(tx):
    """Codeword symbol for a transmitter set; singletons are the inputs themselves."""
    tx = tuple(sorted(tx))
    if len(tx) == 1:
        return f"X_{tx[0]}"
    return "W_{%s}" % ",".join(map(str, tx))


@dataclass(frozen=True)
class MITerm:
    info: tuple
    output: tuple
    given: tuple = ()

    def __post_init__(self):
        if set(self.info) & set(self.given):
            raise ValueError(f"info and given overlap in {self}")

    def __str__(self):
        s = "I(" + (",".join(map(var_str, self.info)) or "{}") + ";" + output_str(self.output)
        if self.given:
            s += "|" + ",".join(map(var_str, self.given))
        return s + ")"

    def normalized(self):
        return MITerm(tuple(sorted(self.info, key=var_key)), self.output,
                      tuple(sorted(self.given, key=var_key)))

    def substitute(self, mapping):
        def sub(vs):
            out = []
            for v in vs:
                w = mapping.get(v, v)
                for x in (w if isinstance(w, tuple) else (w,)):
                    if x not in out:
                        out.append(x)
            return tuple(out)
        info = sub(self.info)
        given = tuple(v for v in sub(self.given) if v not in info)
        return MITerm(info, self.output, given)


@dataclass(frozen=True)
class FactorizationLaw:
    independent: tuple          # Q (if kept) then one uniform factor per retained variable
    encoders: tuple             # (input symbol, conditioning tuple, deterministic flag)
    with_q: bool = True

    def factor_strings(self):
        out = []
        for v in self.independent:
            out.append("P_{%s}" % var_str(v))
        for sym, cond, det in self.encoders:
            s = "P_{%s|%s}" % (sym, ",".join(map(var_str, cond))) if cond else "P_{%s}" % sym
            out.append(s + ("[det]" if det else ""))
        return out

    def __str__(self):
        return " x ".join(self.factor_strings())

    def conditioning(self, sym):
        for s, cond, _ in self.encoders:
            if s == sym:
                return cond
        raise KeyError(sym)


@dataclass(frozen=True)
class RateExpression:
    terms: tuple
    law: FactorizationLaw = None
    kind: str = ""
    notes: tuple = field(default=())

    def __str__(self):
        return " + ".join(str(t) for t in self.terms)

    def term_strings(self, normalized=False):
        return [str(t.normalized() if normalized else t) for t in self.terms]

    def variables(self):
        seen = []
        for t in self.terms:
            for v in t.info + t.given:
                if v not in seen:
                    seen.append(v)
        return seen

    def messages(self):
        return [v for v in self.variables() if isinstance(v, MessageLabel)]

    def to_json(self):
        doc = {"kind": self.kind, "terms": self.term_strings(), "expression": str(self)}
        if self.law is not None:
            doc["law"] = self.law.factor_strings()
            doc["with_q"] = self.law.with_q
        if self.notes:
            doc["notes"] = list(self.notes)
        return doc


def encoding_form(expr):
    """Swap each message for the codeword that carries it (W_Delta, or X_i for singletons)."""
    mapping = {m: tx_symbol(m.tx) for m in expr.messages()}
    return RateExpression(tuple(t.substitute(mapping) for t in expr.terms), expr.law, expr.kind + "/encoding",
                          expr.notes)


def chain_terms(info_sets, outputs, extra_given=(), with_q=True, drop_empty=False):
    """Successive chain: term j gets info_sets[j] and conditions on the union of later sets.

    Members already present in a later set are dropped from the info list so each variable is counted once.
    """
    terms = []
    n = len(info_sets)
    for j in range(n):
        later = []
        for k in range(j + 1, n):
            for v in info_sets[k]:
                if v not in later:
                    later.append(v)
        info = tuple(v for v in info_sets[j] if v not in later)
        given = tuple(later) + tuple(v for v in extra_given if v not in later and v not in info)
        if with_q:
            given += ("Q",)
        if info or not drop_empty:
            terms.append(MITerm(info, outputs[j], given))
    return tuple(terms)
