"""Command-line entry point: ifnet <subcommand> --spec net.json [options]."""

import argparse
import json
import sys

import numpy as np

from . import bounds, gaussian, graph, oracle, sumrate
from .graph import CapError
from .model import SpecError, check_order, parse_network_spec


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _dump(obj):
    return json.dumps(_round(obj), indent=1) + "\n"


def _load(path):
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise SpecError(f"cannot read {path}: {e.strerror}") from None
    return parse_network_spec(text)


def _order(text, k2):
    if text is None:
        return None
    try:
        return check_order([int(t) for t in text.split(",")], k2)
    except ValueError as e:
        raise SpecError(f"bad --order {text!r}: {e}") from None


def _floats(text):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise SpecError(f"expected comma-separated numbers, got {text!r}") from None


# ---- subcommands ----------------------------------------------------------------------------


def cmd_graph(args):
    spec = _load(args.spec)
    txs = []
    for m in spec.messages:
        if m.tx not in txs:
            txs.append(m.tx)
    g = graph.build_message_graph(txs, spec.k1)
    return graph.export_dot(graph.to_encoding_graph(g) if args.encoding else g)


def cmd_region(args):
    spec = _load(args.spec)
    cons = sumrate.maccm_region_constraints(spec.messages, args.han)
    return _dump({"constraints": [{"omega": [str(m) for m in c.omega], "rhs": str(c.rhs)} for c in cons],
                  "sumrate_messages": [str(m) for m in sumrate.maccm_sumrate_messages(spec.messages)]})


def cmd_prune(args):
    spec = _load(args.spec)
    rep = sumrate.degraded_prune(spec, _order(args.order, spec.k2), args.tie)
    return _dump(rep.to_json())


def _generic_gaussian_param(spec, expr):
    """Every message its own unit Gaussian factor; each input splits its power evenly over its messages."""
    msgs = list(expr.messages())

    def build(values, net):
        rows, inputs = {}, []
        for k, m in enumerate(msgs):
            v = [0.0] * len(msgs)
            v[k] = 1.0
            rows[m] = v
        for i in range(1, spec.k1 + 1):
            carried = [k for k, m in enumerate(msgs) if i in m.tx]
            v = [0.0] * len(msgs)
            for k in carried:
                v[k] = float(np.sqrt(net.powers[i - 1] / len(carried)))
            inputs.append(v)
        return rows, inputs, len(msgs)

    return gaussian.GaussianParameterization("equal-split", (), (), build)


def _evaluate(spec, expr, args):
    if args.eval is None:
        return None
    if args.eval == "gaussian":
        if spec.gaussian is None:
            raise SpecError("--eval gaussian needs a gaussian channel in the network file")
        net = gaussian.GaussianNetwork.from_spec(spec)
        return {"value": gaussian.evaluate_gaussian_expr(expr, _generic_gaussian_param(spec, expr), {}, net),
                "parameterization": "independent messages, equal power split"}
    res = oracle.maximize_expression(expr, spec, args.caps, args.budget)
    return res.to_json()


def cmd_sumrate(args):
    spec = _load(args.spec)
    with_q = False if args.eval == "oracle" else None
    expr = sumrate.sumrate_expression(spec, _order(args.order, spec.k2), args.mode, with_q, args.tie)
    doc = expr.to_json()
    if args.encoding:
        from .expr import encoding_form
        doc["encoding_terms"] = encoding_form(expr).term_strings()
    ev = _evaluate(spec, expr, args)
    if ev is not None:
        doc["evaluation"] = ev
    return _dump(doc)


def cmd_bound(args):
    spec = _load(args.spec)
    order = _order(args.order, spec.k2)
    orders = "all" if args.all_orders else [order or spec.receiver_order]
    if args.theorem == 2:
        olist = bounds.orders_for(spec.k2, orders)
        docs = []
        for o in olist:
            e = bounds.theorem2_expression(spec, o)
            d = e.to_json()
            d["order"] = list(o)
            docs.append(d)
        return _dump({"bounds": docs})
    fn = bounds.theorem6_constraints if args.theorem == 6 else bounds.theorem7_constraints
    cons = fn(spec, orders)
    return _dump({"count": len(cons), "constraints": [c.to_json() for c in cons]})


def cmd_classify(args):
    spec = _load(args.spec)
    cls, expr = bounds.classify_and_bound(spec)
    doc = cls.to_json()
    doc["expression"] = expr.to_json()
    return _dump(doc)


def cmd_check_degraded(args):
    spec = _load(args.spec)
    if spec.gaussian is not None and not spec.is_discrete:
        chain = gaussian.check_rank_one_degraded(spec.gaussian.matrix, args.tol)
        if chain is None:
            return _dump({"degraded": False, "method": "rank-one"})
        return _dump({"degraded": True, "method": "rank-one", "order": list(chain.order),
                      "ratios": [float(b) for b in chain.ratios], "mixing": [list(m) for m in chain.mixing]})
    if not spec.is_discrete:
        raise SpecError("check-degraded needs a gaussian or discrete channel")
    orders = bounds.orders_for(spec.k2)
    if not args.stochastic:
        for o in orders:
            if oracle.physically_degraded(spec.discrete, o):
                return _dump({"degraded": True, "method": "physical", "order": list(o)})
        return _dump({"degraded": False, "method": "physical"})
    marg = {j: oracle.marginal_channel(spec.discrete, j) for j in range(1, spec.k2 + 1)}
    for o in orders:
        links = []
        for a, b in zip(o, o[1:]):
            fit = oracle.stochastic_degradedness_fit(marg[a], marg[b], args.tol)
            if fit is None:
                break
            links.append({"from": a, "to": b, "residual": fit.residual, "T": fit.T.tolist()})
        else:
            return _dump({"degraded": True, "method": "stochastic", "order": list(o), "links": links})
    return _dump({"degraded": False, "method": "stochastic"})


def cmd_gaussian(args):
    if args.prop == 4:
        if args.a is None or args.b2 is None or args.b3 is None or args.powers is None:
            raise SpecError("--prop 4 needs --a a1,a2,a3,a4 --b2 --b3 --powers P1,P2,P3,P4")
        a, P = _floats(args.a), _floats(args.powers)
        if len(a) != 4 or len(P) != 4:
            raise SpecError("--prop 4 needs four gains and four powers")
        if args.alpha is not None:
            val = gaussian.prop4_objective(args.alpha, args.beta or 0.0, a, args.b2, args.b3, P)
            return _dump({"value": float(val), "alpha": args.alpha, "beta": args.beta or 0.0})
        val, al, be = gaussian.prop4_capacity(a, args.b2, args.b3, P)
    else:
        if args.a is None or args.b is None or args.powers is None:
            raise SpecError("--prop 5 needs --a --b --powers P1,P2")
        a, P = _floats(args.a), _floats(args.powers)
        if len(a) != 1 or len(P) != 2:
            raise SpecError("--prop 5 needs one gain a and two powers")
        if args.alpha is not None:
            val = gaussian.prop5_objective(args.alpha, args.beta or 0.0, a[0], args.b, *P)
            return _dump({"value": float(val), "alpha": args.alpha, "beta": args.beta or 0.0})
        val, al, be = gaussian.prop5_capacity(a[0], args.b, *P)
    return _dump({"value": val, "alpha": al, "beta": be})


def cmd_sweep(args):
    if args.points < 1:
        raise SpecError("--points must be positive")
    rows = gaussian.sweep_prop5(args.a, args.b, args.ratio, args.pmin, args.pmax, args.points)
    return gaussian.sweep_csv(rows)


# ---- parser ---------------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="ifnet", description=__doc__)
    p.add_argument("--threads", type=int, default=1, help="worker threads (engines currently run serially)")
    sub = p.add_subparsers(dest="cmd", required=True)

    def with_spec(name, fn, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("--spec", required=True)
        s.add_argument("--out")
        s.set_defaults(fn=fn)
        return s

    s = with_spec("graph", cmd_graph, "message graph as DOT")
    s.add_argument("--encoding", action="store_true", help="emit the codeword (encoding) graph instead")

    s = with_spec("region", cmd_region, "multiple-access capacity-region constraints")
    s.add_argument("--han", action="store_true", help="one constraint per nonempty subset")

    s = with_spec("prune", cmd_prune, "sum-rate message pruning report")
    s.add_argument("--order")
    s.add_argument("--tie", choices=("declaration", "lex"), default="declaration")

    s = with_spec("sumrate", cmd_sumrate, "sum-rate expression for a degraded network")
    s.add_argument("--order")
    s.add_argument("--mode", choices=("theorem1", "lemma2"), default="theorem1")
    s.add_argument("--tie", choices=("declaration", "lex"), default="declaration")
    s.add_argument("--encoding", action="store_true", help="also list the terms in codeword symbols")
    s.add_argument("--eval", choices=("gaussian", "oracle"))
    s.add_argument("--caps", type=int, default=2)
    s.add_argument("--budget", type=int, default=10 ** 7)

    s = with_spec("bound", cmd_bound, "outer bounds for general networks")
    s.add_argument("--theorem", type=int, choices=(2, 6, 7), default=2)
    s.add_argument("--order")
    s.add_argument("--all-orders", action="store_true")

    with_spec("classify", cmd_classify, "structural class and exact sum-rate when one applies")

    s = with_spec("check-degraded", cmd_check_degraded, "degradedness test")
    s.add_argument("--stochastic", action="store_true")
    s.add_argument("--tol", type=float, default=None)

    s = sub.add_parser("gaussian", help="closed-form Gaussian sum-rate optimizations")
    s.add_argument("--prop", type=int, choices=(4, 5), required=True)
    s.add_argument("--a", help="gains: a1,a2,a3,a4 (prop 4) or a (prop 5)")
    s.add_argument("--b", type=float)
    s.add_argument("--b2", type=float)
    s.add_argument("--b3", type=float)
    s.add_argument("--powers")
    s.add_argument("--alpha", type=float, help="evaluate at this point instead of maximizing")
    s.add_argument("--beta", type=float)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_gaussian)

    s = sub.add_parser("sweep-fig23", help="power sweep of the two-user shared-auxiliary optimum (CSV)")
    s.add_argument("--a", type=float, default=15.0)
    s.add_argument("--b", type=float, default=1 / 15)
    s.add_argument("--ratio", type=float, default=200.0)
    s.add_argument("--pmin", type=float, default=0.0)
    s.add_argument("--pmax", type=float, default=1000.0)
    s.add_argument("--points", type=int, default=50)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", "unset") is None:
        args.tol = 1e-9 if not args.stochastic else 1e-6
    try:
        text = args.fn(args)
    except (CapError, oracle.BudgetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (SpecError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
