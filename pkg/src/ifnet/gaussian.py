"""Real Gaussian networks Y = A X + Z with unit noise: degradedness, mutual information, closed forms."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import MessageLabel

REG = 1e-12


def psi(x):
    """AWGN rate in bits: 0.5 * log2(1 + x)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("psi needs a nonnegative argument")
    out = 0.5 * np.log2(1.0 + x)
    return float(out) if out.ndim == 0 else out


def _psi(x):
    return 0.5 * np.log2(1.0 + np.maximum(x, 0.0))


@dataclass(frozen=True)
class GaussianNetwork:
    gains: np.ndarray     # K2 x K1
    powers: np.ndarray

    @classmethod
    def from_spec(cls, spec):
        return cls(np.array(spec.gaussian.gains, dtype=float), np.array(spec.gaussian.powers, dtype=float))


@dataclass(frozen=True)
class DegradedChain:
    order: tuple      # receivers strongest first
    ratios: tuple     # |b| between consecutive receivers, each >= 1
    signs: tuple

    @property
    def mixing(self):
        return tuple((1 / b, math.sqrt(max(0.0, 1 - 1 / b ** 2))) for b in self.ratios)


def check_rank_one_degraded(gains, tol=1e-9):
    """Order receivers so each row is a scaled copy (|scale| <= 1) of the previous one, if possible."""
    A = np.atleast_2d(np.asarray(gains, dtype=float))
    norms = np.abs(A).max(axis=1)
    if np.any(norms == 0):
        raise ValueError("gain matrix has an all-zero row")
    order = sorted(range(A.shape[0]), key=lambda j: (-np.linalg.norm(A[j]), j))
    ratios, signs = [], []
    for s, w in zip(order, order[1:]):
        k = int(np.argmax(np.abs(A[w])))
        b = A[s, k] / A[w, k]
        if np.max(np.abs(A[s] - b * A[w])) > tol * norms[s]:
            return None
        if abs(b) < 1 - tol:
            return None
        ratios.append(abs(b))
        signs.append(1 if b > 0 else -1)
    return DegradedChain(tuple(j + 1 for j in order), tuple(ratios), tuple(signs))


# ---- covariance-based evaluation --------------------------------------------------------------


def _logdet(vectors):
    if not vectors:
        return 0.0
    V = np.array(vectors, dtype=float)
    S = V @ V.T + REG * np.eye(len(V))
    sign, ld = np.linalg.slogdet(S)
    return ld


def gaussian_cmi(a, b, c=()):
    """I(A;B|C) in bits for jointly Gaussian vectors given as coefficient rows over independent factors."""
    a, b, c = list(a), list(b), list(c)
    if not a or not b:
        return 0.0
    val = _logdet(a + c) + _logdet(b + c) - _logdet(a + b + c) - _logdet(c)
    return max(0.0, 0.5 * val / math.log(2))


@dataclass(frozen=True)
class GaussianParameterization:
    """Inputs as signed linear mixes of shared unit Gaussian factors, tuned by named scalars."""

    name: str
    params: tuple
    bounds: tuple
    builder: object       # (values dict, net) -> (variable -> factor row, list of input rows, factor count)
    feasible: object = None

    def is_feasible(self, values):
        for p, (lo, hi) in zip(self.params, self.bounds):
            if not lo - 1e-12 <= values[p] <= hi + 1e-12:
                return False
        return self.feasible is None or self.feasible(values)


def evaluate_gaussian_expr(expr, param, values, net):
    if not param.is_feasible(values):
        raise ValueError(f"infeasible assignment {values}")
    varmap, inputs, nf = param.builder(values, net)
    A = np.asarray(net.gains, dtype=float)
    k2 = A.shape[0]
    width = nf + k2

    def pad(v):
        out = np.zeros(width)
        out[:len(v)] = v
        return out

    X = [pad(x) for x in inputs]
    rows = {f"X_{i + 1}": X[i] for i in range(len(X))}
    for k, v in varmap.items():
        rows[k] = pad(v)
    Y = {}
    for j in range(k2):
        y = sum(A[j, i] * X[i] for i in range(len(X)))
        y = y + np.eye(width)[nf + j]
        Y[j + 1] = y

    def resolve(vs):
        out = []
        for v in vs:
            if v == "Q":
                continue
            if v not in rows:
                raise KeyError(f"variable {v} has no Gaussian realisation")
            out.append(rows[v])
        return out

    total = 0.0
    for t in expr.terms:
        total += gaussian_cmi(resolve(t.info), [Y[j] for j in t.output], resolve(t.given))
    return total


def _sgn(x):
    return 1.0 if x >= 0 else -1.0


# ---- four-transmitter / three-receiver degraded network ----------------------------------------


def layered_gains(a, b2, b3):
    a = np.asarray(a, dtype=float)
    return np.vstack([a, a / b2, a / (b2 * b3)])


def _prop4_builder(values, net):
    al, be = values["alpha"], values["beta"]
    a = np.asarray(net.gains, dtype=float)[0]
    P = np.asarray(net.powers, dtype=float)
    # factors: G1 (cloud shared by X1, X2, X4), G3 (shared by X3, X4), G4 (private part of X4)
    x1 = [math.sqrt(P[0]), 0, 0]
    x2 = [_sgn(a[0] * a[1]) * math.sqrt(P[1]), 0, 0]
    x3 = [0, math.sqrt(P[2]), 0]
    rest = max(0.0, 1 - al * al - be * be) * P[3]
    x4 = [_sgn(a[0] * a[3]) * al * math.sqrt(P[3]), _sgn(a[2] * a[3]) * be * math.sqrt(P[3]), math.sqrt(rest)]
    varmap = {
        MessageLabel((1, 2, 4), (3,)): [1, 0, 0],
        MessageLabel((3, 4), (1, 2)): [0, 1, 0],
        MessageLabel((4,), (1,)): [0, 0, 1],
        "V": [1, 0, 0],
        "U": [0, 1, 0],
    }
    return varmap, [x1, x2, x3, x4], 3


PROP4_PARAM = GaussianParameterization(
    "prop4", ("alpha", "beta"), ((0.0, 1.0), (0.0, 1.0)), _prop4_builder,
    lambda v: v["alpha"] ** 2 + v["beta"] ** 2 <= 1 + 1e-12)


def prop4_objective(alpha, beta, a, b2, b3, P):
    """Three successive-decoding rates for the rank-one four-input network (vectorised in alpha, beta)."""
    a1, a2, a3, a4 = np.abs(np.asarray(a, dtype=float))
    P1, P2, P3, P4 = P
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    n4 = a4 ** 2 * np.maximum(0.0, 1 - alpha ** 2 - beta ** 2) * P4
    s3 = (a3 * math.sqrt(P3) + a4 * beta * math.sqrt(P4)) ** 2
    s1 = (a1 * math.sqrt(P1) + a2 * math.sqrt(P2) + a4 * alpha * math.sqrt(P4)) ** 2
    return _psi(n4) + _psi(s3 / (n4 + b2 ** 2)) + _psi(s1 / (s3 + n4 + (b2 * b3) ** 2))


# ---- two-transmitter / two-receiver network with a shared auxiliary ----------------------------


def cross_gains(a, b):
    return np.array([[1.0, a], [b, 1.0]])


def _prop5_builder(values, net):
    al, be = values["alpha"], values["beta"]
    P1, P2 = np.asarray(net.powers, dtype=float)
    # factors: W (common), X~1, X~2
    x1 = [al * math.sqrt(P1), math.sqrt(max(0.0, 1 - al * al) * P1), 0]
    x2 = [be * math.sqrt(P2), 0, math.sqrt(max(0.0, 1 - be * be) * P2)]
    varmap = {
        MessageLabel((1, 2), (2,)): [1, 0, 0],
        MessageLabel((1,), (1,)): [0, 1, 0],
        MessageLabel((2,), (1,)): [0, 0, 1],
        "W": [1, 0, 0],
    }
    return varmap, [x1, x2], 3


PROP5_PARAM = GaussianParameterization("prop5", ("alpha", "beta"), ((-1.0, 1.0), (-1.0, 1.0)), _prop5_builder)


def prop5_objective(alpha, beta, a, b, P1, P2):
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    ra, rb = 1 - alpha ** 2, 1 - beta ** 2
    first = _psi(ra * P1 + a * a * rb * P2)
    num = b * b * alpha ** 2 * P1 + beta ** 2 * P2 + 2 * b * alpha * beta * math.sqrt(P1 * P2)
    return first + _psi(num / (b * b * ra * P1 + rb * P2 + 1))


# ---- optimiser ---------------------------------------------------------------------------------


def _polish(f, x, lo, hi, step, min_step=1e-8, max_iter=200000):
    x = list(x)
    best = float(f(*x))
    it = 0
    while step >= min_step and it < max_iter:
        moved = False
        for k in range(len(x)):
            for d in (step, -step):
                y = list(x)
                y[k] = min(hi[k], max(lo[k], y[k] + d))
                if y[k] == x[k]:
                    continue
                v = float(f(*y))
                if v > best:
                    x, best, moved = y, v, True
                    break
            it += 1
        if not moved:
            step /= 2
    return best, x


def maximize_box(f, lo, hi, points=201, seeds=()):
    """Uniform grid over a box, lowest flat index wins ties, then shrinking-step coordinate polish."""
    axes = [np.linspace(l, h, points) for l, h in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    vals = np.asarray(f(*mesh), dtype=float)
    k = int(np.argmax(vals))
    idx = np.unravel_index(k, vals.shape)
    start = [ax[i] for ax, i in zip(axes, idx)]
    start_val = vals[idx]
    for s in seeds:
        v = float(f(*s))
        if v > start_val:
            start, start_val = list(s), v
    spacing = max((h - l) / (points - 1) for l, h in zip(lo, hi)) if points > 1 else 1.0
    return _polish(f, start, lo, hi, spacing)


def _check_powers(P):
    if any(p < 0 for p in P):
        raise ValueError("powers must be nonnegative")


def prop4_capacity(a, b2, b3, P, points=201):
    """Sum-rate of the rank-one four-input network. Returns (value, alpha, beta)."""
    _check_powers(P)
    if b2 < 1 or b3 < 1:
        raise ValueError("degradedness ratios must be >= 1")
    # the feasible quarter disc is a box in polar coordinates
    f = lambda r, t: prop4_objective(r * np.cos(t), r * np.sin(t), a, b2, b3, P)
    val, (r, t) = maximize_box(f, (0.0, 0.0), (1.0, math.pi / 2), points)
    return val, r * math.cos(t), r * math.sin(t)


def _check_prop5(a, b):
    if abs(a * b - 1) > 1e-9 or abs(a) < 1:
        warnings.warn("gains do not satisfy ab = 1, |a| >= 1; evaluating the formula anyway", stacklevel=3)


def prop5_capacity(a, b, P1, P2, points=201, seeds=()):
    _check_powers((P1, P2))
    _check_prop5(a, b)
    f = lambda al, be: prop5_objective(al, be, a, b, P1, P2)
    val, (al, be) = maximize_box(f, (-1.0, -1.0), (1.0, 1.0), points, seeds)
    return val, al, be


def _max_1d(f, points=201, seeds=()):
    val, (x,) = maximize_box(f, (-1.0,), (1.0,), points, seeds)
    return val, x


def sweep_prop5(a, b, ratio, pmin, pmax, points, grid=201):
    """Rows (P, optimum, best with alpha = 1, best with beta = 1) for P1 = P, P2 = P / ratio."""
    _check_prop5(a, b)
    Ps = np.linspace(pmin, pmax, points) if points > 1 else np.array([float(pmin)])
    rows = []
    prev = None
    for P in Ps:
        P1, P2 = float(P), float(P) / ratio
        seeds = [prev[0]] if prev else []
        opt, al, be = prop5_capacity(a, b, P1, P2, grid, seeds)
        s_a = [prev[1]] if prev else []
        s_b = [prev[2]] if prev else []
        va, xb = _max_1d(lambda be_: prop5_objective(1.0, be_, a, b, P1, P2), grid, s_a)
        vb, xa = _max_1d(lambda al_: prop5_objective(al_, 1.0, a, b, P1, P2), grid, s_b)
        prev = ((al, be), (xb,), (xa,))
        rows.append((float(P), opt, va, vb))
    return rows


def sweep_csv(rows):
    lines = ["P,optimal,alpha1,beta1"]
    for r in rows:
        lines.append(",".join(f"{v:.12g}" for v in r))
    return "\n".join(lines) + "\n"
