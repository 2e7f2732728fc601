"""Rearrangement-invariant norms and their associate (Koethe dual) norms.

Four descriptor kinds are provided: ``Lp`` (including the sup norm at
p = inf), ``LorentzLambda`` with a concave piecewise-linear weight,
``Generated`` (the norm f -> ||f|^p|_X^(1/p)), and ``Associate``.  Every
kind evaluates both on simple functions and on step profiles; the value
depends only on the decreasing rearrangement.

Lorentz and associate kinds insist on equal atom weights.  Associate
norms of Lp and Lorentz kinds use closed forms; the second associate of a
Lorentz norm is evaluated by linear programming over its polytope unit
ball, which keeps it independent of the closed forms it is checked
against.  A derivative-free pairing maximizer is included as a separate
oracle for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import ExactUnavailable, InputError, NonEqualAtomSpace
from .rearrange import StepProfile, decreasing_rearrangement, make_profile, \
    profile_integrate_product
from .scalars import DOUBLE_PRECISION, INF, binary_context, format_exponent, \
    format_scalar, parse_exponent, parse_scalar, to_binary
from .spaces import DiscreteSpace, SimpleFunction


# ---------------------------------------------------------------------------
# descriptors

@dataclass(frozen=True)
class ConcaveWeight:
    """Piecewise-linear phi on [0,1] with phi(0)=0, phi(1)=1, concave and
    nondecreasing."""

    breakpoints: tuple  # ((t, phi(t)), ...)

    def __post_init__(self):
        pts = tuple((Fraction(t), Fraction(v)) for t, v in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if len(pts) < 2 or pts[0] != (0, 0) or pts[-1][0] != 1 or pts[-1][1] != 1:
            raise InputError("weight must run from (0,0) to (1,1)")
        ts = [t for t, _ in pts]
        vs = [v for _, v in pts]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise InputError("weight abscissae must be strictly increasing")
        if any(b < a for a, b in zip(vs, vs[1:])):
            raise InputError("weight must be nondecreasing")
        slopes = [
            (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i]) for i in range(len(ts) - 1)
        ]
        if any(b > a for a, b in zip(slopes, slopes[1:])):
            raise InputError("weight must be concave (nonincreasing slopes)")

    def __call__(self, t):
        if t <= 0:
            return Fraction(0)
        pts = self.breakpoints
        if t >= 1:
            return pts[-1][1]
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t <= t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        return pts[-1][1]


@dataclass(frozen=True)
class Lp:
    p: object  # Fraction >= 1 or INF

    def __post_init__(self):
        p = self.p if self.p == INF else Fraction(self.p)
        object.__setattr__(self, "p", p)
        if p != INF and p < 1:
            raise InputError("Lp needs p >= 1")


@dataclass(frozen=True)
class LorentzLambda:
    phi: ConcaveWeight


@dataclass(frozen=True)
class Generated:
    base: object
    p: object

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if self.p < 1:
            raise InputError("generated norms need p >= 1")


@dataclass(frozen=True)
class Associate:
    base: object


L1 = Lp(1)
L2 = Lp(2)
LINF = Lp(INF)


def dual_exponent(p):
    if p == INF:
        return Fraction(1)
    p = Fraction(p)
    if p == 1:
        return INF
    return p / (p - 1)


def _simplify(X):
    """Collapse Associate(Lp) chains to their closed-form Lp descriptor."""
    if isinstance(X, Associate):
        base = _simplify(X.base)
        if isinstance(base, Lp):
            return Lp(dual_exponent(base.p))
        return Associate(base)
    return X


def requires_equal_atoms(X) -> bool:
    if isinstance(X, Lp):
        return False
    if isinstance(X, Generated):
        return requires_equal_atoms(X.base)
    return True  # Lorentz and associate kinds


def exactly_evaluable(X) -> bool:
    """Whether the norm can be computed without an inexact root or an LP."""
    X = _simplify(X)
    if isinstance(X, Lp):
        return X.p == INF or X.p == 1
    if isinstance(X, LorentzLambda):
        return True
    if isinstance(X, Generated):
        return X.p == 1 and exactly_evaluable(X.base)
    if isinstance(X, Associate):
        return isinstance(X.base, LorentzLambda)
    return False


# ---------------------------------------------------------------------------
# evaluation helpers

def _as_binary(x, precision):
    if isinstance(x, mpmath.mpf):
        return x
    if precision == DOUBLE_PRECISION:
        return float(x)
    return to_binary(Fraction(x), precision)  # floats convert exactly


def _power(x, p, precision):
    """x^p for x >= 0; integer p stays in the input arithmetic."""
    p = Fraction(p)
    if p.denominator == 1:
        return x ** p.numerator
    if precision is None and isinstance(x, (int, Fraction)):
        raise ExactUnavailable(f"fractional power {p} has no exact value")
    prec = precision or DOUBLE_PRECISION
    xb = _as_binary(x, prec)
    if isinstance(xb, mpmath.mpf):
        return xb ** (mpmath.mpf(p.numerator) / p.denominator)
    return xb ** (p.numerator / p.denominator)


def _root(x, p, precision):
    if p == 1:
        return x
    if precision is None and isinstance(x, (int, Fraction)):
        raise ExactUnavailable(f"{p}-th root has no exact value")
    prec = precision or DOUBLE_PRECISION
    xb = _as_binary(x, prec)
    if isinstance(xb, mpmath.mpf):
        pf = Fraction(p)
        return xb ** (mpmath.mpf(pf.denominator) / pf.numerator)
    return xb ** (1.0 / float(p))


def _profile_of(f) -> StepProfile:
    if isinstance(f, StepProfile):
        return f
    return decreasing_rearrangement(f)


def _check_space(X, f):
    if isinstance(f, SimpleFunction) and requires_equal_atoms(X) \
            and not f.space.equal_atoms:
        raise NonEqualAtomSpace(
            f"{type(_simplify(X)).__name__} norms need equal atom weights"
        )


# ---------------------------------------------------------------------------
# the norm

def norm(X, f, *, precision=None):
    """Evaluate the norm described by X on a SimpleFunction or StepProfile.

    ``precision=None`` demands exact arithmetic and raises
    ExactUnavailable when a fractional root or an LP step is involved;
    an integer selects the binary significand width for those steps.
    """
    _check_space(X, f)  # the descriptor as written, not its simplification
    X = _simplify(X)
    with binary_context(precision or DOUBLE_PRECISION):
        return _norm(X, f, precision)


def _norm(X, f, precision):
    if isinstance(X, Lp):
        return _lp_norm(X.p, f, precision)
    if isinstance(X, LorentzLambda):
        return _lorentz_norm(X.phi, _profile_of(f))
    if isinstance(X, Generated):
        prof = _profile_of(f)
        powered = make_profile(
            (_power(v, X.p, precision), l) for v, l in prof.segments
        )
        return _root(_norm(_simplify(X.base), powered, precision), X.p, precision)
    if isinstance(X, Associate):
        base = X.base  # already simplified; not an Lp
        if isinstance(base, LorentzLambda):
            return _lorentz_associate_norm(base.phi, _profile_of(f))
        if isinstance(base, Associate) and isinstance(base.base, LorentzLambda):
            return _second_associate_lp(base.base.phi, _profile_of(f), precision)
        raise InputError(
            f"no associate evaluation for base kind {type(base).__name__}"
        )
    raise InputError(f"unknown norm descriptor {X!r}")


def _lp_norm(p, f, precision):
    if isinstance(f, SimpleFunction):
        pairs = list(zip((abs(v) for v in f.values), f.space.weights))
    else:
        pairs = list(f.segments)
    if p == INF:
        return max((v for v, _ in pairs), default=Fraction(0))
    p = Fraction(p)
    total = sum((_power(v, p, precision) * w for v, w in pairs), start=Fraction(0))
    return _root(total, p, precision)


def _lorentz_norm(phi: ConcaveWeight, prof: StepProfile):
    """Stieltjes sum of the profile against d(phi)."""
    total = Fraction(0)
    cuts = prof.boundaries()
    for (v, _), a, b in zip(prof.segments, cuts, cuts[1:]):
        total = total + v * (phi(min(b, 1)) - phi(min(a, 1)))
    return total


def _partial_integrals(prof: StepProfile, cuts):
    """H(s) = integral of the profile over [0, s] for each cut s."""
    out = []
    for s in cuts:
        total = Fraction(0)
        bounds = prof.boundaries()
        for (v, _), a, b in zip(prof.segments, bounds, bounds[1:]):
            if s <= a:
                break
            total = total + v * (min(b, s) - a)
        out.append(total)
    return out


def _lorentz_associate_norm(phi: ConcaveWeight, prof: StepProfile):
    """sup over s in (0,1] of H(s)/phi(s) with H the running integral.

    Both H and phi are piecewise linear, so the sup is attained at a
    breakpoint of either; on an equal-atom space this reduces to the
    partial-sum formula max_k (sum of the k largest |h| values / n) /
    phi(k/n).
    """
    cuts = sorted(
        {min(b, Fraction(1)) for b in prof.boundaries()}
        | {t for t, _ in phi.breakpoints}
        | {Fraction(1)}
    )
    cuts = [c for c in cuts if c > 0]
    best = Fraction(0)
    hs = _partial_integrals(prof, cuts)
    for s, h in zip(cuts, hs):
        ratio = h / phi(s)
        if ratio > best:
            best = ratio
    return best


def _second_associate_lp(phi: ConcaveWeight, prof: StepProfile, precision):
    """||f|| in the second associate of a Lorentz norm, by maximizing the
    pairing over the polytope unit ball of the first associate.

    The ball {h nonincreasing >= 0 : integral_0^s h <= phi(s) for all s}
    admits step-function optimizers on the merged breakpoint grid, so the
    problem is a finite LP (solved in double precision with HiGHS).
    """
    if precision is None:
        raise ExactUnavailable("the second-associate LP is float-based")
    from scipy.optimize import linprog

    grid = sorted(
        {min(b, Fraction(1)) for b in prof.boundaries()}
        | {t for t, _ in phi.breakpoints}
        | {Fraction(0), Fraction(1)}
    )
    lengths = [float(b - a) for a, b in zip(grid, grid[1:])]
    m = len(lengths)
    fvals = []
    for a in grid[:-1]:
        fvals.append(float(prof(a)))
    c = [-(fv * l) for fv, l in zip(fvals, lengths)]  # maximize sum f*_j L_j h_j
    a_ub, b_ub = [], []
    for j in range(m):  # cumulative mass caps at every grid point
        row = [lengths[i] if i <= j else 0.0 for i in range(m)]
        a_ub.append(row)
        b_ub.append(float(phi(grid[j + 1])))
    for j in range(m - 1):  # h nonincreasing
        row = [0.0] * m
        row[j], row[j + 1] = -1.0, 1.0
        a_ub.append(row)
        b_ub.append(0.0)
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * m, method="highs")
    if not res.success:
        raise InputError(f"second-associate LP failed: {res.message}")
    return -res.fun


# ---------------------------------------------------------------------------
# checks

def associate_norm(X, h, *, precision=None):
    """||h|| in the associate space of X (closed forms for Lp and Lorentz)."""
    return norm(Associate(X), h, precision=precision)


def hardy_littlewood_check(f: SimpleFunction, g: SimpleFunction):
    """Return (integral of |fg| d(mu), integral of f* g*); the first never
    exceeds the second."""
    if f.space.weights != g.space.weights:
        raise InputError("functions live on different spaces")
    lhs = sum(abs(a * b) * w for a, b, w in zip(f.values, g.values, f.space.weights))
    rhs = profile_integrate_product(
        [decreasing_rearrangement(f), decreasing_rearrangement(g)]
    )
    return lhs, rhs


def holder_check(X, f: SimpleFunction, g: SimpleFunction, *, precision=None):
    """The three-term chain: integral of |fg|, the sorted pairing, and
    ||f||_X ||g||_X'; each term bounds the one before it."""
    lhs, mid = hardy_littlewood_check(f, g)
    right = norm(X, f, precision=precision) * norm(
        Associate(X), g, precision=precision
    )
    return lhs, mid, right


def lorentz_luxemburg_check(X, f: SimpleFunction, *, precision=DOUBLE_PRECISION):
    """Return (||f||_X, ||f||_X'') computed down independent routes."""
    return (
        norm(X, f, precision=precision),
        norm(Associate(Associate(X)), f, precision=precision),
    )


# ---------------------------------------------------------------------------
# brute-force pairing oracle (independent of the closed forms)

def _primal_ball_norm(X, n):
    """A self-contained evaluator of ||g||_X for nonincreasing g >= 0 on
    the equal n-atom space, written from the definitions rather than
    through `norm` so the oracle shares no code with the closed forms."""
    X = _simplify(X)
    if isinstance(X, Lp):
        if X.p == INF:
            return lambda g: g[0] if g else 0.0
        p = float(X.p)
        return lambda g: (sum(v**p for v in g) / n) ** (1.0 / p)
    if isinstance(X, LorentzLambda):
        deltas = [
            float(X.phi(Fraction(k, n)) - X.phi(Fraction(k - 1, n)))
            for k in range(1, n + 1)
        ]
        return lambda g: sum(v * d for v, d in zip(g, deltas))
    if isinstance(X, Generated):
        base = _primal_ball_norm(X.base, n)
        p = float(X.p)
        return lambda g: base([v**p for v in g]) ** (1.0 / p)
    space = DiscreteSpace(tuple(1.0 / n for _ in range(n)))
    return lambda g: float(
        norm(X, SimpleFunction(tuple(g), space), precision=DOUBLE_PRECISION)
    )


def _pairing_objective(cvec, n, X, precision):
    ball_norm = _primal_ball_norm(X, n)

    def ratio(tvec):
        g = []
        acc = 0.0
        for t in reversed(tvec):
            acc += max(t, 0.0)
            g.append(acc)
        g.reverse()
        denom = ball_norm(g)
        if denom == 0:
            return 0.0
        pairing = sum(c * gi for c, gi in zip(cvec, g)) / n
        return pairing / denom

    return ratio


def _golden_max(fun, lo, hi, iters=60):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return (a + b) / 2


def associate_norm_oracle(X, h: SimpleFunction, *, starts=32, seed=0,
                          precision=DOUBLE_PRECISION):
    """Maximize the pairing (1/n) sum h*_i g_i over nonincreasing g >= 0
    with ||g||_X <= 1, without using any dual closed form.

    Runs projected coordinate ascent (golden-section line searches over
    the decrement parameterization) from seeded random starts plus the
    flat-block candidates, then a Powell polish on the best points.
    """
    import random as _random

    from scipy.optimize import minimize

    n = h.space.n
    if not h.space.equal_atoms:
        raise NonEqualAtomSpace("the pairing oracle assumes equal atoms")
    cvec = sorted((abs(float(v)) for v in h.values), reverse=True)
    ratio = _pairing_objective(cvec, n, X, precision)
    rng = _random.Random(seed)

    start_points = [[1.0] * n] + [
        [1.0 if i == k else 0.0 for i in range(n)] for k in range(n)
    ]
    for _ in range(starts):
        start_points.append([rng.random() for _ in range(n)])

    best = 0.0
    best_points = []
    for t0 in start_points:
        t = list(t0)
        if sum(t) == 0:
            continue
        current = ratio(t)
        for _ in range(60):
            improved = False
            for k in range(n):
                span = sum(t) + 1.0
                saved = t[k]

                def line(x, k=k, t=t):
                    t[k] = x
                    val = ratio(t)
                    t[k] = saved
                    return val

                xbest = _golden_max(line, 0.0, 2.0 * span)
                if line(xbest) > current + 1e-15:
                    t[k] = xbest
                    current = ratio(t)
                    improved = True
            if not improved:
                break
        if current > best:
            best = current
        best_points.append((current, list(t)))

    best_points.sort(key=lambda pair: -pair[0])
    for _, t in best_points[:4]:
        res = minimize(
            lambda x: -ratio(list(x)),
            t,
            method="Powell",
            bounds=[(0.0, None)] * n,
            options={"xtol": 1e-12, "ftol": 1e-14, "maxiter": 4000},
        )
        best = max(best, -res.fun)
    return best


def lorentz_associate_exact_lp(phi: ConcaveWeight, h: SimpleFunction):
    """Exact pairing maximum over the Lorentz unit ball.

    Reparameterizing a nonincreasing candidate by its decrements turns
    the ball constraint into a single weighted-sum cap, so the optimum
    sits on a flat block 1_{1..k} scaled to unit norm; the exact maximum
    over those finitely many blocks is returned (all rational).
    """
    if not h.space.equal_atoms:
        raise NonEqualAtomSpace("exact LP oracle assumes equal atoms")
    n = h.space.n
    hstar = sorted((abs(Fraction(v)) for v in h.values), reverse=True)
    best = Fraction(0)
    running = Fraction(0)
    for k in range(1, n + 1):
        running += hstar[k - 1]
        height = 1 / phi(Fraction(k, n))
        pairing = running * height / n
        if pairing > best:
            best = pairing
    return best


# ---------------------------------------------------------------------------
# descriptor JSON

def norm_to_json(X) -> dict:
    if isinstance(X, Lp):
        return {"kind": "lp", "p": format_exponent(X.p)}
    if isinstance(X, LorentzLambda):
        return {
            "kind": "lorentz",
            "phi": [[format_scalar(t), format_scalar(v)]
                    for t, v in X.phi.breakpoints],
        }
    if isinstance(X, Generated):
        return {"kind": "generated", "base": norm_to_json(X.base),
                "p": format_scalar(Fraction(X.p))}
    if isinstance(X, Associate):
        return {"kind": "associate", "base": norm_to_json(X.base)}
    raise InputError(f"unknown norm descriptor {X!r}")


def norm_from_json(obj) -> object:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("norm descriptor must be an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "lp":
            return Lp(parse_exponent(obj["p"]))
        if kind == "lorentz":
            return LorentzLambda(ConcaveWeight(
                tuple((parse_scalar(t), parse_scalar(v)) for t, v in obj["phi"])
            ))
        if kind == "generated":
            return Generated(norm_from_json(obj["base"]), parse_scalar(obj["p"]))
        if kind == "associate":
            return Associate(norm_from_json(obj["base"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad norm descriptor: {exc}") from exc
    raise InputError(f"unknown norm kind {kind!r}")
