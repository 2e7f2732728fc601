"""Derivative-free sharpness probing for the verified inequalities.

The search maximizes LHS/RHS over function values with additive,
multiplicative, and sign-flip coordinate moves, re-centering the
zero-mean variable after every move where the hypothesis requires it.
The objective is scale-invariant in each function separately, so the
climb works inside a fixed box.  Ratios certified above 1 would indicate
an implementation bug; any excess beyond 1e-9 is re-checked (exactly for
the root-free target, at 113-bit precision otherwise) before being
reported as a violation certificate.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasibleProblem, InputError, TooManyFreeParameters
from .norms import Lp
from .scalars import DOUBLE_PRECISION, INF, QUAD_PRECISION, binary_context, \
    format_exponent, to_binary
from . import norms as norms_mod
from .spaces import DiscreteSpace, SimpleFunction, center, instance_to_json
from .verify import thm32_sides, thm41_sides, thm43_sides, validate_exponents

TARGETS = ("thm32-ratio", "thm41-ratio", "thm43-ratio")

RATIO_CAP_SLACK = 1e-9
VALUE_BOX = 4.0

#: float-mode reading of the RHS > 0 domain constraint.  Both sides are
#: 1-homogeneous in each function, so every attainable ratio also occurs
#: at RHS of order one; below this floor the quotient is dominated by
#: cancellation noise rather than by the inequality.
RHS_FLOOR = 1e-4


@dataclass(frozen=True)
class SearchProblem:
    target: str
    atoms: int = 2
    weights: tuple = None          # defaults to equal weights
    exponents: tuple = None        # thm41-ratio
    norm: object = None            # thm43-ratio

    def __post_init__(self):
        if self.target not in TARGETS:
            raise InputError(f"unknown search target {self.target!r}")
        if self.atoms < 2:
            raise InfeasibleProblem(
                "a single atom forces RHS = 0 on every admissible instance"
            )
        if self.target == "thm41-ratio":
            exps = self.exponents or (Fraction(1), INF, Fraction(1), INF, Fraction(1))
            object.__setattr__(self, "exponents", validate_exponents(exps))
        if self.target == "thm43-ratio" and self.norm is None:
            object.__setattr__(self, "norm", Lp(2))

    @property
    def free_functions(self):
        return ("f", "g", "h") if self.target == "thm32-ratio" else ("f", "g")

    def space(self) -> DiscreteSpace:
        if self.weights is not None:
            return DiscreteSpace(tuple(float(w) for w in self.weights))
        n = self.atoms
        return DiscreteSpace(tuple(1.0 / n for _ in range(n)))

    def canonical_dict(self) -> dict:
        out = {"target": self.target, "atoms": self.atoms}
        if self.exponents is not None:
            out["exponents"] = [format_exponent(p) for p in self.exponents]
        if self.norm is not None:
            out["norm"] = norms_mod.norm_to_json(self.norm)
        return out


@dataclass
class SearchResult:
    target: str
    best_ratio: float
    best_instance: dict
    trace: list          # (iteration, best-so-far ratio) at improvements
    restarts: int
    violation: dict = None
    config: dict = None

    def to_json_dict(self) -> dict:
        return {
            "target": self.target,
            "best_ratio": repr(self.best_ratio),
            "best_instance": self.best_instance,
            "trace": [[i, repr(r)] for i, r in self.trace],
            "restarts": self.restarts,
            "violation": self.violation,
            "config": self.config,
        }


def _state_functions(problem: SearchProblem, state: dict, space: DiscreteSpace):
    funcs = {}
    for name in problem.free_functions:
        f = SimpleFunction(tuple(state[name]), space)
        if name == "g" and problem.target == "thm32-ratio":
            f = center(f)
        funcs[name] = f
    return funcs


def _sides(problem: SearchProblem, funcs):
    if problem.target == "thm32-ratio":
        return thm32_sides(funcs["f"], funcs["g"], funcs["h"])
    if problem.target == "thm41-ratio":
        return thm41_sides(funcs["f"], funcs["g"], problem.exponents,
                           precision=DOUBLE_PRECISION)
    forms = thm43_sides(funcs["f"], funcs["g"], problem.norm,
                        precision=DOUBLE_PRECISION)
    return forms["norm_form"]


def _ratio(problem: SearchProblem, state: dict, space: DiscreteSpace):
    """LHS/RHS, or None when RHS is (numerically) zero and the instance
    falls outside the search domain."""
    funcs = _state_functions(problem, state, space)
    lhs, rhs = _sides(problem, funcs)
    if rhs <= RHS_FLOOR:
        return None
    return float(lhs) / float(rhs)


def _search_rng(seed: int, restart: int) -> random.Random:
    digest = hashlib.sha256(f"search:{seed}:{restart}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _initial_state(problem, rng, space):
    for _ in range(100):
        state = {
            name: [rng.uniform(-1.0, 1.0) for _ in range(problem.atoms)]
            for name in problem.free_functions
        }
        if _ratio(problem, state, space) is not None:
            return state
    # canonical feasible fallback: alternating signs keep RHS positive
    state = {
        name: [1.0 if i % 2 == 0 else -1.0 for i in range(problem.atoms)]
        for name in problem.free_functions
    }
    state["f"] = [1.0] * problem.atoms
    if _ratio(problem, state, space) is None:
        raise InfeasibleProblem("could not find an instance with RHS > 0")
    return state


def _climb(problem, rng, space, iters):
    state = _initial_state(problem, rng, space)
    best = _ratio(problem, state, space)
    trace = [(0, best)]
    coords = [
        (name, i) for name in problem.free_functions for i in range(problem.atoms)
    ]
    step = 0.5
    iteration = 0
    stalled = 0
    while iteration < iters and step > 1e-11:
        name, idx = coords[iteration % len(coords)]
        iteration += 1
        v = state[name][idx]
        candidates = [
            v + step, v - step, v * (1.0 + step), v * (1.0 - step), -v,
        ]
        improved = False
        for cand in candidates:
            cand = max(-VALUE_BOX, min(VALUE_BOX, cand))
            state[name][idx] = cand
            r = _ratio(problem, state, space)
            if r is not None and r > best:
                best = r
                v = cand
                improved = True
                trace.append((iteration, best))
            state[name][idx] = v
        if improved:
            stalled = 0
        else:
            stalled += 1
            if stalled >= len(coords):
                step *= 0.5
                stalled = 0
    return best, state, trace


def _excess_certificate(problem, state, space, ratio):
    """Re-check a ratio beyond 1 + 1e-9; a confirmed excess is a bug
    certificate, not a discovery."""
    funcs = _state_functions(problem, state, space)
    if problem.target == "thm32-ratio":
        exact_space = DiscreteSpace(tuple(Fraction(w) for w in space.weights))
        exact = {
            k: SimpleFunction(tuple(Fraction(v) for v in f.values), exact_space)
            for k, f in funcs.items()
        }
        lhs, rhs = thm32_sides(exact["f"], exact["g"], exact["h"])
        confirmed = lhs > rhs
        mode = "exact"
    else:
        with binary_context(QUAD_PRECISION):
            quad_space = DiscreteSpace(tuple(
                to_binary(Fraction(w), QUAD_PRECISION) for w in space.weights
            ))
            quad = {
                k: SimpleFunction(tuple(
                    to_binary(Fraction(v), QUAD_PRECISION) for v in f.values
                ), quad_space)
                for k, f in funcs.items()
            }
            if problem.target == "thm41-ratio":
                lhs, rhs = thm41_sides(quad["f"], quad["g"],
                                       problem.exponents,
                                       precision=QUAD_PRECISION)
            else:
                lhs, rhs = thm43_sides(quad["f"], quad["g"], problem.norm,
                                       precision=QUAD_PRECISION)["norm_form"]
            confirmed = float(lhs) > float(rhs) * (1.0 + 1e-25)
        mode = f"float{QUAD_PRECISION}"
    if not confirmed:
        return None
    return {
        "ratio": repr(ratio),
        "instance": instance_to_json(space, funcs),
        "recheck_mode": mode,
    }


def search(problem: SearchProblem, iters: int, restarts: int,
           seed: int = 0, threads: int = 1) -> SearchResult:
    """Coordinate hill climbing from seeded restarts; deterministic in
    (problem, iters, restarts, seed) and independent of restart order or
    thread schedule (results reduce in restart order)."""
    if iters < 1 or restarts < 1:
        raise InputError("iters and restarts must be >= 1")
    space = problem.space()

    def one(restart: int):
        return _climb(problem, _search_rng(seed, restart), space, iters)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one, range(restarts)))
    else:
        outcomes = [one(restart) for restart in range(restarts)]
    best_idx = 0
    for i, (ratio, _, _) in enumerate(outcomes):
        if ratio > outcomes[best_idx][0]:
            best_idx = i
    best, state, trace = outcomes[best_idx]
    funcs = _state_functions(problem, state, space)
    violation = None
    if best > 1.0 + RATIO_CAP_SLACK:
        violation = _excess_certificate(problem, state, space, best)
    return SearchResult(
        target=problem.target,
        best_ratio=best,
        best_instance=instance_to_json(space, funcs),
        trace=[(i, r) for i, r in trace],
        restarts=restarts,
        violation=violation,
        config=dict(problem.canonical_dict(), iters=iters, seed=seed),
    )


# ---------------------------------------------------------------------------
# ratio landscapes (two-atom parameter families)

def landscape_rows(problem: SearchProblem, grid: int,
                   lo: float = -2.0, hi: float = 2.0):
    """Tabulate LHS, RHS, and their ratio along the one-parameter family
    f = (1, t) with g = (1, -1) fixed (and h = (-1, 1) for the
    rearrangement-bound target); requires the two-atom space."""
    if problem.atoms != 2:
        raise TooManyFreeParameters(
            "landscapes need the two-atom symmetry reduction"
        )
    if grid < 1:
        raise InputError("grid resolution must be >= 1")
    space = problem.space()
    points = [lo] if grid == 1 else [
        lo + (hi - lo) * k / (grid - 1) for k in range(grid)
    ]
    rows = []
    for t in points:
        state = {"f": [1.0, t], "g": [1.0, -1.0]}
        if problem.target == "thm32-ratio":
            state["h"] = [-1.0, 1.0]
        funcs = _state_functions(problem, state, space)
        lhs, rhs = _sides(problem, funcs)
        lhs, rhs = float(lhs), float(rhs)
        rows.append({
            "param1": t,
            "param2": "",
            "lhs": lhs,
            "rhs": rhs,
            "ratio": lhs / rhs if rhs != 0 else "",
        })
    return rows


def landscape_csv(rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["param1", "param2", "lhs", "rhs", "ratio"])
    for row in rows:
        writer.writerow([
            repr(row["param1"]),
            row["param2"],
            repr(row["lhs"]),
            repr(row["rhs"]),
            repr(row["ratio"]) if row["ratio"] != "" else "",
        ])
    return buf.getvalue()
