import json
from fractions import Fraction as F

import pytest

from rearrange_lab.errors import InputError
from rearrange_lab.norms import ConcaveWeight, L1, LorentzLambda, Lp
from rearrange_lab.scalars import INF
from rearrange_lab.spaces import integrate
from rearrange_lab.verify import (TrialConfig, canonical_hash, canonical_json,
                                  generate_instance, run_suite, thm32_sides,
                                  thm41_sides, thm43_sides,
                                  validate_exponents)

PHI = ConcaveWeight(((0, 0), (F(1, 4), F(1, 2)), (1, 1)))


def test_exponent_validation():
    validate_exponents((F(1), INF, F(1), INF, F(1)))
    validate_exponents((F(2), INF, F(2), INF, F(2)))
    validate_exponents((F(1), INF, F(1), F(4), F(4, 3)))
    validate_exponents((F(1), F(2), F(2), F(3), F(3, 2)))
    with pytest.raises(InputError):
        validate_exponents((F(1), F(2), F(2), F(3), F(3)))
    with pytest.raises(InputError):
        validate_exponents((F(1), F(2), F(2)))
    with pytest.raises(InputError):
        validate_exponents((F(1, 2), F(1), F(1), F(1), F(1)))


def test_config_validation():
    with pytest.raises(InputError):
        TrialConfig(suite="thm99")
    with pytest.raises(InputError):
        TrialConfig(suite="thm41", mode="exact",
                    exponents=(F(1), F(2), F(2), F(2), F(2)))
    TrialConfig(suite="thm41", mode="exact")  # default tuple is root-free
    with pytest.raises(InputError):
        TrialConfig(suite="thm43", mode="exact", norm=Lp(2))
    TrialConfig(suite="thm43", mode="exact", norm=L1)
    TrialConfig(suite="thm43", mode="exact", norm=LorentzLambda(PHI))


def test_generator_determinism_and_contracts():
    cfg = TrialConfig(suite="thm32", atoms=5, trials=10, seed=3)
    a = generate_instance(cfg, 500)
    b = generate_instance(cfg, 500)
    assert a.space.weights == b.space.weights
    assert all(a.functions[k].values == b.functions[k].values for k in a.functions)
    assert integrate(a.functions["g"]) == 0  # centered exactly
    c = generate_instance(cfg, 501)
    assert any(a.functions[k].values != c.functions[k].values for k in a.functions)


def test_generator_lemma31_lattices():
    cfg = TrialConfig(suite="lemma31", atoms=6, trials=10, seed=1)
    for idx in range(200, 220):
        inst = generate_instance(cfg, idx)
        assert all(v in (-1, 0, 1) for v in inst.functions["f"].values)
        assert all(abs(v) <= 1 for v in inst.functions["h"].values)
        assert integrate(inst.functions["g"]) == 0


def test_generator_two_level_fixtures():
    cfg = TrialConfig(suite="thm32", atoms=4, trials=200, seed=0)
    seen_patterns = set()
    for idx in range(128):
        inst = generate_instance(cfg, idx)
        g = inst.functions["g"]
        assert g.values == (1, 1, -1, -1, 0, 0)
        f = inst.functions["f"]
        pattern = tuple(bool(f.values[i]) for i in (0, 2, 4))
        seen_patterns.add(pattern)
        assert integrate(g) == 0
    assert len(seen_patterns) == 8


def test_generator_weight_schemes():
    cfg = TrialConfig(suite="rearrange", atoms=4, weight_scheme="random-rational",
                      trials=10, seed=5)
    inst = generate_instance(cfg, 3)
    assert sum(inst.space.weights) == 1
    assert all(w > 0 for w in inst.space.weights)
    eq = generate_instance(TrialConfig(suite="rearrange", atoms=4, trials=10), 3)
    assert eq.space.equal_atoms


def test_thm32_sides_fixtures():
    from rearrange_lab.spaces import equal_space, simple
    sp = equal_space(2)
    f, g = simple((1, 1), sp), simple((1, -1), sp)
    assert thm32_sides(f, g, simple((-1, 1), sp)) == (2, 2)
    lhs, rhs = thm32_sides(f, g, simple((1, -1), sp))
    assert rhs - lhs == 4
    zero = simple((0, 0), sp)
    assert thm32_sides(f, zero, simple((1, -1), sp)) == (0, 0)


def test_suites_run_clean_smoke():
    for suite, kwargs in (
        ("thm32", {}),
        ("lemma31", {}),
        ("thm41", {"mode": "float",
                   "exponents": (F(1), INF, F(1), F(4), F(4, 3))}),
        ("thm43", {"mode": "float", "norm": LorentzLambda(PHI)}),
        ("rearrange", {}),
    ):
        cfg = TrialConfig(suite=suite, atoms=3, trials=150, seed=2, **kwargs)
        rep = run_suite(cfg)
        assert rep.trials == 150
        assert not rep.violations
        assert rep.min_gap >= (0 if cfg.mode == "exact" else -1e-9)


def test_report_reproducible_and_canonical():
    cfg = TrialConfig(suite="thm32", atoms=3, trials=120, seed=9)
    doc1 = run_suite(cfg).to_json_dict()
    doc2 = run_suite(cfg).to_json_dict()
    assert canonical_json(doc1) == canonical_json(doc2)
    assert canonical_hash(doc1) == canonical_hash(doc2)
    # a timestamp does not change the canonical hash
    stamped = dict(doc1, timestamp="2026-08-10T00:00:00")
    assert canonical_hash(stamped) == canonical_hash(doc1)
    assert json.loads(canonical_json(doc1)) == doc1


def test_report_threads_equivalent():
    base = dict(suite="lemma31", atoms=4, trials=200, seed=4)
    docs = [
        canonical_json(run_suite(TrialConfig(**base, threads=t)).to_json_dict())
        for t in (1, 2, 8)
    ]
    assert docs[0] == docs[1] == docs[2]
    assert '"threads"' not in docs[0]  # execution detail stays out of the report


def test_histogram_counts_sum_to_trials():
    cfg = TrialConfig(suite="thm32", atoms=4, trials=300, seed=1)
    rep = run_suite(cfg)
    assert sum(rep.histogram.values()) == 300
    assert rep.histogram["violation"] == 0


def test_report_argmin_is_regenerable():
    cfg = TrialConfig(suite="thm32", atoms=3, trials=200, seed=12)
    rep = run_suite(cfg)
    inst = generate_instance(cfg, rep.argmin_index)
    assert rep.argmin_instance == inst.to_json()


def test_thm43_lp2_matches_thm41_tuple_on_shared_instances():
    exps = (F(2), INF, F(2), INF, F(2))
    cfg = TrialConfig(suite="thm43", atoms=4, trials=300, seed=21,
                      mode="float", norm=Lp(2))
    cfg41 = TrialConfig(suite="thm41", atoms=4, trials=300, seed=21,
                        mode="float", exponents=exps)
    for idx in range(300):
        inst43 = generate_instance(cfg, idx)
        inst41 = generate_instance(cfg41, idx)
        assert inst43.to_json() == inst41.to_json()  # shared instances
        f, g = inst43.functions["f"], inst43.functions["g"]
        lhs43, rhs43 = thm43_sides(f, g, Lp(2), precision=53)["norm_form"]
        lhs41, rhs41 = thm41_sides(f, g, exps, precision=53)
        scale = max(1.0, abs(float(rhs41)))
        assert abs(float(lhs43) - float(lhs41)) <= 1e-12 * scale
        assert abs(float(rhs43) - float(rhs41)) <= 1e-12 * scale


def test_judges_certify_real_violations():
    """Feed the judges an impossible pair of sides to confirm the
    certificate machinery emits (and that grazes stay uncertified)."""
    from rearrange_lab.verify import _judge_rootfree, _judge_rooted
    cfg = TrialConfig(suite="thm32", atoms=2, trials=1, seed=0)
    inst = generate_instance(cfg, 0)
    out = _judge_rootfree(cfg, inst, "thm32", F(3), F(1), lambda: (F(3), F(1)))
    assert out.violation is not None
    assert out.violation["recheck"]["mode"] == "exact"
    out = _judge_rootfree(cfg, inst, "thm32", F(1), F(3), lambda: (F(1), F(3)))
    assert out.violation is None and not out.graze

    fcfg = TrialConfig(suite="thm41", atoms=2, trials=1, seed=0, mode="float")
    graze = _judge_rooted(fcfg, inst, "thm41", 1.0 + 1e-13, 1.0,
                          lambda: (F(1), F(1)))
    assert graze.graze and graze.violation is None
    real = _judge_rooted(fcfg, inst, "thm41", 2.0, 1.0, lambda: (F(2), F(1)))
    assert real.violation is not None
    assert "float113" in real.violation["recheck"]["mode"]
