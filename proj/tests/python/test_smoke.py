import json
import math

import pytest

import epsbias


def test_groups():
    g = epsbias.FiniteGroup.parse("sym:3")
    assert g.order == 6
    assert g.mul(0, 4) == 4
    assert g.pow(3, 3) == 0
    assert not g.is_abelian()
    with pytest.raises(ValueError):
        epsbias.FiniteGroup.parse("nope:1")


def test_powering_set():
    s = epsbias.aghp_construct_q(2, 10, 32)
    assert s.size == 1024
    assert s.claimed_bias == pytest.approx(9 / 32)
    assert epsbias.char_bias_exact(s) <= 9 / 32 + 1e-12
    assert epsbias.bias_spectral(s) == pytest.approx(epsbias.char_bias_exact(s), abs=1e-9)


def test_certificate_round_trip():
    s = epsbias.abelian_biased_set(6, 2, 0.3)
    back = epsbias.BiasedSet.from_json(s.to_json())
    assert back.elements() == s.elements()
    assert back.content_digest() == s.content_digest()
    assert "digest" in json.loads(s.to_json())


def test_expander():
    g = epsbias.lps_graph(5, 13)
    assert g.side == 60
    assert g.degree == 14
    assert g.certified_lambda <= 2 * math.sqrt(13) / 14 + 1e-6
    assert epsbias.find_primes(1, 0.9) == (13, 5)


def test_constructions():
    plan = epsbias.plan_amplification(200, 0.002)
    assert [round(s["eps_out"], 8) for s in plan["steps"]] == [0.05, 0.0125, 0.00078125]
    assert epsbias.claim6_bound(0.25, 0.25, 0.2, 0.125) == pytest.approx(0.45)
    assert epsbias.bridge_schedule(0.5, 0.05, 0.05)[1] == pytest.approx(0.3525)
    s, ledger = epsbias.solvable_set_base(epsbias.FiniteGroup.dihedral(4))
    assert ledger["ok"]
    assert s.certified_bias <= 0.5


def test_lemma3_and_baseline():
    assert epsbias.lemma3_projection_norm(epsbias.FiniteGroup.cyclic(2)) == pytest.approx(0.5)
    s, bias = epsbias.alon_roichman_sample(epsbias.FiniteGroup.symmetric(4), 1, 7)
    assert s.size == 1
    assert bias == pytest.approx(1.0)


def test_harness():
    r = epsbias.operator_product_tail(20, 0.3, 2, 200, 1)
    assert r["passed"]
    a = epsbias.azuma_check([0.5] * 10, [0.5] * 10, [1.0], 100, 1)
    assert a["sweep"][0]["empirical"] == 0.0
