from __future__ import annotations

import pytest

from z22osp.algebra import LoopGenerator, bracket
from z22osp.systems import SYSTEMS, mutation_report, verify_system

FLAT = ["liouville", "sinh-general", "cosh-general", "mkdv", "kdv"]


@pytest.mark.parametrize("name", FLAT)
def test_flat_systems(name):
    r = verify_system(name)
    assert r.ok, r.residual


@pytest.mark.parametrize("name", ["sinh", "cosh"])
def test_displayed_sinh_and_cosh_are_not_flat(name):
    assert not verify_system(name).ok


@pytest.mark.parametrize("name", sorted(SYSTEMS))
def test_every_perturbation_is_detected_or_a_symmetry(name):
    rep = mutation_report(name)
    assert rep.ok, rep.survivors
    assert rep.detected


def test_mutation_counts():
    counts = {n: len(mutation_report(n).detected) for n in ("liouville", "sinh-general", "mkdv", "kdv")}
    assert counts == {"liouville": 11, "sinh-general": 14, "mkdv": 24, "kdv": 24}


def test_liouville_symmetry_is_a_central_shift():
    rep = mutation_report("liouville")
    assert rep.symmetries == ["Lp:K-_1"]
    _, lm, _ = SYSTEMS["liouville"]()
    assert all(not bracket(LoopGenerator("K-", 1), h) for h in lm.terms)
