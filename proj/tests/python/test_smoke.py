"""Smoke tests for the python bindings."""

import introlab


def test_field_arithmetic():
    f4 = introlab.Gf.make(2, 2)
    assert f4.q == 4
    w = 2
    assert f4.mul(w, w) == 3
    assert f4.inv(w) == 3
    assert [f4.trace(a) for a in range(4)] == [0, 0, 1, 1]
    basis = f4.self_dual_basis()
    assert len(basis) == 2
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            assert f4.trace(f4.mul(a, b)) == (1 if i == j else 0)
    re, im = f4.character_sum(0)
    assert abs(re - 1.0) < 1e-12 and abs(im) < 1e-12
    re, im = f4.character_sum(2)
    assert abs(re) < 1e-12 and abs(im) < 1e-12


def test_encoding_roundtrip():
    f4 = introlab.Gf.make(2, 2)
    msg = [1, 2, 3, 0]
    g = introlab.ld_encode(f4, 4, 1, 2, msg)
    for i, a in enumerate(msg):
        assert g.eval(introlab.pi_index(f4, 4, 1, 2, i)) == a


def test_instance_parsing():
    text = "inputs 9\ngate 0 INPUT 6\noutput 0\n"
    n, gates = introlab.parse_instance_text(text)
    assert n == 2 and gates == 1
    assignment = introlab.brute_force_sat(text)
    assert assignment == [1, 1, 1, 1]


def test_game_values():
    assert abs(introlab.game_value("hide") - 1.0) < 1e-9
    cheat = introlab.game_value("hide", "cheat")
    assert abs(cheat - 0.625) < 1e-9
    assert abs(introlab.game_value("intro-cross") - 1.0) < 1e-9


def test_experiment():
    ok, report = introlab.run_experiment("twirl-identities", {}, 7)
    assert ok
    assert report["experiment"] == "twirl-identities"
    assert "field-code-algebra" in introlab.experiment_names()
