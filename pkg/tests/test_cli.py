import json
from pathlib import Path

import pytest

from tckit.cli import EXIT, main, run
from tckit.groebner import CACHE
from tckit.inputs import InputError, load_input, parse_input, tokenize

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
CONE2 = str(SAMPLES / "cone2.ring")
CONE7 = str(SAMPLES / "cone7.ring")
MODULE = str(SAMPLES / "module.ring")
WITNESS = str(SAMPLES / "witness.hull")
DESCENDING = str(SAMPLES / "descending.hull")


def write(tmp_path, text, name="in.ring"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# ------------------------------------------------------------ input grammar


def test_cone_file_has_one_relation():
    parsed = load_input(CONE2)
    assert parsed.ctx.p == 2 and parsed.ctx.names == ("x", "y", "z")
    assert len(parsed.ctx.relations) == 1
    assert [str(g) for g in parsed.ideal.generators] == ["y", "z"]


def test_comments_are_skipped():
    parsed = parse_input('# leading\nring { p = 3; vars = [a,b]; } # trailing\nideal { gens = ["a"]; }')
    assert parsed.ctx.p == 3 and str(parsed.ideal.generators[0]) == "a"


def test_string_escapes():
    toks = tokenize(r'"a\"b"')
    assert toks[0][:2] == ("string", 'a"b')


def test_p_must_be_prime():
    with pytest.raises(InputError, match="p must be prime") as exc:
        parse_input("ring {\n  p = 4; vars = [x]; }")
    assert (exc.value.line, exc.value.col) == (2, 7)


def test_polynomial_syntax_error_column():
    with pytest.raises(InputError) as exc:
        parse_input('ring { p = 2; vars = [x,y]; }\nideal { gens = ["x+*y"]; }')
    assert exc.value.line == 2 and exc.value.col > 16


def test_unknown_variable():
    with pytest.raises(InputError):
        parse_input('ring { p = 2; vars = [x]; }\nideal { gens = ["w"]; }')


def test_inhomogeneous_relation_with_weights():
    with pytest.raises(InputError):
        parse_input('ring { p = 2; vars = [x,y]; weights = [1,1]; quotient = ["x^2+y"]; }')


def test_inhomogeneous_relation_without_weights_is_ungraded():
    parsed = parse_input('ring { p = 2; vars = [x,y]; quotient = ["x^2+y"]; }')
    assert not parsed.ctx.graded


def test_module_degree_inconsistent_entry():
    text = 'ring { p = 2; vars = [x,y]; }\nmodule { shifts = [0,0]; relations = [["x"],["y^2"]]; }'
    with pytest.raises(InputError, match="homogeneous") as exc:
        parse_input(text)
    assert exc.value.line == 2


def test_module_shifts_fix_degrees():
    text = 'ring { p = 2; vars = [x,y]; }\nmodule { shifts = [1,0]; relations = [["x"],["y^2"]]; }'
    assert parse_input(text).module.rank == 2


def test_submodule_needs_module():
    with pytest.raises(InputError, match="module block"):
        parse_input('ring { p = 2; vars = [x]; }\nsubmodule { gens = [["x"]]; }')


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("ring { p = 2; vars = [x] }", "expected ';'"),
        ("ring { p = 2; p = 3; vars = [x]; }", "duplicate key"),
        ("ring { p = 2; vars = [x]; }\nring { p = 2; vars = [x]; }", "duplicate block"),
        ("rng { p = 2; }", "unknown block"),
        ("ring { vars = [x]; }", "needs 'p'"),
        ('ideal { gens = ["x"]; }', "needs a ring"),
        ("ring { p = 2; vars = [x]; } $", "unexpected character"),
        ('ring { p = "2"; vars = [x]; }', "wrong type"),
    ],
)
def test_grammar_errors(text, fragment):
    with pytest.raises(InputError, match=fragment):
        parse_input(text)


def test_hull_block():
    parsed = load_input(WITNESS)
    assert parsed.formal_sum is not None and parsed.hull_text[1:] == (2, 2)


def test_hull_block_descending_keeps_text():
    parsed = load_input(DESCENDING)
    assert parsed.formal_sum is None and parsed.hull_text is not None


def test_missing_file():
    with pytest.raises(InputError, match="cannot read"):
        load_input("/nonexistent/file.ring")


def test_not_utf8(tmp_path):
    path = tmp_path / "bad.ring"
    path.write_bytes(b"ring { p = 2; vars = [\xff]; }")
    with pytest.raises(InputError, match="UTF-8"):
        load_input(path)


# ------------------------------------------------------------ commands


def code(argv):
    return run(argv)[0].exit_code


def test_tc_oracle_cone2_cites_rule(capsys):
    assert main(["tc-oracle", CONE2, "--u", "x^2", "--ideal", "y,z"]) == 0
    out = capsys.readouterr().out
    assert "hasse-zero-cubic" in out and "Brenner" in out


def test_tc_oracle_cone7_is_evidence_only():
    rep, _ = run(["tc-oracle", CONE7, "--u", "x^2", "--e-max", "2"])
    assert rep.verdict == "evidence-only" and rep.exit_code == 3


def test_bs_check():
    assert code(["bs-check", "--ideal", "(x^2,y^2)", "--k", "0"]) == 0


def test_hull_witness(capsys):
    assert main(["hull-witness", "--t", "5", "--E", "10", "--p", "2"]) == 0
    assert "x1^(-1/32)" in capsys.readouterr().out


def test_hull_witness_E_below_t():
    assert code(["hull-witness", "--t", "5", "--E", "4"]) == 2


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["gb", CONE2], 0),
        (["frob-power", CONE2, "--e", "2"], 0),
        (["fc-member", CONE2, "--u", "x^2"], 0),
        (["fc-member", CONE7, "--u", "x^2", "--e-max", "2"], 1),
        (["fc-ideal", CONE2], 0),
        (["tc-evidence", CONE7, "--u", "x^2", "--c", "z", "--e-max", "2"], 3),
        (["tc-evidence", CONE7, "--u", "x", "--c", "z", "--e-max", "2"], 1),
        (["chain-member", CONE2, "--u", "x^2"], 0),
        (["module-fc", MODULE, "--u", "[x^2,0]"], 0),
        (["module-fc", MODULE, "--u", "[0,x]", "--e-max", "2"], 1),
        (["coprimary", MODULE], 1),
        (["dual-dims", CONE2, "--q", "2", "--n", "1"], 0),
        (["ic-monomial", "--ideal", "(x^2,y^2)"], 0),
        (["hull-dcc", WITNESS], 0),
        (["hull-dcc", DESCENDING], 1),
        (["hull-mul", WITNESS, "--s", "x2^2", "--E", "5"], 0),
        (["hull-mul", WITNESS, "--s", "x2 + x2^2"], 3),
        (["selftest", "--items", "9"], 0),
    ],
)
def test_exit_codes(argv, expected):
    assert code(argv) == expected


def test_frob_root_in_polynomial_ring(tmp_path):
    # x*y^3 = (y)^2 * x*y, so y joins the root
    path = write(tmp_path, 'ring { p = 2; vars = [x,y]; }\nideal { gens = ["x^2+x*y^3", "y^4"]; }')
    rep, _ = run(["frob-root", path, "--e", "1"])
    assert rep.exit_code == 0 and rep.result["generators"] == ["x", "y"]


def test_frob_root_in_quotient_is_error():
    assert code(["frob-root", CONE2]) == 2


def test_ic_monomial_output():
    rep, _ = run(["ic-monomial", "--ideal", "(x^2,y^2)"])
    assert sorted(rep.result["generators"]) == ["x*y", "x^2", "y^2"]


def test_hull_dcc_fail_reports_pair():
    rep, _ = run(["hull-dcc", DESCENDING])
    assert rep.result["witness"] == [["0", "0"], ["-1", "-1"]]


def test_hull_inline_formal_sum():
    rep, _ = run(["hull-mul", "--f", "x1^(-1)*x2^(-2) + x1^(-2)*x2^(-1)", "--n", "2", "--p", "5", "--s", "x1*x2^2"])
    assert rep.result["product"] == "1"


@pytest.mark.parametrize(
    "argv",
    [
        ["fc-member", CONE2],  # missing --u
        ["fc-member", "--u", "x"],  # missing ring
        ["fc-member", CONE2, "--u", "x", "--e-max", "-1"],
        ["dual-dims", CONE2, "--q", "2"],
        ["hull-witness"],
        ["hull-mul", WITNESS],
        ["hull-dcc", "--f", "x1^(-1)", "--n", "1", "--p", "4"],
        ["gb", "/nonexistent.ring"],
        ["verify"],
    ],
)
def test_usage_errors(argv):
    assert code(argv) == 2


def test_bad_prime_error_has_position(tmp_path, capsys):
    path = write(tmp_path, "ring { p = 4; vars = [x]; }")
    assert main(["gb", path]) == 2
    assert "line 1, column 12: p must be prime" in capsys.readouterr().err


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


# ------------------------------------------------------------ JSON and replay


@pytest.mark.parametrize(
    "argv",
    [
        ["fc-member", CONE2, "--u", "x^2"],
        ["fc-member", CONE7, "--u", "x^2", "--e-max", "1"],
        ["tc-oracle", CONE2, "--u", "x^2"],
        ["tc-evidence", CONE7, "--u", "x^2", "--e-max", "1"],
        ["coprimary", MODULE],
        ["hull-dcc", DESCENDING],
        ["bs-check", "--ideal", "(x^3,y^3,z^3)", "--k", "1"],
        ["gb", "/nonexistent.ring"],
    ],
)
def test_json_and_text_agree(argv, capsys):
    text_code = main(argv)
    capsys.readouterr()
    json_code = main(argv + ["--json"])
    data = json.loads(capsys.readouterr().out)
    assert data["tckit"] == 1
    assert text_code == json_code == EXIT[data["verdict"]]


def test_json_certificate_replays(tmp_path, capsys):
    assert main(["fc-member", CONE2, "--u", "x^2", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["certificates"][0]["e"] == 1
    path = write(tmp_path, json.dumps(data), "cert.json")
    assert main(["verify", path]) == 0
    assert "verified" in capsys.readouterr().out


def test_tampered_certificate_fails(tmp_path, capsys):
    main(["fc-member", CONE2, "--u", "x^2", "--json"])
    data = json.loads(capsys.readouterr().out)
    data["certificates"][0]["u"] = "x"
    path = write(tmp_path, json.dumps(data), "cert.json")
    assert main(["verify", path]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["fc-member", CONE2, "--u", "x^2", "--verify"],
        ["module-fc", MODULE, "--u", "[x^2,0]", "--verify"],
        ["tc-oracle", CONE2, "--u", "x^2", "--verify"],
    ],
)
def test_verify_flag(argv):
    rep, _ = run(argv)
    assert rep.exit_code == 0 and rep.result["verified"] is True


def test_cache_dir_flag(tmp_path):
    old = CACHE.directory
    CACHE.clear()  # a fresh process starts with an empty memory cache
    try:
        assert code(["gb", CONE2, "--cache-dir", str(tmp_path)]) == 0
        assert any(tmp_path.iterdir())
    finally:
        CACHE.set_directory(old)
