import io
import json
import os
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from colfw.cli import main
from conftest import CORPUS, FIXTURES

SCHEMA = json.loads(resources.files("colfw").joinpath("diagnostics.schema.json").read_text())


class Fake(io.StringIO):
    def __init__(self, tty=False):
        super().__init__()
        self.tty = tty

    def isatty(self):
        return self.tty


def run(*argv, tty=False):
    out, err = Fake(tty), Fake(tty)
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_check_clean_file_exits_zero():
    code, out, err = run("check", CORPUS / "stream.colf", "--depth", 5)
    assert (code, out, err) == (0, "", "")


@pytest.mark.parametrize(
    "name,expected",
    [
        ("noncontractive", "non-contractive"),
        ("badnat", "invalid-cycle"),
        ("underapplied", "family-under-applied"),
        ("arity", "spine-arity"),
        ("shape", "shape-mismatch"),
        ("sigma6_z", "invalid-cycle"),
    ],
)
def test_negative_fixtures_report_one_code(name, expected):
    code, out, _ = run("check", FIXTURES / f"{name}.colf", "--json")
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    assert code == 1
    assert [i["code"] for i in payload["items"]] == [expected]
    item = payload["items"][0]
    assert item["line"] >= 1 and item["col"] >= 1


def test_text_diagnostics_go_to_stderr():
    code, out, err = run("check", FIXTURES / "badnat.colf")
    assert code == 1 and out == ""
    assert "badnat.colf:4:" in err and "invalid-cycle" in err


def test_missing_file_is_an_io_error():
    code, out, _ = run("check", "/nonexistent/x.colf", "--json")
    assert code == 2
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    assert payload["items"][0]["code"] == "io-error"


def test_usage_errors_exit_two():
    assert run("frobnicate", "x")[0] == 2
    assert run("check", CORPUS / "stream.colf", "--depth", "-1")[0] == 2
    assert run("erase", CORPUS / "stream.colf", "nat")[0] == 2


def test_unfold():
    assert run("unfold", CORPUS / "cobin.colf", "w2", "--depth", 3)[1] == "b1 (b0 (b1 _))\n"
    assert run("unfold", CORPUS / "cobin.colf", "bone", "--depth", 2)[1] == "b1 (b0 _)\n"
    assert run("unfold", CORPUS / "cobin.colf", "w2", "--depth", 0)[1] == "_\n"
    code, out, _ = run("unfold", CORPUS / "cobin.colf", "w1", "--json", "--depth", 2)
    assert code == 0 and json.loads(out)["term"] == "b1 (b1 _)"
    assert run("unfold", CORPUS / "cobin.colf", "b0")[0] == 1


def test_erase():
    assert run("erase", CORPUS / "stream.colf", "cocons")[1] == "* -> * -> *\n"
    assert run("erase", CORPUS / "stream.colf", "up/def", "--show-implicit")[1] == "* -> * -> * -> *\n"
    assert run("erase", CORPUS / "cobin.colf", "bsucc/1")[1] == "* -> *\n"
    assert run("erase", CORPUS / "cobin.colf", "bsucc/1", "--show-implicit")[1] == "* -> * -> * -> *\n"


def test_validity_command():
    code, out, _ = run("validity", CORPUS / "sigma6.colf")
    assert code == 0
    assert "tmI: valid (prepattern)" in out and out.rstrip().endswith("prepattern: yes")
    code, out, _ = run("validity", FIXTURES / "badnat.colf", "--json")
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    assert code == 1 and payload["report"]["valid"] is False


def test_parse_round_trips():
    code, out, _ = run("parse", CORPUS / "stream.colf")
    assert code == 0 and "cocons : nat -> stream -> stream." in out
    code, shown, _ = run("parse", CORPUS / "stream.colf", "--show-implicit")
    assert code == 0 and len(shown) >= len(out)


def test_output_is_deterministic():
    a = run("check", FIXTURES / "sigma6_z.colf", "--json")
    b = run("check", FIXTURES / "sigma6_z.colf", "--json")
    assert a == b


def test_colour(monkeypatch):
    monkeypatch.setenv("COLFW_COLOR", "auto")
    assert "\x1b[" in run("check", FIXTURES / "badnat.colf", tty=True)[2]
    assert "\x1b[" not in run("check", FIXTURES / "badnat.colf")[2]
    monkeypatch.setenv("COLFW_COLOR", "never")
    assert "\x1b[" not in run("check", FIXTURES / "badnat.colf", tty=True)[2]


def test_console_entry_point():
    env = {**os.environ, "COLFW_COLOR": "never"}
    proc = subprocess.run(
        [sys.executable, "-m", "colfw", "check", str(FIXTURES / "arity.colf")],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 1 and "spine-arity" in proc.stderr


def test_empty_signature(tmp_path):
    empty = tmp_path / "empty.colf"
    empty.write_text("")
    assert run("validity", empty)[0] == 0
    assert run("check", empty) == (0, "", "")
