"""End-to-end CLI behavior and exit codes."""

import json

import pytest

from dpn.cases import CaseSpec, Slot
from dpn.cli import main


class TestVerify:
    def test_dpn(self, capsys):
        assert main(["verify", "9018009"]) == 0
        out = capsys.readouterr().out
        assert "d = 819" in out and "D = n/d = 11011" in out

    def test_perfect_exits_1(self, capsys):
        assert main(["verify", "6"]) == 1
        assert "perfect" in capsys.readouterr().out

    def test_malformed_input_is_usage_error(self):
        with pytest.raises(SystemExit) as e:
            main(["verify", "abc"])
        assert e.value.code == 2


class TestClassify:
    def test_json_output(self, capsys):
        assert main(["classify", "9018009"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["deficient_perfect"] == {"d": 819, "D": 11011}
        assert obj["kind"] == "deficient"


class TestSearch:
    def test_small_search(self, capsys):
        assert main(["search", "--k", "3", "--bound", "1e6", "--odd"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["hits"] == []
        assert obj["complete"] is True

    def test_jobs_listing(self, capsys):
        assert main(["search", "--k", "4", "--bound", "1e8", "--jobs"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) > 1
        assert all(json.loads(line)["first_prime"] is not None for line in lines)


class TestProveAndCheck:
    def test_theorem_2_round_trip(self, tmp_path, capsys):
        out = tmp_path / "t2.json"
        assert main(["prove", "theorem-2", "--out", str(out)]) == 0
        assert main(["check-trace", str(out)]) == 0
        assert "trace verified" in capsys.readouterr().out

    def test_custom_case_all_eliminated(self, tmp_path, capsys):
        case = CaseSpec(slots=(Slot.fixed(3), Slot.fixed(23),
                               Slot.ranged(29), Slot.ranged(31)))
        case_file = tmp_path / "case.json"
        case_file.write_text(json.dumps(case.to_obj()))
        assert main(["prove", str(case_file)]) == 0
        assert "survived: 0" in capsys.readouterr().out

    def test_unreadable_case_file(self, tmp_path):
        assert main(["prove", str(tmp_path / "missing.json")]) == 2

    def test_tampered_trace_fails(self, tmp_path, capsys):
        out = tmp_path / "t2.json"
        main(["prove", "theorem-2", "--out", str(out)])
        capsys.readouterr()
        obj = json.loads(out.read_text())

        def first_value_node(node):
            w = node.get("witnesses", {}).get("final", {})
            if "value" in w:
                return w
            for c in node.get("children", []):
                got = first_value_node(c)
                if got is not None:
                    return got
            return None

        w = first_value_node(obj["root"])
        num, den = w["value"].split("/")
        w["value"] = f"{int(num) + 1}/{den}"
        out.write_text(json.dumps(obj))
        assert main(["check-trace", str(out)]) == 1
        assert "CHECK FAILED" in capsys.readouterr().err

    def test_empty_trace_file(self, tmp_path, capsys):
        bad = tmp_path / "empty.json"
        bad.write_text("")
        assert main(["check-trace", str(bad)]) == 1
        assert "schema error" in capsys.readouterr().err

    def test_missing_trace_file(self, tmp_path):
        assert main(["check-trace", str(tmp_path / "nope.json")]) == 2


class TestTable:
    def test_order_rows(self, capsys):
        assert main(["table", "--primes", "3", "23", "29",
                     "--moduli", "31"]) == 0
        out = capsys.readouterr().out
        rows = {line.split()[0]: line.split()[1] for line in out.splitlines()[1:]}
        assert rows == {"3": "30", "23": "10", "29": "10"}

    def test_diagonal_dash(self, capsys):
        assert main(["table", "--primes", "5", "--moduli", "5"]) == 0
        assert "-" in capsys.readouterr().out

    def test_composite_rejected(self, capsys):
        assert main(["table", "--primes", "9", "--moduli", "5"]) == 2


class TestReport:
    def test_small_report(self, capsys):
        assert main(["report", "--bound", "1000"]) == 0
        out = capsys.readouterr().out
        assert "deficient perfect numbers up to 1000" in out
        for n in (1, 2, 4, 10, 136, 512):
            assert f"\n{n:>10} " in out
