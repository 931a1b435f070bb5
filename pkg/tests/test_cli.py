import json

import pytest

from affrigid.cli import main
from affrigid.serialize import config_to_json, parse_config
from affrigid.errors import InputError


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def fp_config(p=3, dim=2, X=None, Y=None, distribution=None, pairing=None):
    doc = {
        "field": {"kind": "Fp", "p": p},
        "dim": dim,
        "pairing": pairing or [[1 if i == j else 0 for j in range(dim)]
                               for i in range(dim)],
        "X": X if X is not None else [],
        "Y": Y if Y is not None else [],
    }
    if distribution is not None:
        doc["distribution"] = distribution
    return doc


LINE_X = {"base": [0, 0], "gens": [[1, 0]]}
LINE_Y = {"base": [0, 0], "gens": [[0, 1]]}
ORIGIN = {"base": [0, 0], "gens": []}
FULL = {"base": [0, 0], "gens": [[1, 0], [0, 1]]}


class TestConfigRoundTrip:
    def test_fp_round_trip(self):
        doc = fp_config(
            p=3, X=[LINE_X, ORIGIN], Y=[LINE_Y],
            distribution={"entries": [
                {"point": [0, 0], "value": ["1/1", "0/1"]},
                {"point": [1, 0], "value": ["1/1", "0/1"]},
                {"point": [2, 0], "value": ["1/1", "0/1"]},
            ]})
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            config = parse_config(doc)
            again = parse_config(config_to_json(config))
        assert again == config

    def test_q_round_trip(self):
        doc = {
            "field": {"kind": "Q"},
            "dim": 2,
            "pairing": [["1/1", "0/1"], ["0/1", "1/1"]],
            "X": [{"base": ["1/2", "0/1"], "gens": [["1/1", "3/2"]]}],
            "Y": [{"base": ["0/1", "0/1"], "gens": []}],
        }
        config = parse_config(doc)
        again = parse_config(config_to_json(config))
        assert again == config

    def test_singular_pairing_rejected(self):
        doc = fp_config(p=3, pairing=[[1, 2], [2, 1]])
        with pytest.raises(InputError):
            parse_config(doc)

    def test_bad_field_rejected(self):
        with pytest.raises(InputError):
            parse_config({"field": {"kind": "Fp", "p": 4}, "dim": 1,
                          "pairing": [[1]]})
        with pytest.raises(InputError):
            parse_config({"field": {"kind": "R"}, "dim": 1, "pairing": [[1]]})


class TestClassifyCommand:
    def test_classify_text(self, tmp_path, capsys):
        path = write_config(tmp_path, fp_config(X=[LINE_X], Y=[LINE_Y]))
        assert main(["classify", "--input", path]) == 0
        out = capsys.readouterr().out
        assert "Perfect" in out

    def test_classify_json(self, tmp_path, capsys):
        path = write_config(tmp_path, fp_config(X=[LINE_X, ORIGIN],
                                                Y=[LINE_Y]))
        assert main(["classify", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["classes"] == [["Perfect"], ["Thin"]]
        assert report["perfect_pairs"] == [[0, 0]]

    def test_empty_y_gives_empty_matrix(self, tmp_path, capsys):
        path = write_config(tmp_path, fp_config(X=[LINE_X], Y=[]))
        assert main(["classify", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["classes"] == [[]]
        assert report["perfect_pairs"] == []

    def test_singular_pairing_exits_3(self, tmp_path, capsys):
        path = write_config(tmp_path, fp_config(pairing=[[1, 2], [2, 1]]))
        assert main(["classify", "--input", path]) == 3
        assert "error" in capsys.readouterr().err

    def test_q_mode_classify(self, tmp_path, capsys):
        doc = {
            "field": {"kind": "Q"},
            "dim": 2,
            "pairing": [[1, 0], [0, 1]],
            "X": [{"base": [0, 0], "gens": [[1, 0]]}],
            "Y": [{"base": [0, 0], "gens": [[0, 1]]}],
        }
        path = write_config(tmp_path, doc)
        assert main(["classify", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["classes"] == [["Perfect"]]


class TestCheckCommand:
    def test_admissible(self, tmp_path, capsys):
        path = write_config(tmp_path, fp_config(X=[LINE_X], Y=[LINE_Y]))
        assert main(["check", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["admissible"] is True
        assert report["predicted_dimension"] == 1

    def test_thick_pair_exits_1(self, tmp_path, capsys):
        path = write_config(tmp_path, fp_config(X=[FULL], Y=[FULL]))
        assert main(["check", "--input", path, "--format", "json"]) == 1
        report = json.loads(capsys.readouterr().out)
        assert report["admissible"] is False
        assert report["witness"] == [0, 0]

    def test_all_thin_predicts_zero(self, tmp_path, capsys):
        path = write_config(tmp_path, fp_config(X=[ORIGIN], Y=[LINE_Y]))
        assert main(["check", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["predicted_dimension"] == 0

    def test_q_mode_rejected(self, tmp_path):
        doc = {"field": {"kind": "Q"}, "dim": 1, "pairing": [[1]],
               "X": [], "Y": []}
        path = write_config(tmp_path, doc)
        assert main(["check", "--input", path]) == 3


class TestDimCommand:
    def test_constants_dimension(self, tmp_path, capsys):
        doc = fp_config(p=3, dim=1, X=[{"base": [0], "gens": [[1]]}],
                        Y=[{"base": [0], "gens": []}])
        path = write_config(tmp_path, doc)
        assert main(["dim", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["dimension"] == 1
        assert report["matches_prediction"] is True

    def test_unconstrained_dimension(self, tmp_path, capsys):
        doc = fp_config(p=3, dim=1, X=[{"base": [0], "gens": [[1]]}],
                        Y=[{"base": [0], "gens": [[1]]}])
        path = write_config(tmp_path, doc)
        assert main(["dim", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["dimension"] == 3
        assert report["admissible"] is False

    def test_thin_only_dimension_zero(self, tmp_path, capsys):
        doc = fp_config(p=3, X=[ORIGIN], Y=[LINE_Y])
        path = write_config(tmp_path, doc)
        assert main(["dim", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["dimension"] == 0
        assert report["matches_prediction"] is True

    def test_cap_enforced(self, tmp_path, capsys):
        doc = fp_config(p=11, dim=3, X=[], Y=[])
        path = write_config(tmp_path, doc)
        assert main(["dim", "--input", path, "--cap", "1000"]) == 3

    def test_basis_flag(self, tmp_path, capsys):
        doc = fp_config(p=3, dim=1, X=[{"base": [0], "gens": [[1]]}],
                        Y=[{"base": [0], "gens": []}])
        path = write_config(tmp_path, doc)
        assert main(["dim", "--input", path, "--format", "json",
                     "--basis"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert len(report["basis"]) == 1
        assert len(report["basis"][0]["entries"]) == 3


class TestFamilyCommand:
    def test_simple_family(self, tmp_path, capsys):
        doc = fp_config(p=5, X=[ORIGIN], Y=[LINE_Y])
        path = write_config(tmp_path, doc)
        assert main(["family", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["found"] is True
        assert report["family"]["vectors"] == [[1, 0]]

    def test_empty_y_family(self, tmp_path, capsys):
        doc = fp_config(p=5, X=[ORIGIN], Y=[])
        path = write_config(tmp_path, doc)
        assert main(["family", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["family"]["vectors"] == []

    def test_exhausted_exits_2(self, tmp_path, capsys):
        doc = fp_config(p=2, dim=1, X=[{"base": [0], "gens": [[1]]}],
                        Y=[{"base": [0], "gens": []}])
        path = write_config(tmp_path, doc)
        assert main(["family", "--input", path, "--format", "json"]) == 2
        report = json.loads(capsys.readouterr().out)
        assert report["found"] is False
        assert report["exhausted"] is True

    def test_q_mode_full_space_forbidden_exits_3(self, tmp_path):
        doc = {
            "field": {"kind": "Q"},
            "dim": 2,
            "pairing": [[1, 0], [0, 1]],
            "X": [{"base": [0, 0], "gens": [[1, 0], [0, 1]]}],
            "Y": [{"base": [0, 0], "gens": []}],
        }
        path = write_config(tmp_path, doc)
        assert main(["family", "--input", path]) == 3

    def test_q_mode_grid(self, tmp_path, capsys):
        doc = {
            "field": {"kind": "Q"},
            "dim": 2,
            "pairing": [[1, 0], [0, 1]],
            "X": [{"base": [1, 0], "gens": [[0, 1]]},
                  {"base": [0, 1], "gens": [[1, 1]]},
                  {"base": [1, 1], "gens": [[1, 0]]}],
            "Y": [{"base": [0, 0], "gens": []}],
        }
        path = write_config(tmp_path, doc)
        assert main(["family", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["found"] is True
        assert len(report["family"]["vectors"]) == 1


class TestDecomposeCommand:
    def config_with_distribution(self):
        # indicator of the x-axis line: the twisted indicator with zero twist
        entries = [{"point": [t, 0], "value": ["1/1", "0/1"]}
                   for t in range(3)]
        return fp_config(p=3, X=[LINE_X], Y=[LINE_Y],
                         distribution={"entries": entries})

    def test_single_component(self, tmp_path, capsys):
        path = write_config(tmp_path, self.config_with_distribution())
        assert main(["decompose", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["residual_zero"] is True
        assert len(report["components"]) == 1
        assert len(report["components"][0]["distribution"]["entries"]) == 3

    def test_zero_distribution(self, tmp_path, capsys):
        doc = fp_config(p=3, X=[LINE_X], Y=[LINE_Y],
                        distribution={"entries": []})
        path = write_config(tmp_path, doc)
        assert main(["decompose", "--input", path, "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["residual_zero"] is True
        assert all(not c["distribution"]["entries"]
                   for c in report["components"])

    def test_thick_exits_1(self, tmp_path):
        doc = fp_config(p=3, X=[FULL], Y=[FULL],
                        distribution={"entries": []})
        path = write_config(tmp_path, doc)
        assert main(["decompose", "--input", path]) == 1

    def test_out_of_space_exits_3(self, tmp_path, capsys):
        doc = fp_config(p=3, X=[LINE_X], Y=[LINE_Y], distribution={
            "entries": [{"point": [0, 1], "value": ["1/1", "0/1"]}]})
        path = write_config(tmp_path, doc)
        assert main(["decompose", "--input", path]) == 3

    def test_missing_distribution_exits_3(self, tmp_path):
        doc = fp_config(p=3, X=[LINE_X], Y=[LINE_Y])
        path = write_config(tmp_path, doc)
        assert main(["decompose", "--input", path]) == 3

    def test_small_prime_exits_2(self, tmp_path, capsys):
        # two points against two points over F_2: no avoiding family exists
        doc = fp_config(p=2, dim=1,
                        X=[{"base": [0], "gens": []},
                           {"base": [1], "gens": []}],
                        Y=[{"base": [0], "gens": []},
                           {"base": [1], "gens": []}],
                        distribution={"entries": [
                            {"point": [0], "value": ["1/1"]}]})
        path = write_config(tmp_path, doc)
        assert main(["decompose", "--input", path, "--format", "json"]) == 2
        report = json.loads(capsys.readouterr().out)
        assert report["error"] == "model too small"


class TestDemoCommand:
    def test_quadratic(self, capsys):
        assert main(["demo", "quadratic"]) == 0
        out = capsys.readouterr().out
        assert "Thin" in out and "Perfect" in out and "Thick" in out
        assert "reproduced: True" in out

    def test_rigidity_tour(self, capsys):
        assert main(["demo", "rigidity-tour"]) == 0
        out = capsys.readouterr().out
        assert "residual zero: True" in out
        assert "input reconstructed: True" in out

    def test_unknown_demo_exits_3(self, capsys):
        assert main(["demo", "bogus"]) == 3


class TestMalformedInput:
    def test_missing_file(self):
        assert main(["classify", "--input", "/nonexistent.json"]) == 3

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["classify", "--input", str(path)]) == 3

    def test_wrong_vector_length(self, tmp_path):
        doc = fp_config(X=[{"base": [0], "gens": []}])
        path = write_config(tmp_path, doc)
        assert main(["classify", "--input", str(path)]) == 3
