import json

import pytest

from app.main import run


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("TWISTWZW_OUTPUT_PATH", "TWISTWZW_LOG_LEVEL", "TWISTWZW_SEED"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("app.config.config_loader.load_dotenv", lambda: None)


def _run(tmp_path, no_config, *argv):
    code = run([*argv, "--config", no_config, "--output", str(tmp_path)])
    return code, tmp_path / f"{argv[0]}.json"


class TestCommands:
    def test_weight_map(self, tmp_path, no_config):
        code, path = _run(tmp_path, no_config, "weight-map", "--N", "2", "--k", "1", "--lambda", "1")
        assert code == 0
        report = json.loads(path.read_text())
        assert report["status"] == "pass"
        assert report["results"]["dominant"] is True
        assert report["results"]["tilde_pairings"] == ["0", "1"]
        assert report["results"]["prime_pairings"] == ["1", "0"]

    def test_rational_level(self, tmp_path, no_config):
        code, path = _run(tmp_path, no_config, "weight-map", "--N", "2", "--k", "1/2", "--lambda", "1")
        assert code == 0
        report = json.loads(path.read_text())
        assert report["config"]["k"] == "1/2"
        assert report["results"]["tilde"]["level"] == "1/2"

    def test_reports_are_deterministic(self, tmp_path, no_config):
        _, path = _run(tmp_path, no_config, "weight-map", "--N", "3", "--k", "2", "--lambda", "1", "0")
        first = path.read_bytes()
        _, path = _run(tmp_path, no_config, "weight-map", "--N", "3", "--k", "2", "--lambda", "1", "0")
        assert path.read_bytes() == first

    def test_w_check(self, tmp_path, no_config):
        code, path = _run(tmp_path, no_config, "w-check", "--N", "3", "--order", "4")
        assert code == 0
        assert json.loads(path.read_text())["config"]["N"] == 3

    def test_weyl_coinvariants(self, tmp_path, no_config):
        code, path = _run(tmp_path, no_config, "coinv-dim", "--N", "2", "--k", "1", "--V", "fund",
                          "--points", "2", "--D", "2", "--csv")
        assert code == 0
        assert json.loads(path.read_text())["results"]["dim"] == 2
        assert (tmp_path / "coinv-dim.csv").exists()

    def test_kz_flatness(self, tmp_path, no_config):
        code, _ = _run(tmp_path, no_config, "kz-flatness", "--N", "2", "--k", "1", "--V", "fund", "fund",
                       "--samples", "3")
        assert code == 0


class TestErrors:
    def test_invalid_n_exits_with_two(self, tmp_path, no_config):
        code, path = _run(tmp_path, no_config, "weight-map", "--N", "1")
        assert code == 2
        assert not path.exists()

    def test_wrong_weight_length(self, tmp_path, no_config):
        code, _ = _run(tmp_path, no_config, "weight-map", "--N", "3", "--lambda", "1")
        assert code == 2

    def test_unknown_command(self, tmp_path, no_config):
        with pytest.raises(SystemExit) as exc:
            run(["nonsense", "--config", no_config])
        assert exc.value.code == 2

    def test_algebra_errors_are_reported_as_failures(self, tmp_path, no_config):
        code, path = _run(tmp_path, no_config, "kz-flatness", "--N", "2", "--k", "-2", "--V", "fund", "fund")
        assert code == 1
        report = json.loads(path.read_text())
        assert report["status"] == "fail"
        assert "critical level" in report["results"]["error"]
