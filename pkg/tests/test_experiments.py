import csv
import json

import pytest

from semigroup_lab import cli
from semigroup_lab.errors import ConfigError
from semigroup_lab.experiments import DEFAULTS, config_digest, run, validate

SMALL = {
    "kac": {"M": 4096, "N_max": 500},
    "cesaro-kac": {"K": 3, "M": 2048, "N_max": 500, "A": "[0,1/2)"},
    "recurrence": {"M": 2048, "N_max": 200},
    "set-return": {"M_omega": 5, "N_max": 100},
    "ball-return": {"M": 5, "K_max": 30, "delta": {"delta0": "1/256", "ratio": "1/2", "count": 1}},
    "rate": {"M": 3, "N_max": 60, "delta": {"delta0": "1/10", "ratio": "1/2", "count": 5}},
    "dynball": {"M": 3, "n_grid": [10, 20], "delta": "1/20"},
    "entropy": {"M_omega": 20, "n_grid": [4, 6, 8]},
    "lyapunov": {"M": 64, "n": 500},
    "variational": {"M_omega": 20, "n_grid": [4, 6, 8]},
    "hitting": {"L": 8},
    "rotation-bound": {"M": 2},
}


def config(name, **extra):
    return {"experiment": name, "seed": 7, **SMALL[name], **extra}


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg, indent=2), encoding="utf-8")
    return path


def test_small_presets_cover_every_experiment():
    assert set(SMALL) == set(DEFAULTS)


@pytest.mark.parametrize("name", sorted(DEFAULTS))
def test_every_experiment_writes_outputs(tmp_path, name):
    out = tmp_path / name
    result = run(config(name), out=out, figures=False)
    assert {p.name for p in out.iterdir()} >= {"samples.jsonl", "aggregate.csv", "manifest.json", "summary.json"}
    manifest = json.loads((out / "manifest.json").read_text())
    with open(out / "aggregate.csv", newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh))
    assert header == manifest["csv"]["columns"] == result.columns
    for line in (out / "samples.jsonl").read_text().splitlines():
        rec = json.loads(line)
        assert set(manifest["jsonl"]["fields"]) - {"delta", "n"} <= set(rec) <= set(manifest["jsonl"]["fields"])


def test_csv_uses_crlf(tmp_path):
    run(config("kac"), out=tmp_path / "o", figures=False)
    raw = (tmp_path / "o" / "aggregate.csv").read_bytes()
    assert raw.endswith(b"\r\n") and b"\n" not in raw.replace(b"\r\n", b"")


def test_jsonl_identical_across_worker_counts(tmp_path):
    a = run(config("kac"), out=tmp_path / "a", workers=1, figures=False)
    b = run(config("kac"), out=tmp_path / "b", workers=2, figures=False)
    assert (tmp_path / "a" / "samples.jsonl").read_bytes() == (tmp_path / "b" / "samples.jsonl").read_bytes()
    assert (tmp_path / "a" / "aggregate.csv").read_bytes() == (tmp_path / "b" / "aggregate.csv").read_bytes()
    assert a.summary["config_digest"] == b.summary["config_digest"]


def test_digest_is_canonical():
    a = validate({"experiment": "kac", "seed": 1, "M": 10})
    b = validate({"M": 10, "seed": 1, "experiment": "kac", "workers": 4})
    assert config_digest(a) == config_digest(b)
    assert config_digest(a) != config_digest(validate({"experiment": "kac", "seed": 2, "M": 10}))


def test_figures_next_to_csv(tmp_path):
    run(config("entropy"), out=tmp_path / "f")
    assert list((tmp_path / "f" / "figures").glob("*.png"))


@pytest.mark.parametrize(
    "bad, field",
    [
        ({"experiment": "kac", "seed": 1, "M": -3}, "M"),
        ({"experiment": "kac", "seed": 1, "bogus": 1}, "bogus"),
        ({"experiment": "nope", "seed": 1}, "experiment"),
        ({"experiment": "kac"}, "seed"),
        ({"experiment": "kac", "seed": 1, "system": "linear:1"}, "system"),
        ({"experiment": "entropy", "seed": 1, "system": "logistic,linear:2"}, "system"),
    ],
)
def test_config_errors_name_the_field(bad, field):
    with pytest.raises(ConfigError) as info:
        run(bad)
    assert info.value.field == field


def test_config_error_reports_line(tmp_path):
    text = '{\n  "experiment": "kac",\n  "seed": 1,\n  "M": "many"\n}\n'
    path = tmp_path / "c.json"
    path.write_text(text)
    with pytest.raises(ConfigError) as info:
        run(path)
    assert info.value.line == 4 and info.value.field == "M"


def test_cli_exit_codes(tmp_path, capsys):
    good = write_config(tmp_path, config("kac"))
    assert cli.main(["run", str(good), "--out", str(tmp_path / "ok"), "--no-figures"]) == 0
    corrupt = tmp_path / "corrupt.json"
    corrupt.write_text('{"experiment": "kac", "seed": ')
    target = tmp_path / "never"
    assert cli.main(["run", str(corrupt), "--out", str(target)]) == 2
    assert not target.exists()
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".never")]


def test_cli_failed_verdict_exits_3(tmp_path):
    # far too short an orbit budget: the Kac mean is censored and misses 1/nu(A)
    cfg = write_config(tmp_path, config("kac", A="[0,1/1000)", N_max=2, M=1024))
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "o"), "--no-figures"]) == 3


def test_cli_seed_override_changes_digest(tmp_path, capsys):
    cfg = write_config(tmp_path, config("lyapunov"))
    cli.main(["run", str(cfg), "--out", str(tmp_path / "a"), "--no-figures"])
    cli.main(["run", str(cfg), "--seed", "8", "--out", str(tmp_path / "b"), "--no-figures"])
    ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
    mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert ma["config_digest"] != mb["config_digest"] and mb["config"]["seed"] == 8


def test_refuses_foreign_directory(tmp_path):
    (tmp_path / "busy").mkdir()
    (tmp_path / "busy" / "keep.txt").write_text("mine")
    with pytest.raises(ConfigError):
        run(config("kac"), out=tmp_path / "busy", figures=False)
    assert (tmp_path / "busy" / "keep.txt").read_text() == "mine"


def test_oracle_commands(capsys):
    assert cli.main(["oracle", "word_eval", "linear:2,linear:3", "12", "1/10"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == "3/5"
    assert cli.main(["oracle", "periodic_points", "linear:2", "11"]) == 0
    assert json.loads(capsys.readouterr().out)["points"] == ["0", "1/3", "2/3"]
    assert cli.main(["oracle", "set_return_time", "linear:2", "1", "[3/10,7/20)", "50"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 2
    assert cli.main(["oracle", "word_eval", "linear:2", "3", "0"]) == 2
