"""Command-line interface: subcommands, overrides, and exit codes."""

import json

from mimobc.cli import main
from mimobc.fixtures import FIXTURE_NAMES

CONFIG = {
    "scenario": {
        "models": [
            {
                "type": "finite_support",
                "atoms": [[[[1.0, 0.0], [0.2, 0.1]], [[0.0, 0.3], [0.8, 0.0]]]],
                "probs": [1.0],
            },
            {
                "type": "finite_support",
                "atoms": [[[[0.6, 0.1], [0.0, 0.0]], [[0.2, 0.0], [1.1, -0.2]]]],
                "probs": [1.0],
            },
        ],
        "noise": 1.0,
    },
    "snr_grid_db": [0.0],
    "algorithms": ["alg2", "tdma"],
    "samples": 32,
    "seed": 1,
}


def write_config(tmp_path, **overrides):
    cfg = dict(CONFIG)
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_fixtures_list(capsys):
    assert main(["fixtures", "list"]) == 0
    out = capsys.readouterr().out
    for name in FIXTURE_NAMES:
        assert name in out


def test_run_to_stdout(tmp_path, capsys):
    rc = main(["run", "--config", write_config(tmp_path)])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("snr_db,algorithm,sum_rate")
    assert len(lines) == 3  # header + one row per algorithm


def test_run_to_file(tmp_path, capsys):
    out = tmp_path / "result.csv"
    rc = main(["run", "--config", write_config(tmp_path), "--out", str(out)])
    assert rc == 0
    assert "wrote 2 rows" in capsys.readouterr().out
    assert out.exists() and out.read_text().startswith("snr_db,")


def strip_volatile(text):
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    return [r[:7] for r in rows]  # drop wall_seconds and seed columns


def test_run_same_seed_is_reproducible(tmp_path, capsys):
    main(["run", "--config", write_config(tmp_path), "--seed", "7"])
    first = capsys.readouterr().out
    main(["run", "--config", write_config(tmp_path), "--seed", "7"])
    second = capsys.readouterr().out
    assert strip_volatile(first) == strip_volatile(second)


def test_seed_only_moves_optimizer_starts_for_exact_models(tmp_path, capsys):
    # finite-support channels evaluate exactly, so rows without any random
    # component (water-filled TDMA) must not react to the seed; the iterative
    # designs may, through their randomized starting points
    main(["run", "--config", write_config(tmp_path), "--seed", "1"])
    first = strip_volatile(capsys.readouterr().out)
    main(["run", "--config", write_config(tmp_path), "--seed", "99"])
    second = strip_volatile(capsys.readouterr().out)
    tdma_a = [r for r in first if r[1] == "tdma"]
    tdma_b = [r for r in second if r[1] == "tdma"]
    assert tdma_a == tdma_b


def test_bad_config_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({**CONFIG, "algorithms": ["nope"]}))
    assert main(["run", "--config", str(path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_opportunistic_dimension_error_exits_2(tmp_path, capsys):
    path = write_config(tmp_path, algorithms=["opportunistic"])
    assert main(["run", "--config", path]) == 2
    assert "single transmit antenna" in capsys.readouterr().err
