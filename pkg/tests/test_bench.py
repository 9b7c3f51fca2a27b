import csv
import json

import pytest

from lowlat_mpc.bench import FIELDS, BenchReport, bench_mlp, bench_mul, bench_nonlinear, emit, load
from lowlat_mpc.bench.cli import main, parse_args


def test_bench_mul_arity_four():
    r = bench_mul(4, 20, "n_high")
    naive, multi = r.find(method="naive")[0], r.find(method="multivariate")[0]
    assert (naive["online_rounds"], multi["online_rounds"]) == (60, 20)
    assert naive["offline_elements"] * 15 == multi["offline_elements"] * 9


def test_bench_mul_arity_two_identical_rounds():
    r = bench_mul(2, 5)
    assert [row["online_rounds"] for row in r.rows] == [5, 5]


def test_bench_mul_rejects_arity():
    with pytest.raises(ValueError):
        bench_mul(5, 1)


def test_bench_nonlinear_rows():
    row = bench_nonlinear("exp", profile="n_low").rows[0]
    assert row["online_rounds"] == 8 + 1
    assert row["within_budget"] is True
    assert row["points"] == 101
    sig = bench_nonlinear("sigmoid", [0.0]).rows[0]
    assert sig["max_abs_err_true"] <= 1e-2
    with pytest.raises(ValueError):
        bench_nonlinear("tan")


def test_mlp_latency_scales_with_rounds():
    low = bench_mlp("n_low", count=10).rows[0]
    high = bench_mlp("n_high", count=10).rows[0]
    assert low["online_rounds"] == high["online_rounds"]
    expect = (40.0 - 0.1) * low["online_rounds"]
    assert high["simulated_time_ms"] - low["simulated_time_ms"] == pytest.approx(expect)


def test_mlp_coalescing_same_outputs():
    on = bench_mlp(coalesce=True, count=10)
    off = bench_mlp(coalesce=False, count=10)
    a, b = on.rows[0], off.rows[0]
    assert a["max_abs_err_true"] == b["max_abs_err_true"] and a["agreement"] == b["agreement"]
    assert a["online_rounds"] <= b["online_rounds"]
    assert a["online_bytes"] == b["online_bytes"]
    assert {r["scenario"] for r in on.rows[1:]} >= {"bench-mlp.matmul", "bench-mlp.sigmoid", "bench-mlp.softmax"}


def test_emit_json_roundtrip(tmp_path):
    r = bench_mul(3, 2)
    path = tmp_path / "r.json"
    emit(r, "json", path)
    back = load(path)
    assert back.rows == r.rows
    assert list(json.loads(path.read_text())["rows"][0]) == list(FIELDS)


def test_emit_csv_header(tmp_path):
    path = tmp_path / "r.csv"
    emit(bench_mul(3, 2), "csv", path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(FIELDS)
    assert len(rows) == 3


def test_emit_errors(tmp_path):
    with pytest.raises(ValueError):
        emit(BenchReport("x"), "xml")
    with pytest.raises(OSError):
        emit(BenchReport("x"), "json", tmp_path / "missing" / "r.json")
    with pytest.raises(KeyError):
        BenchReport("x").add(bogus=1)


def test_cli_same_seed_identical_files(tmp_path):
    paths = [tmp_path / f"{i}.csv" for i in range(2)]
    for p in paths:
        assert main(["bench-mul", "--count", "3", "--seed", "5", "--format", "csv", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_cli_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("seed: 9\nnet: n_high\nmax-arity: 3\n")
    args = parse_args(["bench-mul", "--config", str(cfg), "--seed", "2"])
    assert (args.seed, args.net, args.max_arity) == (2, "n_high", 3)
    cfg.write_text('{"parties": 4}')
    assert parse_args(["bench-mlp", "--config", str(cfg)]).parties == 4


def test_cli_rejects_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("nonsense: 1\n")
    with pytest.raises(SystemExit):
        parse_args(["bench-mul", "--config", str(cfg)])


def test_cli_custom_net(tmp_path, capsys):
    assert main(["bench-mul", "--net", "custom"]) == 2
    out = tmp_path / "o.json"
    assert main(["bench-mul", "--net", "custom", "--latency-ms", "2", "--bandwidth-gbps", "0.5",
                 "--count", "2", "--method", "multi", "--out", str(out)]) == 0
    rows = load(out).rows
    assert len(rows) == 1 and rows[0]["latency_ms"] == 2.0 and rows[0]["method"] == "multivariate"


def test_cli_stdout_and_timing(capsys):
    assert main(["bench-nonlinear", "--function", "cos", "--points", "5", "--timing"]) == 0
    row = json.loads(capsys.readouterr().out)["rows"][0]
    assert row["t_comp_s"] is not None and row["function"] == "cos"
