import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsubtest.errors import ConfigError
from qsubtest.harness import (
    REPORT_HEADER,
    ExperimentConfig,
    campaign_mutants,
    format_config,
    load_config,
    parse_config,
    report_from_csv,
    report_from_json,
    run_experiment,
)

SMALL = """
benchmarks = Empty:2, CRk:2
kinds = GM, MM
limit_per_kind = 3
inputs = CI, CSI
trials_per_n = 3
seed = 11
"""


@pytest.fixture(scope="module")
def small_report():
    return run_experiment(parse_config(SMALL), jobs=1)


def test_parse_config_fields():
    cfg = parse_config(SMALL)
    assert cfg.benchmarks == (("Empty", 2), ("CRk", 2))
    assert cfg.kinds == ("GM", "MM")
    assert cfg.limit("GM") == 3
    assert cfg.inputs == ("CI", "CSI")
    assert cfg.trials(2) == 6 and cfg.seed == 11


def test_default_scale_and_per_kind_limits():
    cfg = parse_config("benchmarks = QFT\nlimit_per_kind = 5\nlimits = MM:1\n")
    assert cfg.benchmarks[0][0] == "QFT" and cfg.benchmarks[0][1] >= 1
    assert cfg.limit("MM") == 1 and cfg.limit("GM") == 5
    assert parse_config("benchmarks = QFT:2\ntrials_per_mutant = 9\n").trials(2) == 9


@pytest.mark.parametrize("name", ["smoke", "superposition", "mm_invisibility", "trigger_rates"])
def test_shipped_configs_load(name):
    cfg = load_config(f"configs/{name}.cfg")
    assert parse_config(format_config(cfg)) == cfg


@given(
    st.lists(st.sampled_from(["Empty:2", "QFT:3", "CRk:2", "Reverse:4"]), min_size=1, max_size=3, unique=True),
    st.lists(st.sampled_from(["GM", "SM", "CM", "MM"]), min_size=1, max_size=4, unique=True),
    st.integers(1, 50),
    st.integers(0, 2**31),
)
def test_format_round_trip(benches, kinds, trials, seed):
    text = f"benchmarks = {', '.join(benches)}\nkinds = {', '.join(kinds)}\ntrials_per_n = {trials}\nseed = {seed}\n"
    cfg = parse_config(text)
    assert parse_config(format_config(cfg)) == cfg


@pytest.mark.parametrize("text", [
    "benchmarks = QFT:2\nbogus = 1\n",
    "benchmarks = QFT:2\nseed = 1\nseed = 2\n",
    "seed = 1\n",
    "benchmarks = Nope:2\n",
    "benchmarks = QFT:x\n",
    "benchmarks = QFT:0\n",
    "benchmarks = QFT:17\n",
    "benchmarks = QFT:2\nkinds = GM, XX\n",
    "benchmarks = QFT:2\ninputs = STV\n",
    "benchmarks = QFT:2\ntrials_per_n = 0\n",
    "benchmarks = QFT:2\nnot a pair\n",
    "benchmarks = QFT:2\njobs = 0\n",
])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_empty_benchmarks_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig(benchmarks=())


def test_report_shape_and_conservation(small_report):
    cfg = parse_config(SMALL)
    rows = small_report.rows
    assert len(rows) == len(cfg.benchmarks) * len(cfg.kinds) * len(cfg.inputs)
    for r in rows:
        ms = [m for m in campaign_mutants(r["benchmark"], r["n"], cfg.kinds, cfg.limits, cfg.seed)
              if m.kind.value == r["kind"]]
        assert r["mutants"] == len(ms)
        assert r["trials"] == r["mutants"] * cfg.trials(r["n"])
        assert 0 <= r["triggers"] <= r["trials"]
        if r["trials"]:
            assert r["rate"] == pytest.approx(r["triggers"] / r["trials"])


def test_mm_never_triggers_under_ci(small_report):
    assert small_report.rate(kind="MM", input_kind="CI") == 0


def test_aggregate_rate(small_report):
    rows = [r for r in small_report.rows if r["input"] == "CSI"]
    expect = sum(r["triggers"] for r in rows) / sum(r["trials"] for r in rows)
    assert small_report.rate(input_kind="CSI") == pytest.approx(expect)
    assert small_report.rate(benchmark="Nope") != small_report.rate(benchmark="Nope")


def test_deterministic_and_parallel_equivalent(small_report):
    cfg = parse_config(SMALL)
    assert run_experiment(cfg, jobs=1).to_csv() == small_report.to_csv()
    assert run_experiment(cfg, jobs=2).to_csv() == small_report.to_csv()


def test_seed_changes_corpus():
    a = campaign_mutants("QFT", 2, ("GM",), (("*", 4),), 0)
    b = campaign_mutants("QFT", 2, ("GM",), (("*", 4),), 1)
    assert [m.manifest_row() for m in a] != [m.manifest_row() for m in b]


def test_csv_and_json_round_trip(small_report, tmp_path):
    csv_path, side = small_report.write(tmp_path / "r.csv")
    text = csv_path.read_text()
    assert text.splitlines()[0] == ",".join(REPORT_HEADER)
    assert report_from_csv(text).to_csv() == text
    doc = json.loads(side.read_text())
    assert doc["config"]["seed"] == 11
    assert report_from_json(side.read_text()).to_csv() == text


def test_write_overwrites_unless_append(small_report, tmp_path):
    path = tmp_path / "r.csv"
    small_report.write(path)
    small_report.write(path)
    assert path.read_text() == small_report.to_csv()
    small_report.write(path, append=True)
    lines = path.read_text().splitlines()
    assert lines.count(",".join(REPORT_HEADER)) == 1
    assert len(lines) == 1 + 2 * len(small_report.rows)


def test_bad_reports_rejected():
    with pytest.raises(ConfigError):
        report_from_csv("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        report_from_json("{}")
