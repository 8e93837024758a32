"""Tests for configuration parsing, presets and CSV output."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from src.experiments.output import emit_csv, render_csv
from src.experiments.parser import apply_overrides, parse_config, render_config
from src.experiments.presets import oracle_failures, run_experiment
from src.models.schemas import ExperimentConfig, ResultTable
from src.utils.errors import ConfigParseError


def test_defaults_for_fig3():
    """A bare preset line keeps every default."""
    cfg = parse_config("preset=fig3")
    assert cfg.preset == "fig3"
    assert (cfg.f_min, cfg.f_max, cfg.f_step) == (0.5, 1.0, 0.01)
    assert cfg.p1 == 0.99
    assert cfg.eta == 1.0


def test_override_applied():
    """Later keys override defaults."""
    cfg = parse_config("preset=threshold-scan\np1=0.95")
    assert cfg.preset == "threshold-scan"
    assert cfg.p1 == 0.95


def test_comments_and_blank_lines_ignored():
    """'#' starts a comment."""
    cfg = parse_config("# sweep\n\npreset=decay-scan  # trailing\nn_max=8\n")
    assert cfg.preset == "decay-scan"
    assert cfg.n_max == 8


def test_lists_are_comma_separated():
    """Grid keys take comma-separated values."""
    cfg = parse_config("segments=2, 4,8\np1_grid=0.9,1.0")
    assert cfg.segments == [2, 4, 8]
    assert cfg.p1_grid == [0.9, 1.0]


@pytest.mark.parametrize(
    "text, line",
    [
        ("eta=1.5", 1),
        ("preset=fig3\neta=1.5", 2),
        ("preset=fig3\n\ncolour=blue", 3),
        ("p1=abc", 1),
        ("preset=fig3\nno equals sign", 2),
        ("preset=nonsense", 1),
        ("p1=0.9\np1=0.8", 2),
        ("segments=2,x", 1),
        ("p1=", 1),
    ],
)
def test_parse_errors_name_the_line(text, line):
    """Unknown keys, malformed values and range errors carry their line number."""
    with pytest.raises(ConfigParseError) as excinfo:
        parse_config(text)
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}:")


def test_inconsistent_range_rejected():
    """f_min above f_max is a parse error."""
    with pytest.raises(ConfigParseError):
        parse_config("f_min=0.9\nf_max=0.6")


def test_apply_overrides_replaces_keys():
    """Overrides replace existing lines and append new ones."""
    text = apply_overrides("preset=fig3\np1=0.9\n", ["p1=0.95", "eta=0.99"])
    cfg = parse_config(text)
    assert cfg.p1 == 0.95
    assert cfg.eta == 0.99


def test_apply_overrides_rejects_bare_words():
    """Overrides must be key=value."""
    with pytest.raises(ConfigParseError):
        apply_overrides("", ["p1"])


probability = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@settings(max_examples=60)
@given(
    preset=st.sampled_from(["fig3", "threshold-scan", "chain-scan", "decay-scan", "oracle-check"]),
    bounds=st.lists(probability, min_size=2, max_size=2).map(sorted),
    p1=probability,
    eta=probability,
    grid=st.lists(probability, min_size=1, max_size=4),
    segments=st.lists(st.integers(min_value=0, max_value=64), min_size=1, max_size=4),
    samples=st.integers(min_value=1, max_value=500),
    out=st.one_of(st.none(), st.sampled_from(["results/out.csv", "results/run#1.csv"])),
)
def test_render_round_trips(preset, bounds, p1, eta, grid, segments, samples, out):
    """parse_config(render_config(cfg)) == cfg."""
    cfg = ExperimentConfig(
        preset=preset,
        f_min=bounds[0],
        f_max=bounds[1],
        p1=p1,
        eta=eta,
        p1_grid=grid,
        segments=segments,
        samples=samples,
        out=out,
    )
    assert parse_config(render_config(cfg)) == cfg


def test_hash_inside_value_is_literal():
    """Only whitespace-led "#" opens a comment, so paths may contain it."""
    cfg = ExperimentConfig(out="results/run#1.csv")
    assert parse_config(render_config(cfg)) == cfg
    assert parse_config("out=results/run#1.csv  # keep\n").out == "results/run#1.csv"


def test_value_with_comment_marker_rejected():
    """A value holding whitespace before "#" could not be read back."""
    with pytest.raises(ValidationError):
        ExperimentConfig(out="results/run #1.csv")


def test_fig3_table():
    """Default fig3 grid: 51 rows, fixed points at F = 1, DEP ahead of the baseline."""
    table = run_experiment(ExperimentConfig(preset="fig3", workers=2))
    assert len(table.rows) == 51
    assert table.columns[:5] == ["F", "dep_f_out", "bennett_f_out", "dep_p_succ", "bennett_p_succ"]
    last = dict(zip(table.columns, table.rows[-1]))
    assert last["F"] == 1.0
    assert last["dep_f_out"] == pytest.approx(1.0)
    assert last["bennett_f_out"] == pytest.approx(1.0)
    for dep, base in zip(table.column("dep_f_out"), table.column("bennett_f_out")):
        assert dep >= base
    assert "p2" in table.metadata["note"]


def test_threshold_scan_rows():
    """One row per (p1, η) with the fixed ideal and baseline thresholds."""
    table = run_experiment(ExperimentConfig(preset="threshold-scan", p1_grid=[0.99, 1.0], eta_grid=[1.0]))
    assert len(table.rows) == 2
    for value in table.column("ideal_dep"):
        assert value == pytest.approx(1 / 8, abs=1e-9)
    for value in table.column("bennett"):
        assert value == pytest.approx(0.5, abs=1e-9)
    assert table.column("error") == ["", ""]


def test_threshold_scan_follows_eta():
    """The noisy threshold column moves along the η axis."""
    table = run_experiment(ExperimentConfig(preset="threshold-scan", p1_grid=[0.99], eta_grid=[0.6, 1.0]))
    blurred, sharp = table.column("noisy_dep")
    assert blurred > sharp
    assert table.metadata["stage"] == "final"


def test_threshold_scan_honours_round_fidelity():
    """round_fidelity=distilled reports the post-selection threshold."""
    cfg = ExperimentConfig(preset="threshold-scan", p1_grid=[0.99], eta_grid=[1.0], round_fidelity="distilled")
    table = run_experiment(cfg)
    assert table.column("noisy_dep")[0] == pytest.approx(0.1164, abs=1e-4)
    assert table.metadata["stage"] == "distilled"


def test_chain_scan_flags_bad_rows():
    """Invalid chain sizes land in the error column instead of aborting."""
    table = run_experiment(ExperimentConfig(preset="chain-scan", segments=[1, 2, 3], rounds=[0]))
    errors = table.column("error")
    assert errors[0] == "" and errors[1] == ""
    assert "power of two" in errors[2]
    assert table.column("final_fidelity")[0] == pytest.approx(0.96)


def test_decay_scan_rows():
    """decay-scan emits N = 1..n_max and the fitted slope."""
    table = run_experiment(ExperimentConfig(preset="decay-scan", n_max=8, f0=0.95, p1=1.0))
    assert table.column("N") == list(range(1, 9))
    assert "decay_slope" in table.metadata


def test_oracle_check_passes():
    """A small oracle-check run has no failures."""
    table = run_experiment(ExperimentConfig(preset="oracle-check", samples=3, workers=2))
    assert oracle_failures(table) == 0
    assert table.metadata["failures"] == "0"
    gaps = [row for row in table.rows if row[-1] == 1]
    assert any("ideal limit" in row[0] for row in gaps)
    assert float(table.metadata["max_gated_difference"]) < 1e-10


def test_result_table_must_be_rectangular():
    """Ragged rows are rejected."""
    with pytest.raises(ValueError):
        ResultTable(columns=["a", "b"], rows=[[1.0]])
    with pytest.raises(ValueError):
        ResultTable(columns=["a"], rows=[[float("inf")]])


def test_empty_table_has_header_only(tmp_path):
    """Metadata lines and the header row, nothing else."""
    path = emit_csv(ResultTable(columns=["F", "f_out"], metadata={"preset": "fig3"}), tmp_path / "empty.csv")
    assert path.read_text(encoding="utf-8") == "# preset: fig3\nF,f_out\n"


def test_numbers_use_twelve_significant_digits():
    """Floats are written with 12 significant digits."""
    text = render_csv(ResultTable(columns=["x", "n"], rows=[[1 / 3, 4]]))
    assert text.splitlines()[-1] == "0.333333333333,4"


def test_same_config_gives_identical_bytes(tmp_path):
    """Two runs differ only in the timestamp line."""
    paths = []
    for name in ("a.csv", "b.csv"):
        cfg = ExperimentConfig(preset="fig3", f_min=0.9, out=str(tmp_path / "same.csv"))
        run_experiment(cfg)
        target = tmp_path / name
        target.write_bytes((tmp_path / "same.csv").read_bytes())
        paths.append(target)
    strip = lambda p: [line for line in p.read_text(encoding="utf-8").splitlines() if "generated_at" not in line]
    assert strip(paths[0]) == strip(paths[1])


def test_unwritable_path(tmp_path):
    """Writing below a regular file fails with an I/O error."""
    blocker = tmp_path / "blocker"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit_csv(ResultTable(columns=["F"]), blocker / "out.csv")
