"""Config round-trips, error diagnostics, and the command-line surface."""

import json
import math

import pytest

from ruinbounds import (
    BoundResult,
    ConstantRates,
    EventModel,
    ExplicitRates,
    Normal,
    Periodic,
    PeriodicRates,
    RiskModel,
    bound_optimize,
    reduce_event_model,
)
from ruinbounds import cli
from ruinbounds.serialize import (
    ConfigError,
    dump_model,
    load_model,
    model_from_dict,
    model_to_dict,
)


BUNDLED = (
    "alternating_normals",
    "classical_poisson_exponential",
    "linear_drift_normals",
    "two_point_decay",
    "uniform_exponential_cycle",
)


def bundled_path(name):
    return cli._resolve_model_path(name)


def run_cli(argv, capsys):
    rc = cli.main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


# ---------------------------------------------------------------------------
# dict round-trips


class TestRoundTrips:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled_configs_round_trip(self, name):
        model = load_model(bundled_path(name))
        again = model_from_dict(model_to_dict(model))
        assert again == model
        assert model.label  # every shipped config is labelled

    def test_bare_number_rates_shorthand(self):
        m = model_from_dict({
            "increments": {"kind": "indexed_normal", "slope": -0.5, "intercept": 0.25},
            "rates": 0.05,
        })
        assert m.rates == ConstantRates(0.05)
        # the shorthand is normalized on the way back out
        assert model_to_dict(m)["rates"] == {"kind": "constant", "rate": 0.05}

    def test_rates_default_to_zero(self):
        m = model_from_dict({"increments": {"kind": "indexed_two_point"}})
        assert m.rates == ConstantRates(0.0)

    def test_nested_families_round_trip(self):
        cfg = {
            "increments": {
                "kind": "prefix_tail",
                "prefix": [
                    {"family": "degenerate", "value": -1.5},
                    {"family": "scaled", "factor": 0.5,
                     "inner": {"family": "two_point", "x1": 1.0, "p1": 0.25, "x2": -1.0}},
                ],
                "tail": {
                    "kind": "periodic",
                    "cycle": [
                        {"family": "finite_discrete",
                         "atoms": [[-1.0, 0.75], [2.0, 0.25]]},
                    ],
                },
            },
            "rates": {"kind": "periodic", "values": [0.0, 0.1]},
            "label": "mixed families",
        }
        m = model_from_dict(cfg)
        assert model_from_dict(model_to_dict(m)) == m

    def test_quasi_periodic_and_explicit_rates_round_trip(self):
        cfg = {
            "increments": {
                "kind": "quasi_periodic",
                "scale": 0.5,
                "cycle": [{"family": "uniform", "lower": -2.0, "upper": 1.0}],
            },
            "rates": {"kind": "explicit", "values": [0.1, 0.0, 0.2]},
        }
        m = model_from_dict(cfg)
        assert m.rates == ExplicitRates((0.1, 0.0, 0.2))
        assert model_from_dict(model_to_dict(m)) == m

    def test_event_model_round_trip_and_reduction(self):
        cfg = {
            "claim": {"kind": "periodic",
                      "cycle": [{"family": "shifted_exponential", "rate": 1.0}]},
            "interarrival": {"kind": "periodic",
                             "cycle": [{"family": "shifted_exponential", "rate": 0.5}]},
            "premium_rate": 1.2,
            "reserve_interest": 0.1,
            "premium_interest": 0.05,
            "label": "interest-bearing classical",
        }
        em = model_from_dict(cfg)
        assert isinstance(em, EventModel)
        assert model_from_dict(model_to_dict(em)) == em
        reduced = reduce_event_model(em)
        assert isinstance(reduced, RiskModel)
        assert reduced.rates == ConstantRates(0.1)

    def test_label_omitted_when_empty(self):
        m = RiskModel(Periodic((Normal(-0.5, 1.0),)))
        assert "label" not in model_to_dict(m)


# ---------------------------------------------------------------------------
# diagnostics


class TestDiagnostics:
    @pytest.mark.parametrize("cfg, fragment", [
        ({"increments": {"kind": "periodic",
                         "cycle": [{"family": "normal", "mean": 0.0,
                                    "variance": 1.0, "extra": 3}]}},
         "$.increments.cycle[0]: unknown key 'extra'"),
        ({"increments": {"kind": "periodic"}},
         "$.increments: missing required key 'cycle'"),
        ({"increments": {"kind": "periodic",
                         "cycle": [{"family": "normal", "mean": True, "variance": 1.0}]}},
         "'mean' must be a number, got True"),
        ({"increments": {"kind": "periodic",
                         "cycle": [{"family": "normal", "mean": 0.0, "variance": -1.0}]}},
         "$.increments.cycle[0]: Normal.variance must be positive"),
        ({"increments": {"kind": "nope"}},
         "unknown increments kind 'nope'"),
        ({"increments": {"kind": "periodic", "cycle": []}},
         "'cycle' must be a nonempty list"),
        ({"increments": {"kind": "periodic", "cycle": [{"family": "martian"}]}},
         "unknown distribution family 'martian'"),
        ({"increments": {"kind": "indexed_two_point"}, "rates": {"kind": "bogus"}},
         "$.rates: unknown rates kind 'bogus'"),
        ({"increments": {"kind": "indexed_two_point"}, "typo": 1},
         "unknown key 'typo'"),
    ])
    def test_bad_configs_carry_positions(self, cfg, fragment):
        with pytest.raises(ConfigError) as exc:
            model_from_dict(cfg)
        assert fragment in str(exc.value)

    def test_second_cycle_entry_is_indexed(self):
        cfg = {"increments": {"kind": "periodic", "cycle": [
            {"family": "normal", "mean": 0.0, "variance": 1.0},
            {"family": "uniform", "lower": 2.0, "upper": 1.0},
        ]}}
        with pytest.raises(ConfigError, match=r"\$\.increments\.cycle\[1\]"):
            model_from_dict(cfg)

    def test_model_must_be_an_object(self):
        with pytest.raises(ConfigError, match="model must be an object, got list"):
            model_from_dict([1, 2])

    def test_config_error_is_a_value_error(self):
        # callers that only guard against ValueError still catch config trouble
        assert issubclass(ConfigError, ValueError)


# ---------------------------------------------------------------------------
# file I/O


class TestLoadDump:
    def test_dump_then_load_is_identity(self, tmp_path):
        model = load_model(bundled_path("uniform_exponential_cycle"))
        out = tmp_path / "copy.json"
        dump_model(model, str(out))
        assert load_model(str(out)) == model
        # dumps are plain indented JSON with a trailing newline
        text = out.read_text(encoding="utf-8")
        assert text.endswith("\n")
        json.loads(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_model(str(tmp_path / "absent.json"))

    def test_invalid_json_reports_position(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text('{"increments": \n  oops}', encoding="utf-8")
        with pytest.raises(ConfigError, match=r"invalid JSON .* at line 2 column 3"):
            load_model(str(p))


# ---------------------------------------------------------------------------
# command line: happy paths


class TestCliBound:
    def test_csv_golden(self, capsys):
        rc, out, err = run_cli(
            ["bound", "--model", "alternating_normals", "--u", "2,4"], capsys)
        assert rc == 0
        assert err == ""
        assert out == (
            "u,method,h_star,log10_bound,C,L,certified\n"
            "2,optimized,1,-0.760015343331,1.28402541669,1,true\n"
            "4,optimized,1,-1.62860430714,1.28402541669,1,true\n"
        )

    def test_json_matches_library(self, capsys):
        rc, out, err = run_cli(
            ["bound", "--model", "alternating_normals", "--u", "3",
             "--format", "json"], capsys)
        assert rc == 0
        rows = json.loads(out)
        assert len(rows) == 1
        model = load_model(bundled_path("alternating_normals"))
        ref = bound_optimize(model, 3.0)
        assert rows[0]["log10_bound"] == pytest.approx(ref.log10_bound, rel=1e-12)
        assert rows[0]["certified"] is True

    def test_colon_range_is_inclusive(self, capsys):
        rc, out, _ = run_cli(
            ["bound", "--model", "alternating_normals", "--u", "1:3:0.5"], capsys)
        assert rc == 0
        lines = out.strip().split("\n")
        assert [row.split(",")[0] for row in lines[1:]] == ["1", "1.5", "2", "2.5", "3"]

    def test_periodic_method_reports_period_root(self, capsys):
        rc, out, _ = run_cli(
            ["bound", "--model", "uniform_exponential_cycle", "--u", "5",
             "--method", "periodic"], capsys)
        assert rc == 0
        row = out.strip().split("\n")[1].split(",")
        assert float(row[2]) == pytest.approx(0.7185814123725071, abs=1e-8)
        assert row[6] == "true"

    def test_out_file_matches_stdout(self, tmp_path, capsys):
        argv = ["bound", "--model", "two_point_decay", "--u", "6"]
        rc, out, _ = run_cli(argv, capsys)
        assert rc == 0
        dest = tmp_path / "rows.csv"
        rc2, out2, _ = run_cli(argv + ["--out", str(dest)], capsys)
        assert rc2 == 0
        assert out2 == ""
        assert dest.read_text(encoding="utf-8") == out

    def test_rerun_on_dumped_copy_is_byte_identical(self, tmp_path, capsys):
        copy = tmp_path / "again.json"
        dump_model(load_model(bundled_path("uniform_exponential_cycle")), str(copy))
        argv = ["--u", "2,5,10"]
        rc1, out1, _ = run_cli(
            ["bound", "--model", "uniform_exponential_cycle"] + argv, capsys)
        rc2, out2, _ = run_cli(["bound", "--model", str(copy)] + argv, capsys)
        assert rc1 == rc2 == 0
        assert out1 == out2


class TestCliAdjustment:
    def test_classical_reports_all_flavors(self, capsys):
        rc, out, err = run_cli(
            ["adjustment", "--model", "classical_poisson_exponential"], capsys)
        assert rc == 0
        assert err == ""
        lines = out.strip().split("\n")
        assert lines[0] == "flavor,value,certified,bracket_low,bracket_high,boundary,note"
        table = {row.split(",")[0]: row.split(",") for row in lines[1:]}
        assert set(table) == {"per_increment", "partial_sum", "period_root", "kappa"}
        for row in table.values():
            assert float(row[1]) == pytest.approx(0.5, abs=1e-8)
            assert row[2] == "true"

    def test_two_cycle_model_omits_kappa(self, capsys):
        rc, out, _ = run_cli(
            ["adjustment", "--model", "alternating_normals"], capsys)
        assert rc == 0
        flavors = [row.split(",")[0] for row in out.strip().split("\n")[1:]]
        assert "kappa" not in flavors
        assert "period_root" in flavors


class TestCliCompare:
    def test_winner_is_the_row_minimum(self, capsys):
        rc, out, err = run_cli(
            ["compare", "--model", "classical_poisson_exponential", "--u", "30",
             "--paths", "20000", "--horizon", "400", "--stop-gap", "60",
             "--seed", "1"], capsys)
        assert rc == 0
        header, row = [line.split(",") for line in out.strip().split("\n")]
        assert header == ["u", "log10_optimized", "log10_union", "log10_per_increment",
                          "log10_external_a", "log10_external_b",
                          "mc_estimate", "mc_ci_high", "winner"]
        rec = dict(zip(header, row))
        methods = ("optimized", "union", "per_increment", "external_a", "external_b")
        values = {m: float(rec[f"log10_{m}"]) for m in methods}
        assert rec["winner"] == min(values, key=values.get)
        # at this horizon the tuned exponent beats both external reference curves,
        # which have already clamped to the trivial certificate
        assert values["external_a"] == 0.0
        assert values["external_b"] == 0.0
        assert values[rec["winner"]] == pytest.approx(-6.514, abs=1e-2)


class TestCliSimulate:
    def test_dominated_rows_frozen(self, capsys):
        rc, out, err = run_cli(
            ["simulate", "--model", "classical_poisson_exponential", "--u", "2,4",
             "--paths", "20000", "--horizon", "400", "--stop-gap", "60",
             "--seed", "0"], capsys)
        assert rc == 0
        assert err == ""
        lines = out.strip().split("\n")
        assert lines[0] == "u,n_paths,K,ruin_count,estimate,ci_low,ci_high,bound,dominated"
        first = lines[1].split(",")
        second = lines[2].split(",")
        assert int(first[3]) == 3694
        assert int(second[3]) == 1357
        assert first[8] == second[8] == "true"

    def test_bound_method_none_leaves_columns_blank(self, capsys):
        rc, out, _ = run_cli(
            ["simulate", "--model", "classical_poisson_exponential", "--u", "2",
             "--paths", "5000", "--horizon", "200", "--stop-gap", "60",
             "--bound-method", "none"], capsys)
        assert rc == 0
        row = out.strip().split("\n")[1].split(",")
        assert row[7] == "" and row[8] == ""

    def test_thread_env_does_not_change_output(self, tmp_path, capsys, monkeypatch):
        argv = ["simulate", "--model", "uniform_exponential_cycle", "--u", "5",
                "--paths", "30000", "--horizon", "300", "--stop-gap", "60",
                "--seed", "9"]
        outs = []
        for threads in ("1", "6"):
            monkeypatch.setenv("RUINBOUND_THREADS", threads)
            rc, out, _ = run_cli(argv, capsys)
            assert rc == 0
            outs.append(out)
        assert outs[0] == outs[1]


# ---------------------------------------------------------------------------
# command line: failure modes


class TestCliConfigErrors:
    @pytest.mark.parametrize("argv, fragment", [
        (["bound", "--model", "no_such_model", "--u", "1"],
         "no bundled config of that name"),
        (["bound", "--model", "alternating_normals", "--u", "3,2"],
         "strictly increasing"),
        (["bound", "--model", "alternating_normals", "--u", "0"],
         "strictly positive"),
        (["bound", "--model", "alternating_normals", "--u", "abc"],
         "cannot parse --u"),
        (["bound", "--model", "alternating_normals", "--u", "1", "--method", "fixed_h"],
         "--method fixed_h needs --h"),
        (["bound", "--model", "alternating_normals", "--u", "1",
          "--method", "shift_window"],
         "--method shift_window needs --lstar"),
    ])
    def test_exit_two_with_diagnostic(self, argv, fragment, capsys):
        rc, out, err = run_cli(argv, capsys)
        assert rc == 2
        assert out == ""
        assert err.startswith("config error:")
        assert fragment in err

    def test_unknown_name_lists_bundled_configs(self, capsys):
        rc, _, err = run_cli(["bound", "--model", "missing", "--u", "1"], capsys)
        assert rc == 2
        for name in BUNDLED:
            assert name in err

    def test_broken_config_file_position_reaches_stderr(self, tmp_path, capsys):
        p = tmp_path / "m.json"
        p.write_text(json.dumps({
            "increments": {"kind": "periodic",
                           "cycle": [{"family": "normal", "mean": 0.0}]},
        }), encoding="utf-8")
        rc, _, err = run_cli(["bound", "--model", str(p), "--u", "1"], capsys)
        assert rc == 2
        assert "$.increments.cycle[0]: missing required key 'variance'" in err


class TestCliStrictAndDominance:
    @pytest.fixture
    def uncertain_model(self, tmp_path):
        # strong discounting flattens the scan terms before a certifying run
        # can accumulate, so the partial-sum coefficient stays a lower estimate
        p = tmp_path / "uncertain.json"
        p.write_text(json.dumps({
            "increments": {"kind": "indexed_normal", "slope": -1.0, "intercept": 0.0},
            "rates": 2.0,
        }), encoding="utf-8")
        return str(p)

    def test_adjustment_warns_without_strict(self, uncertain_model, capsys):
        rc, out, err = run_cli(
            ["adjustment", "--model", uncertain_model, "--kmax", "60"], capsys)
        assert rc == 0
        assert "warning: uncertified coefficients" in err
        table = {row.split(",")[0]: row.split(",") for row in out.strip().split("\n")[1:]}
        assert table["partial_sum"][2] == "false"
        assert "lower estimate" in table["partial_sum"][6]

    def test_adjustment_strict_exits_three(self, uncertain_model, capsys):
        rc, out, err = run_cli(
            ["adjustment", "--model", uncertain_model, "--kmax", "60", "--strict"],
            capsys)
        assert rc == 3
        assert "partial_sum" in err

    def test_dominance_violation_exits_four(self, capsys, monkeypatch):
        def impossibly_small(model, u, policy=None, **kwargs):
            return BoundResult(u=u, log_bound=-50.0, h_star=1.0,
                               method="optimized", certificate=None, certified=True)

        monkeypatch.setattr(cli, "bound_optimize", impossibly_small)
        rc, out, err = run_cli(
            ["simulate", "--model", "classical_poisson_exponential", "--u", "2",
             "--paths", "5000", "--horizon", "200", "--stop-gap", "60",
             "--strict"], capsys)
        assert rc == 4
        assert "escaped above its bound" in err
        assert out.strip().split("\n")[1].split(",")[8] == "false"
