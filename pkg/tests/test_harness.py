"""Run configs, deterministic artifacts, validation windows, CLI exit codes."""

import json

import numpy as np
import pytest

import hierdde as h
from hierdde import cli, harness
from hierdde.errors import ConfigError


SCALAR_SYS = {"d": 1, "n": 1, "sigma": [1.0],
              "A0": [[[0.0, 0.0]]], "A1": [[[1.0, 0.0]]]}
TWO_DELAY_SYS = {"d": 1, "n": 2, "sigma": [1.0, 1.0],
                 "A0": [[[0.3, 0.0]]], "A1": [[[0.1, 0.0]]], "A2": [[[0.1, 0.0]]]}


def _base_cfg(out=None, **extra):
    data = {"system": SCALAR_SYS, "eps": [1.0], "window": [0.0, 1.0, -1.0, 1.0]}
    if out is not None:
        data["out"] = str(out)
    data.update(extra)
    return data


def test_config_fields():
    cfg = h.config_from_dict(_base_cfg())
    assert cfg.eps_list == (1.0,)
    assert cfg.window == h.Rectangle(0.0, 1.0, -1.0, 1.0)
    assert cfg.tol == 1e-9
    assert cfg.out_format == "csv"
    assert cfg.system.d == 1 and cfg.system.n == 1


def test_config_rejects_bad_input():
    for patch in ({"bogus": 1},
                  {"eps": [0.01, 0.05]},       # must decrease strictly
                  {"eps": [0.05, 0.05]},
                  {"window": [1.0, 0.0, -1.0, 1.0]},
                  {"validation": {"weird": 1}},
                  {"grid": {"weird": 1}}):
        with pytest.raises(ConfigError):
            h.config_from_dict(_base_cfg(**patch))


def test_config_loads_system_from_relative_path(tmp_path):
    s = h.DelaySystem.scalar(-0.4 + 0.5j, (0.1, 0.2))
    h.save_system(s, tmp_path / "sys.json")
    cfg = h.config_from_dict({"system": "sys.json", "eps": [0.5]},
                             base_dir=str(tmp_path))
    assert cfg.system.n == 2
    assert np.array_equal(cfg.system.matrices[0], s.matrices[0])


def test_spectrum_run_is_deterministic(tmp_path):
    res1 = h.run_spectrum(h.config_from_dict(_base_cfg(out=tmp_path / "a")))
    res2 = h.run_spectrum(h.config_from_dict(_base_cfg(out=tmp_path / "b")))
    b1 = open(res1.path, "rb").read()
    b2 = open(res2.path, "rb").read()
    assert b1 == b2
    lines = b1.decode().splitlines()
    assert lines[0] == "eps,re,im,multiplicity,residual"
    assert len(lines) == 2
    eps_s, re_s, im_s, mult_s, resid_s = lines[1].split(",")
    assert float(eps_s) == 1.0
    assert float(re_s) == pytest.approx(0.567143290409784, abs=1e-12)
    assert float(im_s) == 0.0
    assert mult_s == "1"
    assert float(resid_s) <= 1e-12


def test_spectrum_empty_window_writes_header_only(tmp_path):
    stable = {"d": 1, "n": 1, "sigma": [1.0],
              "A0": [[[-1.0, 0.0]]], "A1": [[[0.5, 0.0]]]}
    cfg = h.config_from_dict({"system": stable, "eps": [0.5],
                              "window": [5.0, 6.0, 0.0, 1.0],
                              "out": str(tmp_path)})
    res = h.run_spectrum(cfg)
    assert len(res.runs[0].roots) == 0
    assert open(res.path).read().splitlines() == \
        ["eps,re,im,multiplicity,residual"]


def test_spectrum_json_format(tmp_path):
    cfg = h.config_from_dict(_base_cfg(out=tmp_path, format="json"))
    res = h.run_spectrum(cfg)
    assert res.path.endswith("spectrum.json")
    data = json.load(open(res.path))
    (run,) = data["runs"]
    assert run["eps"] == 1.0
    (root,) = run["roots"]
    assert root["re"] == pytest.approx(0.567143290409784, abs=1e-12)
    assert root["multiplicity"] == 1


def test_apply_overrides():
    cfg = h.config_from_dict(_base_cfg())
    cfg2 = harness.apply_overrides(cfg, eps=[0.5, 0.25],
                                   window=[-1.0, 1.0, -2.0, 2.0],
                                   out_dir="x", out_format="json",
                                   grid_omega=21, grid_phase=8, tol=1e-8)
    assert cfg2.eps_list == (0.5, 0.25)
    assert cfg2.window == h.Rectangle(-1.0, 1.0, -2.0, 2.0)
    assert cfg2.out_dir == "x" and cfg2.out_format == "json"
    assert cfg2.grid.omega_count == 21 and cfg2.grid.phase_count == 8
    assert cfg2.tol == 1e-8
    # the original config is untouched
    assert cfg.eps_list == (1.0,) and cfg.out_format == "csv"


def test_validation_window_precedence():
    # an explicit window applies to every eps as-is
    cfgw = h.config_from_dict({"system": SCALAR_SYS, "eps": [0.5, 0.25],
                               "window": [-9.0, 9.0, -1.0, 1.0]})
    assert h.validation_window(cfgw) == [h.Rectangle(-9.0, 9.0, -1.0, 1.0)] * 2
    # a half-width rule scales with eps
    cfgc = h.config_from_dict({
        "system": {"d": 1, "n": 2, "sigma": [1.0, 1.0], "A0": [[[-0.4, 0.5]]],
                   "A1": [[[0.1, 0.0]]], "A2": [[[0.2, 0.0]]]},
        "eps": [0.5, 0.25],
        "validation": {"re_halfwidth_coef": 0.4, "re_halfwidth_power": 1.0}})
    wins = h.validation_window(cfgc)
    assert wins[0].re_max == pytest.approx(0.2)
    assert wins[1].re_max == pytest.approx(0.1)
    assert wins[0].im_max == 3.0


def test_validation_window_from_top_scale_sup():
    # default rule: half-width 10 * eps^n * (1 + |top-scale sup|)
    cfg = h.preset_config("fig2-stable", eps_list=(0.05,))
    (win,) = h.validation_window(cfg)
    want = 10.0 * 0.05 ** 2 * (1.0 + abs(np.log(1.5)))
    assert win.re_max == pytest.approx(want, rel=1e-6)
    assert win.re_min == pytest.approx(-want, rel=1e-6)


def test_validation_window_refuses_infinite_sup():
    cfg = h.config_from_dict({"system": h.system_to_dict(h.preset_system("fig3")),
                              "eps": [0.05]})
    with pytest.raises(ConfigError):
        h.validation_window(cfg)
    # the packaged preset carries its own half-width rule instead
    (win,) = h.validation_window(h.preset_config("fig3", eps_list=(0.05,)))
    assert win.re_max == pytest.approx(0.4 * 0.05)


def test_run_classify_writes_verdict(tmp_path):
    cfg = h.config_from_dict({"system": h.system_to_dict(h.preset_system("fig2-stable")),
                              "eps": [0.05], "out": str(tmp_path)})
    h.run_classify(cfg)
    data = json.load(open(tmp_path / "classify.json"))
    assert data["status"] == "Stable"
    assert data["scale"] is None
    assert len(data["sup_gammas"]) == 2


def test_run_manifolds_writes_samples(tmp_path):
    cfg = h.config_from_dict({"system": SCALAR_SYS, "eps": [1.0],
                              "out": str(tmp_path), "grid": {"omega": 11}})
    res = h.run_manifolds(cfg)
    assert len(res.paths) >= 1
    lines = open(res.paths[0]).read().splitlines()
    assert lines[0].startswith("k,omega")
    total = sum(len(v) for v in res.plain.values()) \
        + sum(len(v) for v in res.tilde.values())
    assert len(lines) == 1 + total
    assert sorted(res.plain.keys()) == [1]
    assert len(res.plain[1]) == 11


def test_run_validate_report(tmp_path):
    cfg = h.config_from_dict({"system": TWO_DELAY_SYS, "eps": [0.1],
                              "window": [0.0, 0.6, -0.5, 0.5],
                              "out": str(tmp_path)})
    rep = h.run_validate(cfg)
    (rec,) = rep.records
    assert rec.eps == 0.1 and rec.count == 1
    assert rec.strong_matches == 1
    (a,) = rec.assignments
    assert a.assigned and a.scale == 0 and a.multiplicity == 1
    assert a.distance <= 0.01
    assert a.runner_up_distance > a.distance
    assert rec.max_distance == {0: pytest.approx(a.distance)}
    assert (tmp_path / "validate.json").exists()
    assert (tmp_path / "validate.csv").exists()


def test_run_example_artifacts(tmp_path):
    summary = h.run_example("fig2-stable", out_dir=str(tmp_path))
    assert sorted(summary.keys()) == [
        "gamma1_zeros", "max_gamma1_discrepancy", "max_gamma2_discrepancy",
        "name", "params", "scale_closed", "scale_general", "singular_phases",
        "status_closed", "status_general", "sup_gamma2_closed",
        "sup_gamma2_discrepancy", "sup_gamma2_general"]
    assert summary["name"] == "fig2-stable"
    assert summary["max_gamma1_discrepancy"] <= 1e-6
    assert summary["max_gamma2_discrepancy"] <= 1e-6
    assert summary["sup_gamma2_discrepancy"] <= 1e-4
    assert summary["status_closed"] == summary["status_general"] == "Stable"
    assert summary["gamma1_zeros"] is None
    for name in ("example_fig2-stable.json", "example_fig2-stable_gamma1.csv",
                 "example_fig2-stable_gamma2.csv"):
        assert (tmp_path / name).exists(), name


def test_cli_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(_base_cfg(out=tmp_path / "out")))
    assert cli.main(["spectrum", "--config", str(good)]) == 0
    assert "spectrum" in capsys.readouterr().out
    assert (tmp_path / "out" / "spectrum.csv").exists()

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(_base_cfg(bogus=1)))
    assert cli.main(["spectrum", "--config", str(bad)]) == 2
    assert cli.main(["spectrum", "--config", str(tmp_path / "missing.json")]) == 2

    guard = tmp_path / "guard.json"
    guard.write_text(json.dumps({
        "system": {"d": 1, "n": 2, "sigma": [1.0, 1.0], "A0": [[[0.0, 0.0]]],
                   "A1": [[[1.0, 0.0]]], "A2": [[[1.0, 0.0]]]},
        "eps": [0.01], "window": [-0.08, 0.08, -1.0, 1.0],
        "out": str(tmp_path / "out3")}))
    assert cli.main(["spectrum", "--config", str(guard)]) == 3

    degen = tmp_path / "degen.json"
    degen.write_text(json.dumps({
        "system": {"d": 2, "n": 1, "sigma": [1.0],
                   "A0": [[[-1.2, 0.0], [0.7, 0.0]], [[0.0, 0.0], [0.5, 0.0]]],
                   "A1": [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]},
        "eps": [0.1], "out": str(tmp_path / "out4")}))
    assert cli.main(["classify", "--config", str(degen)]) == 4
    capsys.readouterr()


def test_cli_overrides_and_example(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(_base_cfg(out=tmp_path / "o1")))
    assert cli.main(["spectrum", "--config", str(good),
                     "--format", "json", "--out", str(tmp_path / "o2")]) == 0
    assert (tmp_path / "o2" / "spectrum.json").exists()
    assert cli.main(["example", "fig2-stable", "--out", str(tmp_path / "ex")]) == 0
    assert (tmp_path / "ex" / "example_fig2-stable.json").exists()
    capsys.readouterr()
