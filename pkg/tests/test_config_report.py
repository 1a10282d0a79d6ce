import json
import math
import xml.etree.ElementTree as ET
from dataclasses import fields, replace
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsqnoise.config import ConfigError, RunConfig
from lsqnoise.experiment import FA, FB, FC, DEFAULT_MODELS, CampaignReport, CampaignRow, replay_cell, run_campaign
from lsqnoise.report import CSV_HEADER, csv_to_rows, render_fit_svg, report_to_csv, report_to_json

ROOT = Path(__file__).resolve().parents[1]
SVG = "{http://www.w3.org/2000/svg}"


class TestConfig:
    def test_defaults_match_reference_campaign(self):
        cfg = RunConfig()
        assert cfg.models == ("linear", "quadratic", "exponential")
        assert cfg.noises == ("FA", "FB", "FC")
        assert cfg.levels == (1.0, 5.0, 10.0, 15.0, 20.0)
        assert cfg.n == 200

    def test_round_trip_default(self):
        cfg = RunConfig()
        assert RunConfig.from_text(cfg.to_text()) == cfg

    def test_round_trip_custom(self):
        cfg = RunConfig(models=("exponential",), noises=("FC", "FA"), levels=(0.1, 33.3),
                        seeds=(4, 9, 2), n=57, seed=2**64 - 1, out="x/y", plots=True, fb_sigma=0.1,
                        centered=False, stretched_method="exact", workers=3,
                        exponential_params=(0.1, 1 / 7, 2.0, -1e-17))
        assert RunConfig.from_text(cfg.to_text()) == cfg

    @given(st.lists(st.floats(1e-6, 100), min_size=1, max_size=5),
           st.lists(st.integers(0, 2**32 - 1), min_size=1, max_size=6, unique=True),
           st.floats(0, 10))
    def test_round_trip_property(self, levels, seeds, fb_sigma):
        cfg = RunConfig(levels=tuple(levels), seeds=tuple(seeds), fb_sigma=fb_sigma)
        assert RunConfig.from_text(cfg.to_text()) == cfg

    def test_seed_range(self):
        assert RunConfig.from_text("seeds = 0..199").seeds == tuple(range(200))
        assert "seeds = 0..199" in RunConfig(seeds=tuple(range(200))).to_text()

    def test_shipped_example_is_exhaustive(self):
        text = (ROOT / "configs" / "default.cfg").read_text()
        assert RunConfig.from_text(text) == RunConfig()
        for f in fields(RunConfig):
            assert f"{f.name} =" in text, f.name

    def test_ensemble_config(self):
        cfg = RunConfig.load(ROOT / "configs" / "ensemble.cfg")
        assert len(cfg.seeds) == 200 and cfg.plots

    @pytest.mark.parametrize("text,field", [
        ("modles = linear", "modles"),
        ("n = 20\nn = 30", "n"),
        ("levels = 1, , 5", "levels"),
        ("levels = 0", "levels"),
        ("noises = FA, FD", "noises"),
        ("models = cubic", "models"),
        ("plots = maybe", "plots"),
        ("seed = -4", "seed"),
        ("linear_params = 0, 1", "linear_params"),
        ("quadratic_params = 1, 2", "quadratic_params"),
        ("stretched_method = inverse", "stretched_method"),
        ("seeds = 5..1", "seeds"),
    ])
    def test_errors_name_field(self, text, field):
        with pytest.raises(ConfigError) as err:
            RunConfig.from_text(text)
        assert err.value.field == field
        assert field in str(err.value)

    def test_noise_specs(self):
        cfg = RunConfig(fb_sigma=2.0, centered=False, stretched_method="exact")
        fa, fb, fc = cfg.noise_specs()
        assert fb.params.sigma == 2.0 and not fa.centered and fc.method == "exact"


def _report():
    return run_campaign(DEFAULT_MODELS, (FA, FB, FC), (1.0, 10.0), (0, 1), master_seed=9)


class TestCsv:
    def test_header_and_rows(self):
        text = report_to_csv(_report())
        lines = text.splitlines()
        assert tuple(lines[0].split(",")) == CSV_HEADER
        assert len(lines) == 1 + 3 * 3 * 2 * 2
        assert lines[1].startswith("linear,FA,1,0,")

    def test_round_trip_bit_exact(self):
        r = _report()
        assert csv_to_rows(report_to_csv(r)) == r.rows

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=6, max_size=6))
    def test_round_trip_floats(self, vals):
        rows = [CampaignRow("exponential", "FB", vals[0], 3, tuple(vals[1:5]), vals[4], vals[5])]
        r = CampaignReport(rows, (), (), (), (), 200, 0)
        assert csv_to_rows(report_to_csv(r)) == rows

    def test_seventeen_digits(self):
        r = _report()
        row = report_to_csv(r).splitlines()[1].split(",")
        assert float(row[-1]) == r.rows[0].rerr2

    def test_bad_header(self):
        with pytest.raises(ValueError):
            csv_to_rows("a,b\n1,2\n")


def test_json_mirror():
    r = _report()
    doc = json.loads(report_to_json(r))
    assert doc["master_seed"] == 9 and doc["n"] == 200
    assert len(doc["rows"]) == len(r.rows)
    keys = {(o["model"], o["level_percent"]) for o in doc["ordering"]}
    assert keys == {(m.family.value, lv) for m in DEFAULT_MODELS for lv in (1.0, 10.0)}
    o = doc["ordering"][0]
    for k in ("rerr1_fraction", "rerr2_fraction", "fb_over_fa", "fb_over_fa_pvalue", "median_rerr2"):
        assert k in o
    assert doc["noises"][1]["params"] == {"alpha": 1.8, "beta": 0.0, "mu": 1.0, "sigma": 1.0}
    assert report_to_json(r) == report_to_json(_report())


class TestSvg:
    def _svg(self, model=DEFAULT_MODELS[0], level=10.0):
        trials = {nz.name: replay_cell(0, 200, model, nz, level, 0) for nz in (FA, FB, FC)}
        return render_fit_svg(f"{model.family.value} model, {level:g}% noise", trials)

    def test_well_formed_with_four_series(self):
        root = ET.fromstring(self._svg().encode())
        assert root.tag == SVG + "svg"
        series = [g for g in root.iter(SVG + "g") if g.get("class") == "series"]
        assert [g.get("data-label") for g in series] == ["truth", "FA", "FB", "FC"]
        for g in series:
            assert g.find(SVG + "polyline") is not None
            assert g.find(SVG + "text").text
        obs = [g for g in root.iter(SVG + "g") if g.get("class") == "observations"]
        assert [g.get("data-noise") for g in obs] == ["FA", "FB", "FC"]
        assert all(len(g) > 100 for g in obs)

    def test_deterministic(self):
        assert self._svg() == self._svg()

    @pytest.mark.parametrize("model", DEFAULT_MODELS, ids=lambda m: m.family.value)
    def test_all_models(self, model):
        ET.fromstring(self._svg(model, 20.0).encode())

    def test_escapes_title(self):
        trials = {"FA": replay_cell(0, 20, DEFAULT_MODELS[0], FA, 1, 0)}
        root = ET.fromstring(render_fit_svg("a < b & c", trials).encode())
        assert any(t.text == "a < b & c" for t in root.iter(SVG + "text"))

    def test_empty(self):
        with pytest.raises(ValueError):
            render_fit_svg("x", {})
