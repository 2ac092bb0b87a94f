import json

import numpy as np
import pytest

from hararms.cli import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main

MIXTURE_CONF = """
[run]
seed = 11

[sampler]
n_iterations = 300
burn_in = 30
initial_abscissae_count = 15

[mixture]
means = -3,0; 3,0
cov_diag = 0.5, 0.5
weights = 0.5, 0.5
box = -10,10; -10,10
start = -3, 0
"""

DATA1_CONF = """
[run]
seed = 11

[dataset]
kind = dataset1
seed = 7

[grid]
start = 100
stop = 900
step = 100
knots = 1

[sampler]
n_iterations = 300
burn_in = 30

[spline]
degree = 1
knots = 1
"""

ONED_CONF = """
[run]
seed = 5

[sampler]
n_iterations = 200
burn_in = 20

[target1d]
means = -3, 3
sds = 0.5, 0.5
weights = 0.5, 0.5
support = -10, 10
"""


def conf(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestGenData:
    def test_writes_csv_and_json(self, tmp_path):
        rc = main(["gen-data", "--config", conf(tmp_path, DATA1_CONF),
                   "--out", str(tmp_path)])
        assert rc == EXIT_OK
        arr = np.loadtxt(tmp_path / "data.csv", delimiter=",")
        assert arr.shape == (1000, 2)
        payload = json.loads((tmp_path / "data.json").read_text())
        assert payload["n"] == 1000
        assert payload["generating_spec"]["seed"] == 7
        assert payload["config"]["dataset"]["kind"] == "dataset1"

    def test_byte_identical_rerun(self, tmp_path):
        c = conf(tmp_path, DATA1_CONF)
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert main(["gen-data", "--config", c, "--out", str(out1)]) == EXIT_OK
        assert main(["gen-data", "--config", c, "--out", str(out2)]) == EXIT_OK
        assert (out1 / "data.csv").read_bytes() == (out2 / "data.csv").read_bytes()
        assert (out1 / "data.json").read_bytes() == (out2 / "data.json").read_bytes()


class TestSampleMixture:
    def test_outputs(self, tmp_path):
        rc = main(["sample-mixture", "--config", conf(tmp_path, MIXTURE_CONF),
                   "--out", str(tmp_path)])
        assert rc == EXIT_OK
        h = np.loadtxt(tmp_path / "samples.csv", delimiter=",")
        g = np.loadtxt(tmp_path / "samples_gibbs.csv", delimiter=",")
        assert h.shape == (300, 2)
        assert g.shape == (300, 2)
        rep = json.loads((tmp_path / "mixture_report.json").read_text())
        assert rep["hararms"]["n_samples"] == 300
        assert rep["gibbs_arms"]["sampler"] == "gibbs_arms"
        assert rep["seed"] == 11

    def test_seed_override_changes_samples(self, tmp_path):
        c = conf(tmp_path, MIXTURE_CONF)
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        main(["sample-mixture", "--config", c, "--out", str(out1)])
        main(["sample-mixture", "--config", c, "--seed", "99",
              "--out", str(out2)])
        a = np.loadtxt(out1 / "samples.csv", delimiter=",")
        b = np.loadtxt(out2 / "samples.csv", delimiter=",")
        assert not np.array_equal(a, b)
        rep = json.loads((out2 / "mixture_report.json").read_text())
        assert rep["seed"] == 99


class TestSample1d:
    def test_samples_within_support(self, tmp_path):
        rc = main(["sample-1d", "--config", conf(tmp_path, ONED_CONF),
                   "--out", str(tmp_path)])
        assert rc == EXIT_OK
        xs = np.loadtxt(tmp_path / "samples.csv", delimiter=",")
        assert xs.shape == (200,)
        assert np.all((xs >= -10) & (xs <= 10))


class TestGridLoglik:
    def test_k1_outputs(self, tmp_path):
        rc = main(["grid-loglik", "--config", conf(tmp_path, DATA1_CONF),
                   "--out", str(tmp_path)])
        assert rc == EXIT_OK
        arr = np.loadtxt(tmp_path / "grid_K1.csv", delimiter=",")
        assert arr.shape == (9, 2)
        payload = json.loads((tmp_path / "grid_maxima_K1.json").read_text())
        assert payload["n_knots"] == 1
        assert len(payload["local_maxima"]) >= 1

    def test_k2_outputs(self, tmp_path):
        text = DATA1_CONF.replace("knots = 1\n", "knots = 2\n", 1).replace(
            "step = 100", "step = 200")
        rc = main(["grid-loglik", "--config", conf(tmp_path, text),
                   "--out", str(tmp_path)])
        assert rc == EXIT_OK
        arr = np.loadtxt(tmp_path / "grid_K2.csv", delimiter=",")
        assert arr.shape == (25, 3)


class TestFitAndSelect:
    def test_fit_then_select(self, tmp_path):
        c = conf(tmp_path, DATA1_CONF)
        for k in (1, 2):
            rc = main(["fit-spline", "--config", c, "--knots", str(k),
                       "--out", str(tmp_path)])
            assert rc == EXIT_OK
        fit = json.loads((tmp_path / "fit_K1.json").read_text())
        assert fit["n_knots"] == 1
        assert len(fit["knots"]) == 1
        assert fit["aic"] == pytest.approx(
            -2 * fit["log_likelihood"] + 2 * fit["n_parameters"])
        rc = main(["select-model", "--config", c, "--out", str(tmp_path)])
        assert rc == EXIT_OK
        sel = json.loads((tmp_path / "selection.json").read_text())
        assert sel["aic_k"] in (1, 2)
        assert len(sel["delta_ll"]) == 1

    def test_select_without_fits_fails(self, tmp_path):
        rc = main(["select-model", "--config", conf(tmp_path, DATA1_CONF),
                   "--out", str(tmp_path / "empty")])
        assert rc == EXIT_FAILURE


class TestErrorPaths:
    def test_missing_config(self, tmp_path):
        rc = main(["gen-data", "--config", str(tmp_path / "no.ini"),
                   "--out", str(tmp_path)])
        assert rc == EXIT_CONFIG

    def test_bad_section_is_failure(self, tmp_path):
        rc = main(["sample-mixture", "--config", conf(tmp_path, DATA1_CONF),
                   "--out", str(tmp_path)])
        assert rc == EXIT_FAILURE

    def test_usage_error_exit_code(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_json_keys_sorted(self, tmp_path):
        main(["gen-data", "--config", conf(tmp_path, DATA1_CONF),
              "--out", str(tmp_path)])
        text = (tmp_path / "data.json").read_text()
        payload = json.loads(text)
        assert list(payload) == sorted(payload)
