"""Experiment configuration files.

Configs are flat INI-style key/value files with sections, read with the
standard-library parser.  Environment variables are never consulted; a
seed given on the command line overrides the config's seed.

Recognised sections and keys::

    [run]
    seed = 42                # required unless overridden on the CLI

    [sampler]
    n_iterations = 10000
    burn_in = 1000
    initial_abscissae_count = 5
    abscissae_cap = 100
    mh_proposal_scale = 1.0

    [mixture]                # sample-mixture
    means = 5,-5; 5,5; -5,5; 13,13
    cov_diag = 0.5, 0.5
    weights = 0.2, 0.3, 0.2, 0.3
    box = -30,30; -30,30     # optional
    start = -5, 5

    [dataset]                # gen-data / grid-loglik / fit-spline
    kind = dataset1          # dataset1 | dataset2 | csv
    path = data.csv          # kind = csv only
    seed = 7                 # generation seed for synthetic kinds

    [target1d]               # sample-1d: 1-D normal mixture
    means = -3, 3
    sds = 0.5, 0.5
    weights = 0.5, 0.5
    support = -10, 10

    [grid]                   # grid-loglik
    start = 100
    stop = 990
    step = 10
    knots = 1

    [spline]                 # fit-spline
    degree = 1
    knots = 6
"""

from __future__ import annotations

import configparser

import numpy as np

from .samplers import SamplerConfig
from .spline import Dataset
from .targets import MixtureSpec

__all__ = [
    "ConfigError",
    "load_config",
    "resolved_dict",
    "sampler_config",
    "mixture_spec",
    "mixture_box",
    "mixture_start",
    "load_dataset",
    "dataset_csv_roundtrip",
]


class ConfigError(ValueError):
    """Malformed or unreadable configuration."""


def load_config(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return parser


def resolved_dict(parser: configparser.ConfigParser) -> dict:
    """Plain dict of the full parsed config, for the output audit trail."""
    return {section: dict(parser.items(section))
            for section in parser.sections()}


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]


def _vectors(text: str) -> list[list[float]]:
    return [[float(t) for t in group.split(",") if t.strip()]
            for group in text.split(";") if group.strip()]


def sampler_config(parser, seed_override=None) -> SamplerConfig:
    sec = parser["sampler"] if parser.has_section("sampler") else {}
    run = parser["run"] if parser.has_section("run") else {}
    seed = seed_override if seed_override is not None else run.get("seed")
    if seed is None:
        raise ConfigError("a seed is required ([run] seed or --seed)")
    try:
        return SamplerConfig(
            n_iterations=int(sec.get("n_iterations", 10_000)),
            burn_in=int(sec.get("burn_in", 1000)),
            initial_abscissae_count=int(sec.get("initial_abscissae_count", 5)),
            abscissae_cap=int(sec.get("abscissae_cap", 100)),
            mh_proposal_scale=float(sec.get("mh_proposal_scale", 1.0)),
            seed=int(seed),
        )
    except ValueError as exc:
        raise ConfigError(f"bad sampler settings: {exc}") from exc


def mixture_spec(parser) -> MixtureSpec:
    try:
        sec = parser["mixture"]
        return MixtureSpec(
            means=np.array(_vectors(sec["means"])),
            cov_diag=np.array(_floats(sec["cov_diag"])),
            weights=np.array(_floats(sec["weights"])),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad [mixture] section: {exc}") from exc


def mixture_box(parser):
    if parser.has_option("mixture", "box"):
        return np.array(_vectors(parser["mixture"]["box"]))
    return None


def mixture_start(parser) -> np.ndarray:
    try:
        return np.array(_floats(parser["mixture"]["start"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad [mixture] start: {exc}") from exc


def load_dataset(parser) -> Dataset:
    """Materialize the [dataset] section (synthetic kinds are seeded)."""
    from .experiments import gen_dataset_1, gen_dataset_2

    try:
        sec = parser["dataset"]
        kind = sec["kind"]
    except KeyError as exc:
        raise ConfigError("config needs a [dataset] section with kind") from exc
    if kind == "dataset1":
        return gen_dataset_1(int(sec.get("seed", 0)))
    if kind == "dataset2":
        return gen_dataset_2(int(sec.get("seed", 0)))
    if kind == "csv":
        try:
            return read_dataset_csv(sec["path"])
        except (KeyError, OSError, ValueError) as exc:
            raise ConfigError(f"cannot load dataset csv: {exc}") from exc
    raise ConfigError(f"unknown dataset kind {kind!r}")


def write_dataset_csv(data: Dataset, path) -> None:
    """Two-column (x, y) CSV at full double precision, no header."""
    np.savetxt(path, np.column_stack([data.x, data.y]),
               delimiter=",", fmt="%.17g")


def read_dataset_csv(path) -> Dataset:
    arr = np.loadtxt(path, delimiter=",", ndmin=2)
    if arr.shape[1] != 2:
        raise ValueError(f"expected two columns in {path}, got {arr.shape[1]}")
    return Dataset(x=arr[:, 0], y=arr[:, 1])


def dataset_csv_roundtrip(data: Dataset, path) -> Dataset:
    write_dataset_csv(data, path)
    return read_dataset_csv(path)
