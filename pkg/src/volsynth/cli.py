"""Command-line front end.

Subcommands: summarize, fit, backtest, simulate, audit.  Options can come
from an INI-style config file (flat key=value entries in sections; section
names are ignored when resolving keys) and any key can be overridden by the
CLI flag of the same name.  The resolved configuration is echoed into the
output directory so every run is reproducible from its artifacts alone.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""
from __future__ import annotations

import configparser
import json
import os
import sys
from pathlib import Path

import click
import numpy as np
import pandas as pd

from . import autoenc, backtest, ingest, simlab, synth, volmodel
from .errors import ConfigError, DataError, NumericalError, VolsynthError

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

_DEFAULTS = {
    "out": "volsynth_out",
    "seed": 0,
    "split": "0.8",
    "models": "garch,garchx,rv-rg,pc-rg,ic-rg,avg-rg,ae-rg",
    "window": 1000,
    "horizon": 200,
    "refit_interval": 1,
    "rv_column": 0,
    "date_column": "date",
    "close_column": "close",
    "measure_columns": "",
    "lambda1": 0.001,
    "lambda2": 0.001,
    "rho": 0.05,
    "max_epochs": 500,
    "retry_limit": 5,
    # simulation defaults
    "sim_t": 1500,
    "sim_d": 6,
    "sim_omega": 0.1536, "sim_beta": 0.5982, "sim_gamma": 0.3566,
    "sim_xi": -0.4475, "sim_phi": 1.0487, "sim_tau1": -0.1010,
    "sim_tau2": 0.1165, "sim_sigma_eps": 0.5374,
    "sim_noise": "0.2,0.3,0.4,0.5,0.6,0.8",
    "audit_probes": 5,
}


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    if not Path(path).exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.read(path)
    resolved: dict = {}
    for section in parser.sections():
        resolved.update(dict(parser.items(section)))
    if parser.defaults():
        resolved.update(parser.defaults())
    return resolved


def _coerce(key: str, value):
    """Coerce a config value to the type of its default."""
    default = _DEFAULTS.get(key)
    try:
        if isinstance(default, bool):
            return str(value).strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad value for '{key}': {value!r}") from e
    return value


def _resolve(config_path: str | None, overrides: dict) -> dict:
    cfg = dict(_DEFAULTS)
    cfg.update(_load_config_file(config_path))
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return {k: _coerce(k, v) for k, v in cfg.items()}


def _echo_config(cfg: dict, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    echo = dict(cfg)
    echo.pop("out", None)  # the file's own location; would break rerun byte-identity
    echo["models"] = [m.strip() for m in str(cfg.get("models", "")).split(",") if m.strip()]
    with open(out / "resolved_config.json", "w") as fh:
        json.dump(echo, fh, indent=2, sort_keys=True, default=str)


def _load_panel(cfg: dict) -> ingest.MeasurePanel:
    if not cfg.get("input"):
        raise ConfigError("no input file given (use --input or the config file)")
    if not Path(cfg["input"]).exists():
        raise ConfigError(f"input file not found: {cfg['input']}")
    measures = [c.strip() for c in str(cfg["measure_columns"]).split(",") if c.strip()]
    column_map = {"date": cfg["date_column"], "close": cfg["close_column"]}
    if measures:
        column_map["measures"] = measures
    return ingest.load_panel(cfg["input"], column_map)


def _split_panel(panel, cfg):
    rule = str(cfg["split"])
    try:
        fraction = float(rule)
    except ValueError:
        return ingest.split(panel, split_date=rule)
    return ingest.split(panel, in_fraction=fraction)


def _ae_hyper(cfg: dict) -> autoenc.AeHyperparams:
    return autoenc.AeHyperparams(
        lambda1=float(cfg["lambda1"]), lambda2=float(cfg["lambda2"]),
        rho=float(cfg["rho"]), max_epochs=int(cfg["max_epochs"]),
        seed=int(cfg["seed"]), retry_limit=int(cfg["retry_limit"]),
    )


def _rolling_config(cfg: dict) -> backtest.RollingConfig:
    return backtest.RollingConfig(
        t_in=int(cfg["window"]), t_out=int(cfg["horizon"]),
        combos=tuple(m.strip() for m in str(cfg["models"]).split(",") if m.strip()),
        refit_interval=int(cfg["refit_interval"]), ae_hyper=_ae_hyper(cfg),
        base_seed=int(cfg["seed"]), rv_column=int(cfg["rv_column"]),
    )


def _threads() -> int:
    return max(1, int(os.environ.get("VOLSYNTH_THREADS", "1")))


def _run(fn):
    try:
        fn()
    except ConfigError as e:
        click.echo(f"configuration error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    except DataError as e:
        click.echo(f"data error: {e}", err=True)
        sys.exit(EXIT_DATA)
    except (NumericalError, VolsynthError) as e:
        click.echo(f"numerical error: {e}", err=True)
        sys.exit(EXIT_NUMERICAL)


def _common_options(fn):
    for opt in reversed([
        click.option("--config", "config_path", type=str, default=None,
                     help="INI config file; CLI flags override its keys."),
        click.option("--input", "input", type=str, default=None),
        click.option("--out", type=str, default=None),
        click.option("--seed", type=int, default=None),
    ]):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Synthetic realised measures and Realised GARCH forecasting."""


@main.command()
@_common_options
def summarize(config_path, **overrides):
    """Summary statistics for returns and log-transformed measures."""
    def body():
        cfg = _resolve(config_path, overrides)
        panel = _load_panel(cfg)
        table = ingest.summary_table(panel)
        out = Path(cfg["out"])
        _echo_config(cfg, out)
        table.to_csv(out / "summary.csv", index_label="series")
        click.echo(table.round(3).to_string())
    _run(body)


@main.command()
@_common_options
@click.option("--models", type=str, default=None, help="Comma-separated combo ids.")
@click.option("--method", type=click.Choice(["pc", "ic", "avg", "ae", "rv"]), default=None,
              help="Shorthand for a single RealGARCH combo.")
@click.option("--split", type=str, default=None, help="In-sample fraction or split date.")
def fit(config_path, method, **overrides):
    """In-sample constrained MLE for each requested model."""
    def body():
        cfg = _resolve(config_path, overrides)
        if method:
            cfg["models"] = f"{method}-rg"
        panel = _load_panel(cfg)
        insample, _ = _split_panel(panel, cfg)
        out = Path(cfg["out"])
        _echo_config(cfg, out)
        seed = int(cfg["seed"])
        lines = []
        for combo in str(cfg["models"]).split(","):
            combo = combo.strip()
            if combo not in backtest.COMBOS:
                raise ConfigError(f"unknown model combo '{combo}'")
            model, meth, display = backtest.COMBOS[combo]
            try:
                x = None
                if meth == "rv":
                    x = insample.measures[:, int(cfg["rv_column"])]
                elif meth == "ae":
                    _, series, _ = autoenc.train(insample.measures, _ae_hyper(cfg))
                    x = series.values
                elif meth is not None:
                    x = synth.synthetic_measure(insample.measures, meth, seed=seed).values
                _, _, report = volmodel.estimate(model, insample.returns, x)
            except VolsynthError as e:
                click.echo(f"{display}: estimation failed ({e})", err=True)
                continue
            with open(out / f"fit_{combo}.json", "w") as fh:
                fh.write(report.to_json())
            lines.append((display, report.neg_loglik_returns, report.persistence))
        click.echo(f"{'model':<10}{'-l(r)':>14}{'persistence':>14}")
        for display, nll, pi in lines:
            click.echo(f"{display:<10}{nll:>14.4f}{pi:>14.4f}")
    _run(body)


@main.command(name="backtest")
@_common_options
@click.option("--models", type=str, default=None)
@click.option("--method", type=click.Choice(["pc", "ic", "avg", "ae", "rv"]), default=None)
@click.option("--window", type=int, default=None, help="Estimation window length T_in.")
@click.option("--horizon", type=int, default=None, help="Out-of-sample length T_out.")
def backtest_cmd(config_path, method, **overrides):
    """Rolling one-step-ahead backtest scored by predictive log-likelihood."""
    def body():
        cfg = _resolve(config_path, overrides)
        if method:
            cfg["models"] = f"{method}-rg"
        panel = _load_panel(cfg)
        rolling = _rolling_config(cfg)
        records, table = backtest.run_rolling(panel, rolling, threads=_threads())
        out = Path(cfg["out"])
        _echo_config(cfg, out)
        backtest.records_frame(records).to_csv(out / "records.csv", index=False,
                                               float_format=ingest.FLOAT_FMT)
        table.to_frame().to_csv(out / "comparison.csv", index=False,
                                float_format=ingest.FLOAT_FMT)
        with open(out / "comparison.json", "w") as fh:
            fh.write(table.to_json())
        for model, path_df in backtest.parameter_paths(records).items():
            safe = model.lower().replace("-", "_")
            path_df.to_csv(out / f"params_{safe}.csv", float_format=ingest.FLOAT_FMT)
        click.echo(f"{'model':<10}{'neg pred loglik':>18}")
        for model, total in table.totals.items():
            marker = "  <- best" if model == table.best_model else ""
            click.echo(f"{model:<10}{total:>18.4f}{marker}")
    _run(body)


@main.command()
@_common_options
@click.option("--t", "sim_t", type=int, default=None, help="Sample length after burn-in.")
@click.option("--d", "sim_d", type=int, default=None, help="Number of measure columns.")
def simulate(config_path, **overrides):
    """Emit a simulated panel CSV plus its ground-truth variance path."""
    def body():
        cfg = _resolve(config_path, overrides)
        params = volmodel.RealGarchParams(
            omega=float(cfg["sim_omega"]), beta=float(cfg["sim_beta"]),
            gamma=float(cfg["sim_gamma"]), xi=float(cfg["sim_xi"]),
            phi=float(cfg["sim_phi"]), tau1=float(cfg["sim_tau1"]),
            tau2=float(cfg["sim_tau2"]), sigma_eps=float(cfg["sim_sigma_eps"]),
        )
        D = int(cfg["sim_d"])
        noise = [float(v) for v in str(cfg["sim_noise"]).split(",")][:D]
        noise += [0.5] * (D - len(noise))
        spec = simlab.DgpSpec(params=params, T=int(cfg["sim_t"]), seed=int(cfg["seed"]),
                              loadings=np.ones(D), noise_scales=np.array(noise))
        result = simlab.simulate(spec)
        out = Path(cfg["out"])
        _echo_config(cfg, out)
        simlab.to_frame(result).to_csv(out / "panel.csv", index=False,
                                       float_format=ingest.FLOAT_FMT)
        simlab.ground_truth_frame(result).to_csv(out / "truth.csv", index=False,
                                                 float_format=ingest.FLOAT_FMT)
        click.echo(f"wrote {out / 'panel.csv'} ({spec.T} rows, D={D}) and truth.csv")
    _run(body)


@main.command()
@_common_options
@click.option("--models", type=str, default=None)
@click.option("--window", type=int, default=None)
@click.option("--horizon", type=int, default=None)
def audit(config_path, **overrides):
    """Run the no-look-ahead audit on the rolling protocol."""
    def body():
        cfg = _resolve(config_path, overrides)
        panel = _load_panel(cfg)
        rolling = _rolling_config(cfg)
        report = backtest.no_lookahead_audit(panel, rolling,
                                             n_probes=int(cfg["audit_probes"]),
                                             seed=int(cfg["seed"]))
        out = Path(cfg["out"])
        _echo_config(cfg, out)
        click.echo(f"audit passed: {len(report.probes)} probes, no leakage detected")
    _run(body)


if __name__ == "__main__":
    main()
