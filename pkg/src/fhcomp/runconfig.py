"""Run configuration: INI config files, JSON manifests, overrides.

The config file is a flat sectioned key=value format (configparser
syntax). Unknown sections or keys are errors so typos surface early.
A run manifest is the fully resolved configuration serialized as JSON;
feeding a manifest back in reproduces the run exactly.
"""

import configparser
import copy
import json
from pathlib import Path

from .agent import TrainConfig
from .env import FronthaulEnv, RewardConfig
from .fhcore import ConfigSpace, SystemConfig
from .latency import LatencyModelConfig
from .traffic import TrafficConfig


class ConfigError(ValueError):
    pass


MANIFEST_FORMAT = "fhcomp.manifest"

DEFAULTS = {
    "system": {
        "bandwidth_hz": 100e6,
        "scs_index_mu": 1,
        "n_prb_max": 273,
        "n_re_per_prb_slot": 168,
        "n_ant": 64,
        "n_layers": 12,
        "t_slot_s": 5e-4,
        "t_symb_s": 33.33e-6,
        "c_fh_bps": 25e9,
        "k_cells": 3,
        "q_set": (6, 8),
        "b_set": (16, 17, 18, 19, 20, 21, 22),
        "r_set": (1, 2, 4),
    },
    "traffic": {
        "mean_prb": 175.0,
        "sigma_prb": 1.0,
    },
    "latency": {
        "alpha_burst": 0.5,
        "d_proc_s": 10e-6,
        "jitter_max_s": 5e-6,
    },
    "reward": {
        "lambda": 1.0,
        "d": 0.999,
        "tau_max_s": 260e-6,
        "delta": 1e-3,
        "gamma": 0.95,
    },
    "train": {
        "lr": 5e-4,
        "optimizer": "adam",
        "batch_size": 128,
        "warmup": 500,
        "updates_per_step": 4,
        "kappa": 5e-3,
        "total_steps": 25_000,
        "episode_len": 100,
        "buffer_capacity": 100_000,
        "per_alpha": 0.6,
        "per_beta_start": 0.4,
        "per_beta_end": 1.0,
        "per_eps": 1e-6,
        "temp_start": 1.0,
        "temp_decay": 0.9999,
        "temp_floor": 0.02,
        "hidden_dims": (128, 128),
    },
    "run": {
        "seed": 0,
        "n_dec_slots": 10,
        "explore_resets": True,
    },
}


def _coerce(section: str, key: str, raw, default):
    try:
        if isinstance(default, tuple):
            if isinstance(raw, (list, tuple)):
                return tuple(int(v) for v in raw)
            return tuple(int(v) for v in str(raw).split(",") if v.strip())
        if isinstance(default, bool):
            return str(raw).lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(str(raw))
        if isinstance(default, float):
            return float(str(raw))
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc


class RunConfig:
    """Fully resolved parameter set for one simulation/training run."""

    def __init__(self, values=None):
        self.values = copy.deepcopy(DEFAULTS)
        if values:
            for section, kv in values.items():
                for key, val in kv.items():
                    self.set(section, key, val)

    def set(self, section: str, key: str, raw) -> None:
        if section not in self.values:
            raise ConfigError(f"unknown config section [{section}]")
        if key not in self.values[section]:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        self.values[section][key] = _coerce(section, key, raw,
                                            DEFAULTS[section][key])

    def get(self, section: str, key: str):
        return self.values[section][key]

    # ------------------------------------------------------------------
    # loading

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()
        if path.suffix == ".json" or text.lstrip().startswith("{"):
            return cls._from_manifest(text, path)
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        cfg = cls()
        for section in parser.sections():
            for key, raw in parser.items(section):
                cfg.set(section, key, raw)
        return cfg

    @classmethod
    def _from_manifest(cls, text: str, path) -> "RunConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if doc.get("format") != MANIFEST_FORMAT:
            raise ConfigError(f"{path} is not a run manifest")
        return cls(doc["config"])

    def apply_overrides(self, sets, seed=None) -> None:
        """Apply repeatable --set section.key=value items, then --seed."""
        for item in sets or ():
            if "=" not in item or "." not in item.split("=", 1)[0]:
                raise ConfigError(
                    f"--set expects section.key=value, got {item!r}")
            dotted, val = item.split("=", 1)
            section, key = dotted.split(".", 1)
            self.set(section.strip(), key.strip(), val.strip())
        if seed is not None:
            self.set("run", "seed", seed)

    # ------------------------------------------------------------------
    # manifest

    def manifest_dict(self) -> dict:
        return {"format": MANIFEST_FORMAT, "version": 1,
                "config": copy.deepcopy(self.values)}

    def save_manifest(self, path) -> None:
        doc = self.manifest_dict()
        doc["config"] = {
            s: {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in kv.items()}
            for s, kv in doc["config"].items()}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")

    # ------------------------------------------------------------------
    # builders

    def system(self) -> SystemConfig:
        s = self.values["system"]
        return SystemConfig(
            bandwidth_hz=s["bandwidth_hz"], scs_index_mu=s["scs_index_mu"],
            n_prb_max=s["n_prb_max"], n_re_per_prb_slot=s["n_re_per_prb_slot"],
            n_ant=s["n_ant"], n_layers=s["n_layers"], t_slot_s=s["t_slot_s"],
            t_symb_s=s["t_symb_s"], c_fh_bps=s["c_fh_bps"],
            k_cells=s["k_cells"])

    def space(self) -> ConfigSpace:
        s = self.values["system"]
        return ConfigSpace(s["q_set"], s["b_set"], s["r_set"])

    def traffic(self) -> TrafficConfig:
        t = self.values["traffic"]
        return TrafficConfig(mean_prb=t["mean_prb"], sigma_prb=t["sigma_prb"],
                             n_prb_max=self.get("system", "n_prb_max"),
                             seed=self.get("run", "seed"))

    def latency(self) -> LatencyModelConfig:
        l = self.values["latency"]
        return LatencyModelConfig(alpha_burst=l["alpha_burst"],
                                  d_proc_s=l["d_proc_s"],
                                  jitter_max_s=l["jitter_max_s"],
                                  seed=self.get("run", "seed"))

    def reward(self) -> RewardConfig:
        r = self.values["reward"]
        return RewardConfig(lam=r["lambda"], d=r["d"], tau_max_s=r["tau_max_s"],
                            delta=r["delta"], gamma=r["gamma"])

    def train_config(self) -> TrainConfig:
        t = self.values["train"]
        return TrainConfig(
            gamma=self.get("reward", "gamma"), lr=t["lr"],
            optimizer=t["optimizer"], batch_size=t["batch_size"],
            warmup=t["warmup"], updates_per_step=t["updates_per_step"],
            kappa=t["kappa"], total_steps=t["total_steps"],
            episode_len=t["episode_len"],
            buffer_capacity=t["buffer_capacity"], per_alpha=t["per_alpha"],
            per_beta_start=t["per_beta_start"],
            per_beta_end=t["per_beta_end"], per_eps=t["per_eps"],
            temp_start=t["temp_start"], temp_decay=t["temp_decay"],
            temp_floor=t["temp_floor"], hidden_dims=t["hidden_dims"],
            seed=self.get("run", "seed"))

    def env(self, training: bool = False) -> FronthaulEnv:
        """Build the simulator; training envs may use exploring resets."""
        explore_seed = (self.get("run", "seed")
                        if training and self.get("run", "explore_resets")
                        else None)
        try:
            return FronthaulEnv(
                sys=self.system(), space=self.space(),
                traffic_cfg=self.traffic(), latency_cfg=self.latency(),
                reward_cfg=self.reward(),
                n_dec_slots=self.get("run", "n_dec_slots"),
                explore_reset_seed=explore_seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
