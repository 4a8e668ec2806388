"""Run configuration: defaults, the flat config-file format, and overrides.

Config files are plain text, one ``section.key = value`` per line, with
``#`` comments.  CLI flags override file values, which override defaults.
The effective configuration is echoed into every run report so results
are reproducible from (input, seed, config) alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .dtw import DtwConfig
from .mds import MdsConfig
from .tsne import TsneConfig


@dataclass(frozen=True)
class ClusterConfig:
    method: str = "gmm"  # gmm | kmeans
    k: int | None = None  # fixed cluster count; None selects by silhouette
    k_min: int = 2
    k_max: int = 7

    def __post_init__(self) -> None:
        if self.method not in ("gmm", "kmeans"):
            raise ValueError("cluster.method must be gmm or kmeans")
        if self.k_min < 2 or self.k_max < self.k_min:
            raise ValueError("need 2 <= k_min <= k_max")


@dataclass(frozen=True)
class BaselineConfig:
    nmds_variance_ratio: float = 0.95  # eigenvalue-mass rule for the nMDS dimension
    b3_final_dim: int = 2  # embedding dimension after minimax for baseline b3


@dataclass(frozen=True)
class GenConfig:
    lane_offset_m: float = 3.5
    noise_sigma_m: float = 0.15


@dataclass(frozen=True)
class Config:
    seed: int = 42
    threads: int | None = None
    dtw: DtwConfig = field(default_factory=DtwConfig)
    tsne: TsneConfig = field(default_factory=TsneConfig)
    mds: MdsConfig = field(default_factory=MdsConfig)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    baselines: BaselineConfig = field(default_factory=BaselineConfig)
    gen: GenConfig = field(default_factory=GenConfig)

    def flat(self) -> dict[str, object]:
        """Flattened section.key mapping, as echoed into reports."""
        out: dict[str, object] = {"seed": self.seed, "threads": self.threads}
        for section in ("dtw", "tsne", "mds", "cluster", "baselines", "gen"):
            sub = getattr(self, section)
            for f in fields(sub):
                if f.name == "seed":  # stage seeds all derive from the root seed
                    continue
                out[f"{section}.{f.name}"] = getattr(sub, f.name)
        return out


def _parse_scalar(raw: str, kind: type, allow_none: bool = False):
    raw = raw.strip()
    if allow_none and raw.lower() in ("none", "auto", ""):
        return None
    if kind is bool:
        if raw.lower() in ("true", "1", "yes", "on"):
            return True
        if raw.lower() in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return kind(raw)


# key -> (section attribute or None for top level, field name, type, allow_none)
_KEYS: dict[str, tuple[str | None, str, type, bool]] = {
    "seed": (None, "seed", int, False),
    "threads": (None, "threads", int, True),
    "dtw.point_metric": ("dtw", "point_metric", str, False),
    "dtw.window": ("dtw", "window", int, True),
    "dtw.free_start": ("dtw", "free_start", bool, False),
    "tsne.perplexity": ("tsne", "perplexity", float, False),
    "tsne.iterations": ("tsne", "iterations", int, False),
    "tsne.learning_rate": ("tsne", "learning_rate", float, False),
    "tsne.early_exaggeration": ("tsne", "early_exaggeration", float, False),
    "tsne.exaggeration_iters": ("tsne", "exaggeration_iters", int, False),
    "mds.target_dim": ("mds", "target_dim", int, True),
    "mds.smacof_max_iter": ("mds", "smacof_max_iter", int, False),
    "mds.smacof_eps": ("mds", "smacof_eps", float, False),
    "cluster.method": ("cluster", "method", str, False),
    "cluster.k": ("cluster", "k", int, True),
    "cluster.k_min": ("cluster", "k_min", int, False),
    "cluster.k_max": ("cluster", "k_max", int, False),
    "baselines.nmds_variance_ratio": ("baselines", "nmds_variance_ratio", float, False),
    "baselines.b3_final_dim": ("baselines", "b3_final_dim", int, False),
    "gen.lane_offset_m": ("gen", "lane_offset_m", float, False),
    "gen.noise_sigma_m": ("gen", "noise_sigma_m", float, False),
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, object]:
    """Parse ``key = value`` lines into typed values."""
    out: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}: line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ValueError(f"{source}: line {lineno}: unknown key {key!r}")
        _, _, kind, allow_none = _KEYS[key]
        try:
            out[key] = _parse_scalar(raw, kind, allow_none)
        except ValueError as exc:
            raise ValueError(f"{source}: line {lineno}: {exc}") from exc
    return out


def apply_overrides(cfg: Config, overrides: dict[str, object]) -> Config:
    """New Config with the given flat-key overrides applied."""
    sections: dict[str, dict[str, object]] = {}
    top: dict[str, object] = {}
    for key, value in overrides.items():
        if key not in _KEYS:
            raise ValueError(f"unknown config key {key!r}")
        section, name, _, _ = _KEYS[key]
        if section is None:
            top[name] = value
        else:
            sections.setdefault(section, {})[name] = value
    for section, values in sections.items():
        top[section] = replace(getattr(cfg, section), **values)
    return replace(cfg, **top)


def load_config(path: str | Path | None, cli_overrides: dict[str, object] | None = None) -> Config:
    """Defaults, then the config file (if any), then CLI overrides."""
    cfg = Config()
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        cfg = apply_overrides(cfg, parse_config_text(text, source=str(path)))
    if cli_overrides:
        cfg = apply_overrides(cfg, cli_overrides)
    return cfg
