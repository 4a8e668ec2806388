"""Parametric generator of synthetic driving-scenario trajectories.

Produces the three scenario classes used throughout: cut-ins (approach in
the left lane, merge ahead of the ego vehicle, and stay in front for the
final two seconds) and left/right drive-bys (hold the adjacent lane while
sweeping longitudinally through the field of view).  Class geometry is
deterministic given the seed; per-sample Gaussian noise is re-drawn until
the rule-based labeler agrees with the intended class, so every emitted
trajectory passes its own scenario predicate.

Also builds the six standard evaluation sets: three balanced sets with
different length ranges, one with a halved cut-in class, and two that
augment it back up with noisier synthetic cut-ins from two stand-in
generators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LAT, LON, Trajectory, TrajectorySet
from .seeding import derive_seed, stream_rng

SCENARIOS = ("cut_in", "drive_by_left", "drive_by_right")

CUT_IN_LON_RANGE = (-10.0, 50.0)  # crossing early enough for the 2 s in-front tail
DRIVE_BY_LON_RANGE = (-55.0, 55.0)
LON_JITTER = 2.5

# rule-label thresholds
IN_LANE_BAND = 0.5
ADJACENT_BAND = 1.5
TAIL_SECONDS = 2.0
HEAD_SECONDS = 1.0

_MAX_NOISE_REDRAWS = 100


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    count: int
    length_range_s: tuple[float, float] = (3.0, 7.0)
    hz: int = 10
    lane_offset_m: float = 3.5
    noise_sigma_m: float = 0.15
    perturb_scale: float = 1.0
    seed: int = 0
    id_prefix: str = ""

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}")
        if self.count < 1:
            raise ValueError("count must be positive")
        lo, hi = self.length_range_s
        if not (3.0 <= lo <= hi <= 7.0):
            raise ValueError("length range must lie within [3, 7] seconds")
        if self.hz < 1 or self.lane_offset_m <= 0 or self.noise_sigma_m < 0 or self.perturb_scale < 0:
            raise ValueError("invalid generator parameters")
        if self.scenario == "cut_in" and round(lo * self.hz) < round((HEAD_SECONDS + TAIL_SECONDS) * self.hz):
            raise ValueError("length too short to satisfy the 2 s in-front tail")


def _smoothstep(u: np.ndarray) -> np.ndarray:
    return u * u * (3.0 - 2.0 * u)


def _cut_in_profile(n: int, hz: int, lane: float, lon0: float, lon1: float) -> np.ndarray:
    pts = np.empty((n, 2))
    j = np.arange(n)
    pts[:, LON] = lon0 + (lon1 - lon0) * j / (n - 1)
    j_a = int(HEAD_SECONDS * hz)  # lane hold through the first second
    j_b = n - int(TAIL_SECONDS * hz)  # in front for the final two seconds
    lat = np.zeros(n)
    lat[:j_a] = lane
    if j_b > j_a:
        u = (j[j_a:j_b] - j_a) / (j_b - j_a)
        lat[j_a:j_b] = lane * (1.0 - _smoothstep(u))
    pts[:, LAT] = lat
    return pts


def _drive_by_profile(n: int, lane_signed: float, lon0: float, lon1: float) -> np.ndarray:
    pts = np.empty((n, 2))
    pts[:, LON] = lon0 + (lon1 - lon0) * np.arange(n) / (n - 1)
    pts[:, LAT] = lane_signed
    return pts


def _noiseless(spec: ScenarioSpec, rng: np.random.Generator) -> np.ndarray:
    lo, hi = spec.length_range_s
    n = int(rng.integers(round(lo * spec.hz), round(hi * spec.hz) + 1))
    if spec.scenario == "cut_in":
        base = CUT_IN_LON_RANGE
    else:
        base = DRIVE_BY_LON_RANGE
    lon0 = base[0] + rng.uniform(-LON_JITTER, LON_JITTER)
    lon1 = base[1] + rng.uniform(-LON_JITTER, LON_JITTER)
    if spec.scenario == "cut_in":
        return _cut_in_profile(n, spec.hz, spec.lane_offset_m, lon0, lon1)
    lane = spec.lane_offset_m if spec.scenario == "drive_by_left" else -spec.lane_offset_m
    return _drive_by_profile(n, lane, lon0, lon1)


def generate(spec: ScenarioSpec) -> TrajectorySet:
    """Deterministic batch of one scenario class."""
    sigma = spec.noise_sigma_m * spec.perturb_scale
    trajectories = []
    for i in range(spec.count):
        rng = stream_rng(spec.seed, "gen", spec.scenario, i)
        clean = _noiseless(spec, rng)
        pts = clean
        if sigma > 0:
            for attempt in range(_MAX_NOISE_REDRAWS):
                pts = clean + rng.normal(0.0, sigma, size=clean.shape)
                candidate = Trajectory("probe", pts, spec.hz, spec.scenario)
                if rule_label(candidate) == spec.scenario:
                    break
            else:
                raise RuntimeError(f"could not realize {spec.scenario} #{i} within noise budget")
        trajectories.append(
            Trajectory(f"{spec.id_prefix}{spec.scenario}-{i:05d}", pts, spec.hz, spec.scenario)
        )
    provenance = {
        "scenario": spec.scenario,
        "count": spec.count,
        "seed": spec.seed,
        "noise_sigma_m": spec.noise_sigma_m,
        "perturb_scale": spec.perturb_scale,
        "length_range_s": list(spec.length_range_s),
    }
    return TrajectorySet(tuple(trajectories), provenance)


def rule_label(t: Trajectory) -> str:
    """Knowledge-based scenario tag: cut_in, drive_by_left, drive_by_right, or unknown."""
    hz = t.sample_rate_hz
    if len(t) < 3 * hz:
        raise ValueError(f"trajectory {t.id!r} too short to classify (needs >= {3 * hz} samples)")
    lat = t.points[:, LAT]
    lon = t.points[:, LON]
    tail = int(TAIL_SECONDS * hz)
    head = int(HEAD_SECONDS * hz)
    if (
        np.all(np.abs(lat[-tail:]) < IN_LANE_BAND)
        and np.all(lon[-tail:] > 0.0)
        and np.all(lat[:head] > ADJACENT_BAND)
    ):
        return "cut_in"
    if np.all(lat > ADJACENT_BAND):
        return "drive_by_left"
    if np.all(lat < -ADJACENT_BAND):
        return "drive_by_right"
    return "unknown"


def _merge(name: str, seed: int, parts: list[TrajectorySet], extra: dict | None = None) -> TrajectorySet:
    trajectories = tuple(t for part in parts for t in part)
    provenance = {"set": name, "seed": seed, "parts": [p.provenance for p in parts]}
    if extra:
        provenance.update(extra)
    return TrajectorySet(trajectories, provenance)


def build_evaluation_sets(n: int, seed: int) -> dict[str, TrajectorySet]:
    """The six standard sets keyed set1..set6.

    set1-set3 are balanced over the three scenarios at increasing length
    spread; set4 halves the cut-in class; set5/set6 add the missing half
    back as synthetic cut-ins from two progressively noisier stand-in
    generators and share set4's real trajectories object-for-object.
    """
    if n not in (256, 512, 1024):
        raise ValueError("n must be one of 256, 512, 1024")

    def spec(scenario: str, set_name: str, count: int, lengths, **kw) -> ScenarioSpec:
        return ScenarioSpec(
            scenario=scenario,
            count=count,
            length_range_s=lengths,
            seed=derive_seed(seed, set_name, scenario, kw.get("id_prefix", "")),
            **kw,
        )

    sets: dict[str, TrajectorySet] = {}
    for name, lengths in (("set1", (3.0, 4.0)), ("set2", (4.0, 6.0)), ("set3", (3.0, 7.0))):
        parts = [generate(spec(s, name, n, lengths)) for s in SCENARIOS]
        sets[name] = _merge(name, seed, parts)

    base_lengths = (3.0, 7.0)
    real_parts = [
        generate(spec("drive_by_left", "set4", n, base_lengths)),
        generate(spec("drive_by_right", "set4", n, base_lengths)),
        generate(spec("cut_in", "set4", n // 2, base_lengths)),
    ]
    sets["set4"] = _merge("set4", seed, real_parts)
    for name, prefix, perturb in (("set5", "syn1-", 1.25), ("set6", "syn2-", 1.5)):
        synthetic = generate(
            spec("cut_in", name, n // 2, base_lengths, id_prefix=prefix, perturb_scale=perturb)
        )
        sets[name] = _merge(
            name, seed, real_parts + [synthetic], extra={"augmented": {prefix.rstrip("-"): n // 2}}
        )
    return sets
