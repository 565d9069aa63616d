"""Jump-move process simulator.

The process alternates continuous motion (a mover) with birth/death jumps
arriving at state-dependent intensity alpha(x) = beta(x) + delta(x).
Jump times are exact in distribution: candidate times arrive as an
exponential stream at the declared bound alpha_star and each candidate is
accepted with probability alpha/alpha_star evaluated at the moved state.
A coupled variant runs the process in lock-step with a dominating simple
count chain so that marginal and domination claims can be tested.
"""
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .config_space import Configuration, Domain
from .errors import NegativeKernelMass, ThinningBoundViolated
from .jump_kernels import IntensitySpec, sample_birth, sample_death, sample_jump
from .movers import advance
from .rng import STREAM_KERNEL, STREAM_MOVE, STREAM_WAIT, Stream, substream

# events with more points than this keep only (time, kind, count)
DEFAULT_POINTS_CAP = 512
_REL = 1e-9


def _probe_intensity_bound(model, n_counts=7, per_count=4, seed=0x5EED):
    """Spot-check alpha(x) <= alpha_star on random configurations."""
    if model.domain.bounds is None:
        return  # no canonical probe measure on an unbounded domain
    b = model.domain.bounds_array()
    rng = substream(seed)
    worst = 0.0
    for n in range(n_counts):
        for _ in range(1 if n == 0 else per_count):
            pts = rng.uniform(b[:, 0], b[:, 1], size=(n, model.domain.dim))
            x = Configuration(model.domain, pts)
            worst = max(worst, model.intensities.alpha(x))
    if worst > model.alpha_star * (1 + _REL) + 1e-12:
        raise ValueError(
            "alpha_star=%g is below the jump intensity %g seen on probe states"
            % (model.alpha_star, worst))


@dataclass(frozen=True)
class ModelSpec:
    """Everything needed to run the process: domain, rates, kernels, mover."""

    domain: Domain
    intensities: IntensitySpec
    birth: object
    death: object
    mover: object

    def __post_init__(self):
        _probe_intensity_bound(self)

    @property
    def alpha_star(self) -> float:
        return self.intensities.alpha_star

    def describe(self) -> dict:
        return {
            "domain": {"dim": self.domain.dim,
                       "bounds": None if self.domain.bounds is None
                       else [list(b) for b in self.domain.bounds]},
            "intensities": self.intensities.describe(),
            "birth_kernel": self.birth.describe(),
            "death_kernel": self.death.describe(),
            "mover": self.mover.describe(),
        }


def model_hash(model: ModelSpec) -> str:
    blob = json.dumps(model.describe(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class EventRecord:
    time: float
    kind: str                  # "birth" or "death"
    n: int                     # point count after the event
    state_after: Configuration | None


@dataclass(frozen=True)
class TrajectoryLog:
    initial: Configuration
    events: tuple
    checkpoints: tuple         # (time, Configuration) pairs
    horizon: float

    def count_at(self, t: float) -> int:
        """Point count just after time t, reconstructed from the event log."""
        n = len(self.initial)
        for ev in self.events:
            if ev.time > t:
                break
            n = ev.n
        return n


@dataclass(frozen=True)
class CoupledEventRecord:
    time: float
    branch: str                # which coupled-kernel branch fired
    n_x: int                   # spatial point count after the event
    n_eta: int                 # dominating chain state after the event
    state_after: Configuration | None


@dataclass(frozen=True)
class CoupledTrajectoryLog:
    initial: Configuration
    n0: int
    events: tuple
    checkpoints: tuple         # (time, Configuration, chain state) triples
    horizon: float


def _streams(seed, trajectory):
    return (Stream(substream(seed, trajectory, STREAM_WAIT)),
            Stream(substream(seed, trajectory, STREAM_KERNEL)),
            Stream(substream(seed, trajectory, STREAM_MOVE)))


def _move(mover, x, dt, stream):
    return advance(mover, x, dt, stream) if dt > 0.0 else x


def _checkpoint_times(checkpoints, horizon):
    ck = np.sort(np.asarray(tuple(checkpoints), dtype=float))
    if ck.size and (ck[0] < 0.0 or ck[-1] > horizon):
        raise ValueError("checkpoint times must lie in [0, horizon]")
    return ck


def _validate_start(model, x0, horizon):
    if x0.domain != model.domain:
        raise ValueError("x0 lives on a different domain than the model")
    if not horizon > 0.0:
        raise ValueError("horizon must be positive")


def simulate(model: ModelSpec, x0: Configuration, horizon: float,
             checkpoints=(), seed: int = 0, trajectory: int = 0,
             points_cap: int = DEFAULT_POINTS_CAP) -> TrajectoryLog:
    """One trajectory of the jump-move process.

    Checkpoints record the state at the requested times; a checkpoint that
    coincides with a jump time records the pre-jump state.  Waiting-time,
    kernel and move randomness come from separate substreams, so replacing
    the mover never perturbs the jump decisions.  Deterministic given
    (model, x0, horizon, checkpoints, seed, trajectory).
    """
    _validate_start(model, x0, horizon)
    ck_times = _checkpoint_times(checkpoints, horizon)
    wait, kern, move = _streams(seed, trajectory)
    a_star = model.alpha_star
    x = x0
    t = 0.0
    events = []
    cks = []
    i_ck = 0
    while True:
        t_cand = t + wait.exponential() / a_star
        t_next = min(t_cand, horizon)
        while i_ck < ck_times.size and ck_times[i_ck] <= t_next:
            x = _move(model.mover, x, float(ck_times[i_ck]) - t, move)
            t = float(ck_times[i_ck])
            cks.append((t, x))
            i_ck += 1
        if t_cand > horizon:
            break
        x = _move(model.mover, x, t_cand - t, move)
        t = t_cand
        a = model.intensities.alpha(x)
        if a > a_star * (1 + _REL) + 1e-12:
            raise ThinningBoundViolated(
                "alpha(x)=%g exceeds alpha_star=%g at t=%g" % (a, a_star, t))
        if wait.uniform() * a_star < a:
            x, kind = sample_jump(model.intensities, model.birth, model.death, x, kern)
            events.append(EventRecord(
                t, kind, len(x), x if len(x) <= points_cap else None))
    return TrajectoryLog(x0, tuple(events), tuple(cks), float(horizon))


def simulate_coupled(model: ModelSpec, chain, x0: Configuration, n0: int,
                     horizon: float, checkpoints=(), seed: int = 0,
                     trajectory: int = 0,
                     points_cap: int = DEFAULT_POINTS_CAP) -> CoupledTrajectoryLog:
    """Joint trajectory of the process and its dominating count chain.

    The pair jumps through a combined kernel: when the spatial count and
    the chain state agree, births and deaths are taken together whenever
    possible; otherwise the two components jump independently.  The chain's
    birth rates must dominate the spatial birth intensity and its death
    rates must be dominated by the spatial death intensity whenever the
    counts agree, else NegativeKernelMass is raised.
    """
    _validate_start(model, x0, horizon)
    if n0 < 0:
        raise ValueError("n0 must be a nonnegative integer")
    ck_times = _checkpoint_times(checkpoints, horizon)
    wait, kern, move = _streams(seed, trajectory)
    bound = 2.0 * model.alpha_star
    x = x0
    n = int(n0)
    t = 0.0
    events = []
    cks = []
    i_ck = 0
    while True:
        t_cand = t + wait.exponential() / bound
        t_next = min(t_cand, horizon)
        while i_ck < ck_times.size and ck_times[i_ck] <= t_next:
            x = _move(model.mover, x, float(ck_times[i_ck]) - t, move)
            t = float(ck_times[i_ck])
            cks.append((t, x, n))
            i_ck += 1
        if t_cand > horizon:
            break
        x = _move(model.mover, x, t_cand - t, move)
        t = t_cand
        beta_x = model.intensities.beta(x)
        delta_x = model.intensities.delta(x)
        beta_n = chain.beta(n)
        delta_n = chain.delta(n) if n > 0 else 0.0
        agree = len(x) == n
        a_check = (beta_n + delta_x) if agree else (beta_x + delta_x + beta_n + delta_n)
        if a_check > bound * (1 + _REL) + 1e-12:
            raise ThinningBoundViolated(
                "coupled intensity %g exceeds 2*alpha_star=%g" % (a_check, bound))
        if wait.uniform() * bound >= a_check:
            continue
        scale = max(beta_x, delta_x, beta_n, delta_n, 1.0)
        if agree:
            if beta_n < beta_x - _REL * scale or delta_x < delta_n - _REL * scale:
                raise NegativeKernelMass(
                    "dominating rates invalid at n=%d: beta_n=%g < beta(x)=%g "
                    "or delta(x)=%g < delta_n=%g" % (n, beta_n, beta_x, delta_x, delta_n))
            masses = [beta_x, max(beta_n - beta_x, 0.0),
                      delta_n, max(delta_x - delta_n, 0.0)]
            labels = ["joint-birth", "eta-birth", "joint-death", "x-death"]
        else:
            masses = [beta_x + delta_x, beta_n, delta_n]
            labels = ["x-jump", "eta-birth", "eta-death"]
        total = math.fsum(masses)
        if abs(total - a_check) > _REL * max(total, a_check):
            raise NegativeKernelMass(
                "coupled kernel masses sum to %g but the jump intensity is %g"
                % (total, a_check))
        u = kern.uniform() * total
        cum = np.cumsum(masses)
        branch = int(np.searchsorted(cum, u, side="right"))
        branch = min(branch, len(masses) - 1)
        label = labels[branch]
        if label == "x-jump":
            x, kind = sample_jump(model.intensities, model.birth, model.death, x, kern)
            label = "x-" + kind
        elif label == "joint-birth":
            x = sample_birth(model.birth, x, kern)
            n += 1
        elif label == "eta-birth":
            n += 1
        elif label == "joint-death":
            x = sample_death(model.death, x, kern)
            n -= 1
        elif label == "eta-death":
            n -= 1
        else:  # x-death
            x = sample_death(model.death, x, kern)
        events.append(CoupledEventRecord(
            t, label, len(x), n, x if len(x) <= points_cap else None))
    return CoupledTrajectoryLog(x0, int(n0), tuple(events), tuple(cks), float(horizon))


def poisson_domination_report(model: ModelSpec, x0: Configuration, t: float,
                              trials: int, seed: int = 0) -> dict:
    """Empirical jump-count exceedance versus the Poisson(alpha_star * t) bound.

    The number of jumps by time t is stochastically dominated by a Poisson
    variable with mean alpha_star * t; the report flags any level where the
    empirical exceedance beats the bound by more than 4 binomial sigmas.
    """
    if trials < 1_000:
        raise ValueError("need at least 1000 trials for a meaningful report")
    from scipy.stats import poisson

    counts = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        log = simulate(model, x0, t, (), seed=seed, trajectory=i, points_cap=0)
        counts[i] = len(log.events)
    mean = model.alpha_star * t
    levels = np.arange(math.ceil(3.0 * mean) + 1)
    empirical = (counts[None, :] > levels[:, None]).mean(axis=1)
    bnd = poisson.sf(levels, mean)
    sigma = np.sqrt(bnd * (1.0 - bnd) / trials)
    bad = empirical > bnd + 4.0 * sigma
    return {
        "n": levels,
        "empirical": empirical,
        "bound": bnd,
        "violations": levels[bad],
        "pass": not bool(bad.any()),
    }


def _points_payload(cfg: Configuration | None):
    return None if cfg is None else cfg.points.tolist()


def trajectory_to_jsonl(log: TrajectoryLog, model: ModelSpec, seed: int) -> str:
    """Line-delimited record: header, then events and checkpoints in time order."""
    header = {
        "kind": "header",
        "model": model_hash(model),
        "seed": int(seed),
        "horizon": log.horizon,
        "dim": log.initial.domain.dim,
        "bounds": None if log.initial.domain.bounds is None
        else [list(b) for b in log.initial.domain.bounds],
        "initial": log.initial.points.tolist(),
    }
    rows = [(ev.time, 1, {"t": ev.time, "kind": ev.kind, "n": ev.n,
                          "points": _points_payload(ev.state_after)})
            for ev in log.events]
    rows += [(tt, 0, {"t": tt, "kind": "checkpoint", "n": len(cfg),
                      "points": cfg.points.tolist()})
             for tt, cfg in log.checkpoints]
    rows.sort(key=lambda r: (r[0], r[1]))  # checkpoint precedes a same-time jump
    lines = [json.dumps(header)] + [json.dumps(r[2]) for r in rows]
    return "\n".join(lines) + "\n"


def trajectory_from_jsonl(text: str) -> tuple:
    """Inverse of trajectory_to_jsonl: returns (header dict, TrajectoryLog)."""
    lines = [json.loads(s) for s in text.splitlines() if s.strip()]
    if not lines or lines[0].get("kind") != "header":
        raise ValueError("serialized trajectory must start with a header line")
    header = lines[0]
    bounds = header["bounds"]
    domain = Domain(header["dim"],
                    bounds=None if bounds is None else tuple(tuple(b) for b in bounds))
    initial = Configuration(domain, np.asarray(header["initial"], dtype=float).reshape(-1, header["dim"]))
    events = []
    cks = []
    for row in lines[1:]:
        pts = row.get("points")
        cfg = None if pts is None else Configuration(
            domain, np.asarray(pts, dtype=float).reshape(-1, header["dim"]))
        if row["kind"] == "checkpoint":
            cks.append((row["t"], cfg))
        else:
            events.append(EventRecord(row["t"], row["kind"], row["n"], cfg))
    return header, TrajectoryLog(initial, tuple(events), tuple(cks), header["horizon"])
