"""Single-network analysis reports and the seeded Monte-Carlo capacity study."""

from __future__ import annotations

import io
import math
import statistics
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .bounds import Baseline, bound_report, theorem1_check
from .errors import MmPassiveError
from .lp import to_lp_text
from .lp.builders import build_p2, passive_capacity
from .network import Network, ThresholdMap, generate_random, resample_capacities
from .paths import active_edge_disjoint, count_edge_disjoint, count_vertex_disjoint
from .scheduler import schedule_from_activations
from .security import passive_to_secure, secure_to_passive

CSV_COLUMNS = ("trial_id", "seed", "c_bar", "c", "ratio", "active_edge_disjoint")


def fmt(x: float) -> str:
    return f"{x:.9g}"


def rounded(obj):
    """Round every float in a JSON-able structure to 9 significant digits."""
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    seed: int
    c_bar: float
    c: float
    ratio: float
    active_edge_disjoint: int
    wall_time_ms: float

    def row(self, timing: bool = False) -> list[str]:
        cells = [
            str(self.trial_id),
            str(self.seed),
            fmt(self.c_bar),
            fmt(self.c),
            fmt(self.ratio),
            str(self.active_edge_disjoint),
        ]
        if timing:
            cells.append(fmt(self.wall_time_ms))
        return cells


def trial_seed(seed: int, trial_id: int) -> int:
    return int(np.random.SeedSequence([seed, trial_id]).generate_state(1)[0])


def run_trial(
    topology: Network, trial_id: int, seed: int, theta: float, cap_mean: float, cap_var: float
) -> TrialRecord:
    start = time.perf_counter()
    try:
        net = resample_capacities(topology, cap_mean, cap_var, seed)
        base = Baseline.of(net).solution
        constrained = passive_capacity(net, ThresholdMap.uniform(net, theta))
        active = active_edge_disjoint(constrained, net)
    except MmPassiveError as exc:
        raise MmPassiveError(f"trial {trial_id} (seed {seed}): {exc}") from exc
    ratio = constrained.rate / base.rate if base.rate > 0 else math.nan
    elapsed = (time.perf_counter() - start) * 1e3
    return TrialRecord(trial_id, seed, base.rate, constrained.rate, ratio, active, elapsed)


def _run_trial_args(args):
    return run_trial(*args)


@dataclass(frozen=True)
class MonteCarloResult:
    topology: Network
    records: list[TrialRecord]

    def summary(self) -> dict:
        ratios = [r.ratio for r in self.records if not math.isnan(r.ratio)]
        hist = Counter(r.active_edge_disjoint for r in self.records)
        return {
            "trials": len(self.records),
            "links": len(self.topology.links),
            "h_e": count_edge_disjoint(self.topology).count,
            "mean_ratio": statistics.fmean(ratios) if ratios else math.nan,
            "min_ratio": min(ratios, default=math.nan),
            "max_ratio": max(ratios, default=math.nan),
            "active_edge_disjoint_histogram": {str(k): hist[k] for k in sorted(hist)},
        }

    def to_csv(self, timing: bool = False) -> str:
        out = io.StringIO()
        header = list(CSV_COLUMNS) + (["wall_time_ms"] if timing else [])
        out.write(",".join(header) + "\n")
        for r in self.records:
            out.write(",".join(r.row(timing)) + "\n")
        return out.getvalue()


def run_montecarlo(
    n_relays: int,
    trials: int,
    theta: float = 0.2,
    cap_mean: float = 1.0,
    cap_var: float = 0.1,
    topology: str = "layered",
    seed: int = 0,
    jobs: int = 1,
) -> MonteCarloResult:
    """One random topology from ``seed``; fresh capacities for every trial.

    Records come back in trial order whatever ``jobs`` is.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    topo = generate_random(n_relays, topology, cap_mean, cap_var, seed)
    work = [(topo, t, trial_seed(seed, t), theta, cap_mean, cap_var) for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_trial_args, work, chunksize=max(1, trials // (4 * jobs))))
    else:
        records = [run_trial(*w) for w in work]
    return MonteCarloResult(topo, records)


# ---------------------------------------------------------------------------
# single-network report

def analyze(
    net: Network,
    thresholds: ThresholdMap,
    m_beams: int | None = None,
    k: int = 0,
    theta_c: float = 1.0,
) -> dict:
    m = net.m_beams if m_beams is None else m_beams
    if m != net.m_beams:
        net = Network(net.n_relays, m, net.links)
    unit = net.is_unit_capacity()
    h_e = count_edge_disjoint(net)
    h_v = count_vertex_disjoint(net)
    report: dict = {
        "n_relays": net.n_relays,
        "m_beams": m,
        "links": len(net.links),
        "unit_capacity": unit,
        "theta_min": thresholds.min(),
        "h_e": h_e.count,
        "h_v": h_v.count,
        "notices": [],
    }
    if m == 1:
        base = Baseline.of(net)
        constrained = passive_capacity(net, thresholds)
        bounds = bound_report(net, thresholds, base, constrained)
        schedule = schedule_from_activations(net, constrained.activations)
        report.update(
            {
                "c_bar": base.c_bar,
                "passive_capacity": constrained.rate,
                "ratio": constrained.rate / base.c_bar if base.c_bar > 0 else None,
                "bounds": {
                    "naive": bounds.naive,
                    "activation_ratio": bounds.activation_ratio,
                    "per_path": bounds.per_path,
                },
                "active_edge_disjoint": active_edge_disjoint(constrained, net),
                "schedule": schedule.to_json(),
            }
        )
    else:
        report["notices"].append(
            "M > 1: the scheduling LP is single-beam only; reporting the constructive subset"
        )
        if unit:
            report["c_bar"] = float(min(m, h_v.count))

    if unit:
        verdicts = []
        for tc in sorted({theta_c, 1.0}):
            v = theorem1_check(net, thresholds, tc, m)
            verdicts.append(
                {
                    "theta_c": tc,
                    "achievable": v.achievable,
                    "required": v.required,
                    "actual": v.actual,
                    "rate": None if v.schedule is None else v.schedule.rate,
                }
            )
        report["path_count"] = verdicts
        secure = {"secure_to_passive": secure_to_passive(net, thresholds, m).rate}
        if m == 1:
            secure["k"] = k
            secure["passive_to_secure"] = passive_to_secure(
                net, thresholds, k, passive=constrained
            ).rate
        report["secure"] = secure
    else:
        report["notices"].append(
            "non-unit capacities: path-count conditions and secrecy reduction skipped"
        )
    return rounded(report)


def lp_dump(net: Network, thresholds: ThresholdMap | None) -> str:
    return to_lp_text(build_p2(net, thresholds), title="edge-based scheduling LP")


def record_dicts(result: MonteCarloResult) -> list[dict]:
    return [rounded(asdict(r)) for r in result.records]
