"""Random circulant sampling C(n, 1/2) and ensemble statistics.

Reproducibility contract: the generator is PCG64 and trial i draws from the
substream SeedSequence(entropy=seed, spawn_key=(i,)), so results are
identical bit for bit across platforms and thread counts (aggregation runs
in trial order regardless of scheduling).

The model draws the connection coins unconditionally, but downstream walk
machinery needs connected graphs, so disconnected draws are rejected and
redrawn inside the same substream.  Both views are reported: statistics
over accepted samples (conditioned on connectivity) and over all draws
(the unconditioned ensemble the expectation formulas refer to).
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graphs import AbelianGroupSpec, Symbol
from .spectra import DEGENERACY_TOL

MAX_RESAMPLE_ATTEMPTS = 1000


def _thread_count() -> int:
    raw = os.environ.get("CTQW_THREADS", "1")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def _symmetric_cosine_table(n: int) -> np.ndarray:
    """cos(2 pi k / n) with cos(2 pi (n-k)/n) copied from cos(2 pi k / n).

    The copy makes the symmetry eigenvalue identity lambda_a == lambda_{-a}
    exact in floating point for every sampled symbol.
    """
    table = np.cos(2.0 * np.pi * np.arange(n) / n)
    for k in range(1, n // 2 + 1):
        table[n - k] = table[k]
    if n % 2 == 0:
        table[n // 2] = -1.0
    table[0] = 1.0
    return table


def _draw_symbol_bits(n: int, rng: np.random.Generator) -> np.ndarray:
    """One unconditioned draw of f: coins on the orbits {j, n-j}."""
    m = n // 2
    bits = rng.integers(0, 2, size=m)
    vals = np.zeros(n, dtype=bool)
    for j in range(1, m + 1):
        if bits[j - 1]:
            vals[j] = vals[n - j] = True
    return vals


def _is_connected_symbol(n: int, vals: np.ndarray) -> bool:
    support = np.flatnonzero(vals)
    if support.size == 0:
        return False
    g = n
    for x in support:
        g = math.gcd(g, int(x))
    return g == 1


def _circulant_eigenvalues(vals: np.ndarray, cos_table: np.ndarray) -> np.ndarray:
    n = len(vals)
    support = np.flatnonzero(vals)
    idx = (support[:, None] * np.arange(n)[None, :]) % n
    return cos_table[idx].sum(axis=0)


def _eigenvalue_classes(lams: np.ndarray, tol: float) -> list[np.ndarray]:
    order = np.argsort(-lams, kind="stable")
    sorted_vals = lams[order]
    classes = []
    start = 0
    for j in range(1, len(lams)):
        if sorted_vals[j - 1] - sorted_vals[j] > tol:
            classes.append(order[start:j])
            start = j
    classes.append(order[start:])
    return classes


def sample_random_circulant(n: int, seed) -> Symbol:
    """Sample a connected symbol of C(n, 1/2); resamples disconnected draws.

    `seed` may be an int, a tuple of ints, or a numpy SeedSequence.
    """
    if n < 3:
        raise ValueError("random circulants require n >= 3")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.PCG64(ss))
    for _ in range(MAX_RESAMPLE_ATTEMPTS):
        vals = _draw_symbol_bits(n, rng)
        if _is_connected_symbol(n, vals):
            return Symbol(AbelianGroupSpec((n,)), vals)
    raise RuntimeError(
        f"no connected symbol after {MAX_RESAMPLE_ATTEMPTS} draws (n={n})"
    )


@dataclass
class EnsembleStats:
    """Aggregates of a seeded C(n, 1/2) run.

    mean_lambda0 / mean_lambda_other are over accepted (connected) samples;
    the *_unconditional fields average over every draw including rejected
    ones and estimate the unconditioned ensemble expectations.
    """

    n: int
    trials: int
    seed: int
    rejections: int
    total_draws: int
    rejection_rate: float
    mean_lambda0: float
    var_lambda0: float
    mean_lambda_other: float
    var_lambda_other: float
    mean_lambda0_unconditional: float
    se_lambda0_unconditional: float
    mean_lambda_other_unconditional: float
    se_lambda_other_unconditional: float
    type_histogram: dict[int, int] = field(default_factory=dict)
    deviation_quantiles: dict[str, float] = field(default_factory=dict)

    def validate(self) -> "EnsembleStats":
        if sum(self.type_histogram.values()) != self.trials:
            raise RuntimeError("type histogram does not sum to the trial count")
        if any(not 2 <= t <= self.n for t in self.type_histogram):
            raise RuntimeError("graph type outside [2, n]")
        return self


def _run_trial(n: int, ss: np.random.SeedSequence, cos_table, char_table, tol):
    """One trial: resample to a connected symbol, record every draw's spectrum."""
    rng = np.random.Generator(np.random.PCG64(ss))
    draws_lam0: list[float] = []
    draws_other: list[float] = []
    for _ in range(MAX_RESAMPLE_ATTEMPTS):
        vals = _draw_symbol_bits(n, rng)
        lams = _circulant_eigenvalues(vals, cos_table)
        draws_lam0.append(float(lams[0]))
        draws_other.append(float(lams[1:].mean()))
        if _is_connected_symbol(n, vals):
            classes = _eigenvalue_classes(lams, tol)
            if n >= 3 and all(len(c) == 1 for c in classes):
                raise RuntimeError("sampled circulant with nonzero spectral gap")
            graph_type = len(classes)
            # Pbar(l) = sum over classes |sum_{a in C} chi_a(l)|^2 / n^2
            pbar = np.zeros(n)
            for cls in classes:
                proj = char_table[:, cls].sum(axis=1)
                pbar += (proj * proj.conj()).real
            pbar /= n * n
            deviation = float(np.abs(pbar - 1.0 / n).sum())
            return draws_lam0, draws_other, graph_type, deviation
    raise RuntimeError(f"no connected symbol after {MAX_RESAMPLE_ATTEMPTS} draws (n={n})")


def ensemble_stats(n: int, trials: int, seed: int, tol: float = DEGENERACY_TOL) -> EnsembleStats:
    """Seeded Monte Carlo over C(n, 1/2) with closed-form per-trial spectra."""
    if n < 3:
        raise ValueError("random circulants require n >= 3")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cos_table = _symmetric_cosine_table(n)
    char_table = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
    children = np.random.SeedSequence(seed).spawn(trials)

    threads = _thread_count()
    run = lambda ss: _run_trial(n, ss, cos_table, char_table, tol)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, children))
    else:
        results = [run(ss) for ss in children]

    all_lam0: list[float] = []
    all_other: list[float] = []
    accepted_lam0 = np.empty(trials)
    accepted_other = np.empty(trials)
    types: dict[int, int] = {}
    deviations = np.empty(trials)
    for i, (draws_lam0, draws_other, graph_type, deviation) in enumerate(results):
        all_lam0.extend(draws_lam0)
        all_other.extend(draws_other)
        accepted_lam0[i] = draws_lam0[-1]
        accepted_other[i] = draws_other[-1]
        types[graph_type] = types.get(graph_type, 0) + 1
        deviations[i] = deviation

    unc_lam0 = np.asarray(all_lam0)
    unc_other = np.asarray(all_other)
    total = len(unc_lam0)
    q10, q50, q90 = np.quantile(deviations, [0.1, 0.5, 0.9])
    return EnsembleStats(
        n=n,
        trials=trials,
        seed=seed,
        rejections=total - trials,
        total_draws=total,
        rejection_rate=(total - trials) / total,
        mean_lambda0=float(accepted_lam0.mean()),
        var_lambda0=float(accepted_lam0.var()),
        mean_lambda_other=float(accepted_other.mean()),
        var_lambda_other=float(accepted_other.var()),
        mean_lambda0_unconditional=float(unc_lam0.mean()),
        se_lambda0_unconditional=float(unc_lam0.std() / math.sqrt(total)),
        mean_lambda_other_unconditional=float(unc_other.mean()),
        se_lambda_other_unconditional=float(unc_other.std() / math.sqrt(total)),
        type_histogram=dict(sorted(types.items())),
        deviation_quantiles={"q10": float(q10), "q50": float(q50), "q90": float(q90)},
    ).validate()


def _all_symbols(n: int):
    """Every symmetric symbol on Z_n (2^floor(n/2) of them) with its values."""
    m = n // 2
    for mask in range(2**m):
        vals = np.zeros(n, dtype=bool)
        for j in range(1, m + 1):
            if mask >> (j - 1) & 1:
                vals[j] = vals[n - j] = True
        yield vals


def type_spectrum_exhaustive(n: int, tol: float = DEGENERACY_TOL) -> dict[int, int]:
    """Exact type histogram over all connected symbols; oracle for the sampler."""
    if not 3 <= n <= 20:
        raise ValueError("exhaustive enumeration is supported for 3 <= n <= 20")
    cos_table = _symmetric_cosine_table(n)
    hist: dict[int, int] = {}
    for vals in _all_symbols(n):
        if not _is_connected_symbol(n, vals):
            continue
        lams = _circulant_eigenvalues(vals, cos_table)
        t = len(_eigenvalue_classes(lams, tol))
        hist[t] = hist.get(t, 0) + 1
    return dict(sorted(hist.items()))


def exhaustive_expectations(n: int) -> dict[str, float]:
    """Exact ensemble expectations by enumerating all 2^floor(n/2) symbols."""
    if not 3 <= n <= 20:
        raise ValueError("exhaustive enumeration is supported for 3 <= n <= 20")
    cos_table = _symmetric_cosine_table(n)
    lam0_all: list[float] = []
    other_all: list[float] = []
    lam0_conn: list[float] = []
    other_conn: list[float] = []
    for vals in _all_symbols(n):
        lams = _circulant_eigenvalues(vals, cos_table)
        lam0_all.append(float(lams[0]))
        other_all.append(float(lams[1:].mean()))
        if _is_connected_symbol(n, vals):
            lam0_conn.append(float(lams[0]))
            other_conn.append(float(lams[1:].mean()))
    return {
        "p_connected": len(lam0_conn) / len(lam0_all),
        "mean_lambda0": float(np.mean(lam0_all)),
        "mean_lambda_other": float(np.mean(other_all)),
        "mean_lambda0_connected": float(np.mean(lam0_conn)),
        "mean_lambda_other_connected": float(np.mean(other_conn)),
    }


def stats_to_json(stats: EnsembleStats) -> str:
    doc = {"schema": "ctqw/1"}
    doc.update(
        {
            k: getattr(stats, k)
            for k in (
                "n",
                "trials",
                "seed",
                "rejections",
                "total_draws",
                "rejection_rate",
                "mean_lambda0",
                "var_lambda0",
                "mean_lambda_other",
                "var_lambda_other",
                "mean_lambda0_unconditional",
                "se_lambda0_unconditional",
                "mean_lambda_other_unconditional",
                "se_lambda_other_unconditional",
            )
        }
    )
    doc["type_histogram"] = {str(k): v for k, v in stats.type_histogram.items()}
    doc["deviation_quantiles"] = stats.deviation_quantiles
    return json.dumps(doc, indent=2)
