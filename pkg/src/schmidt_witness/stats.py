"""Sampling, estimation, scoring and the no-signaling check.

Random numbers come from numpy's Philox counter-based generator. A master
seed is expanded with ``SeedSequence.spawn`` so that every job (or Monte Carlo
replicate) owns an independent stream, which makes results reproducible across
platforms and independent of execution order.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .scenarios import (
    OutcomeLabeling,
    ScenarioSpec,
    aggregate_b,
    ideal_matrix,
    ideal_settings_a,
    matrix_from_settings,
    raw_distribution_b,
)
from .witness import (
    ProbabilityMatrix,
    UnreliableErrorWarning,
    WitnessReport,
    adjugate_is_zero,
    witness,
    witness_error,
)

SPECTATOR_CHOICES = ((0, 0), (0, 1), (1, 0), (1, 1))


class CountsError(ValueError):
    """A counts table violates its invariants."""


def philox(seed_seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed_seq))


def streams(seed: int, count: int) -> list[np.random.Generator]:
    return [philox(s) for s in np.random.SeedSequence(seed).spawn(count)]


@dataclass(frozen=True)
class CountsTable:
    """Integer outcome counts per job.

    kind A: ``counts`` has shape (jobs, 4, 4, 4) -- job, setting i, setting j,
    outcome (yy, yn, ny, nn). kind B: shape (jobs, 8, 8) -- job, A triple
    index 4*a0 + 2*a1 + a2, B triple index likewise.
    Each setting (kind A) or job (kind B) holds ``shots * repetitions`` trials.
    """

    kind: str
    measurement_set: str
    counts: np.ndarray
    shots: int
    repetitions: int = 1
    seed: int | None = None
    device: str = ""

    def __post_init__(self):
        c = np.array(self.counts)
        if c.dtype.kind not in "iu":
            if not np.all(np.equal(np.mod(c, 1), 0)):
                raise CountsError("counts must be integers")
            c = c.astype(np.int64)
        c = c.astype(np.int64)
        if self.kind == "A":
            if c.ndim != 4 or c.shape[1:] != (4, 4, 4):
                raise CountsError(f"kind A counts must have shape (jobs, 4, 4, 4), got {c.shape}")
            if self.measurement_set not in ("SetI", "SetII"):
                raise CountsError(f"unknown measurement set {self.measurement_set!r} for kind A")
        elif self.kind == "B":
            if c.ndim != 3 or c.shape[1:] != (8, 8):
                raise CountsError(f"kind B counts must have shape (jobs, 8, 8), got {c.shape}")
            if self.measurement_set != "Tetrahedron":
                raise CountsError(f"unknown measurement set {self.measurement_set!r} for kind B")
        else:
            raise CountsError(f"unknown kind {self.kind!r}")
        if c.shape[0] < 1:
            raise CountsError("at least one job is required")
        if self.shots < 1 or self.repetitions < 1:
            raise CountsError("shots and repetitions must be positive")
        for loc in zip(*np.nonzero(c < 0)):
            raise CountsError(f"negative count in job {loc[0] + 1}, {self._where(loc[1:])}")
        per = self.shots * self.repetitions
        sums = c.sum(axis=-1) if self.kind == "A" else c.sum(axis=(1, 2))
        for loc in zip(*np.nonzero(sums != per)):
            where = self._where(loc[1:]) if self.kind == "A" else "all outcomes"
            raise CountsError(
                f"counts in job {loc[0] + 1}, {where} sum to {int(sums[loc])}, expected {per}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    def _where(self, idx) -> str:
        if self.kind == "A":
            return f"setting ({idx[0] + 1}, {idx[1] + 1})"
        return f"outcome ({idx[0]:03b}, {idx[1]:03b})"

    @property
    def jobs(self) -> int:
        return self.counts.shape[0]

    @property
    def trials_per_job(self) -> int:
        return self.shots * self.repetitions

    @property
    def total_trials(self) -> int:
        """N entering the error formula: trials per setting (A) or overall (B)."""
        return self.jobs * self.trials_per_job

    def subset(self, jobs) -> "CountsTable":
        idx = np.atleast_1d(np.asarray(jobs, dtype=int))
        if idx.size == 0:
            raise CountsError("job subset is empty")
        return CountsTable(
            self.kind, self.measurement_set, self.counts[idx], self.shots, self.repetitions, self.seed, self.device
        )

    def pooled(self) -> np.ndarray:
        return self.counts.sum(axis=0)


# --- sampling ------------------------------------------------------------------------


def ideal_distribution(spec: ScenarioSpec) -> np.ndarray:
    """(4, 4, 4) per-setting probabilities for kind A, (8, 8) raw probabilities for kind B."""
    if spec.kind == "A":
        return ideal_settings_a(spec)
    return raw_distribution_b().reshape(8, 8)


def _clean(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    return p / p.sum(axis=-1, keepdims=True)


def sample_counts(
    spec: ScenarioSpec,
    shots: int,
    jobs: int = 1,
    repetitions: int = 1,
    seed: int = 0,
    distribution: np.ndarray | None = None,
    device: str = "simulator",
) -> CountsTable:
    """Multinomial counts from the ideal (or a supplied) distribution."""
    if shots < 1 or jobs < 1 or repetitions < 1:
        raise ValueError("shots, jobs and repetitions must be positive")
    dist = ideal_distribution(spec) if distribution is None else np.asarray(distribution, dtype=float)
    per = shots * repetitions
    out = []
    for rng in streams(seed, jobs):
        if spec.kind == "A":
            probs = _clean(dist.reshape(16, 4))
            out.append(rng.multinomial(per, probs).reshape(4, 4, 4))
        else:
            probs = _clean(dist.reshape(64))
            out.append(rng.multinomial(per, probs).reshape(8, 8))
    return CountsTable(spec.kind, spec.measurement_set, np.array(out), shots, repetitions, seed, device)


# --- estimation ------------------------------------------------------------------------


def setting_frequencies(counts: np.ndarray) -> np.ndarray:
    c = np.asarray(counts, dtype=float)
    tot = c.sum(axis=-1, keepdims=True)
    if np.any(tot == 0):
        raise CountsError("a required setting has zero shots")
    return c / tot


def estimate_matrix(
    table: CountsTable, jobs=None, spectator: tuple[int, int] = (0, 0)
) -> ProbabilityMatrix:
    """Probability matrix from pooled counts of the selected jobs."""
    t = table if jobs is None else table.subset(jobs)
    pooled = t.pooled()
    if t.kind == "A":
        return matrix_from_settings(setting_frequencies(pooled))
    raw = pooled.reshape(-1).astype(float)
    return aggregate_b(raw / raw.sum(), spectator)


def _error_or_flag(p: ProbabilityMatrix, n: int) -> tuple[float, bool]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnreliableErrorWarning)
        err = witness_error(p, n)
    return err, not adjugate_is_zero(p)


def score_dataset(table: CountsTable, spectator: tuple[int, int] = (0, 0), label: str = "") -> WitnessReport:
    """W and its error from pooled counts, W' as the mean of per-job witnesses.

    Delta W' combines the per-job errors as independent estimates:
    sqrt(mean of per-job variances / jobs).
    """
    p = estimate_matrix(table, spectator=spectator)
    w = witness(p)
    dw, reliable = _error_or_flag(p, table.total_trials)
    if table.jobs == 1:
        wp, dwp = w, dw
    else:
        ws, vs = [], []
        for k in range(table.jobs):
            pk = estimate_matrix(table, [k], spectator)
            ek, ok = _error_or_flag(pk, table.trials_per_job)
            reliable = reliable and ok
            ws.append(witness(pk))
            vs.append(ek**2)
        wp = float(np.mean(ws))
        dwp = math.sqrt(float(np.mean(vs)) / table.jobs)
    extra = {"spectator": tuple(spectator)} if table.kind == "B" else {}
    return WitnessReport(w, dw, wp, dwp, table.total_trials, table.jobs, reliable, label, extra)


def score_all_spectators(table: CountsTable) -> dict[tuple[int, int], WitnessReport]:
    if table.kind != "B":
        raise ValueError("spectator choices only exist for kind B data")
    return {s: score_dataset(table, s, label=f"a0={s[0]} b0={s[1]}") for s in SPECTATOR_CHOICES}


# --- batched Monte Carlo ----------------------------------------------------------------


def batched_matrices_a(freqs: np.ndarray) -> np.ndarray:
    """Kind A matrices for a stack of (4, 4, 4) per-setting frequency arrays."""
    c = np.asarray(freqs, dtype=float)
    q = np.ones((c.shape[0], 5, 5))
    q[:, 1:, 1:] = c[..., 0]
    q[:, 1:, 0] = (c[..., 0] + c[..., 1]).mean(axis=2)
    q[:, 0, 1:] = (c[..., 0] + c[..., 2]).mean(axis=1)
    return q


def _batched_witness_a(dist: np.ndarray, shots: int, reps: int, rng: np.random.Generator) -> np.ndarray:
    probs = np.broadcast_to(_clean(dist.reshape(16, 4)), (reps, 16, 4))
    c = rng.multinomial(shots, probs).reshape(reps, 4, 4, 4) / shots
    return np.linalg.det(batched_matrices_a(c))


def _batched_witness_b(
    raw: np.ndarray, shots: int, reps: int, rng: np.random.Generator, spectators=((0, 0),)
) -> np.ndarray:
    """Witnesses with shape (reps, len(spectators))."""
    c = rng.multinomial(shots, np.broadcast_to(_clean(raw.reshape(64)), (reps, 64))) / shots
    out = []
    for s in spectators:
        agg = c @ OutcomeLabeling(tuple(s)).matrix().T
        out.append(np.linalg.det(agg.reshape(reps, 5, 5)))
    return np.stack(out, axis=1)


def replicate_witnesses(
    spec: ScenarioSpec,
    shots: int,
    replicates: int,
    seed: int = 0,
    distribution: np.ndarray | None = None,
    chunk: int = 500,
) -> np.ndarray:
    """Witness of ``replicates`` independent single-job datasets."""
    dist = ideal_distribution(spec) if distribution is None else np.asarray(distribution, dtype=float)
    chunks = [min(chunk, replicates - k) for k in range(0, replicates, chunk)]
    out = []
    for size, rng in zip(chunks, streams(seed, len(chunks))):
        if spec.kind == "A":
            out.append(_batched_witness_a(dist, shots, size, rng))
        else:
            out.append(_batched_witness_b(dist, shots, size, rng, (spec.spectator,))[:, 0])
    return np.concatenate(out)


@dataclass(frozen=True)
class ErrorValidation:
    analytic: float
    empirical: float
    z_mean: float
    z_var: float
    replicates: int
    shots: int

    @property
    def ratio(self) -> float:
        return self.empirical / self.analytic

    @property
    def within_contract(self) -> bool:
        return 0.95 <= self.ratio <= 1.05


def validate_error_formula(spec: ScenarioSpec, shots: int, replicates: int = 1000, seed: int = 0) -> ErrorValidation:
    """Compare the analytic error with the spread of W over resampled datasets."""
    if replicates < 100:
        raise ValueError("at least 100 replicates are needed")
    analytic = witness_error(ideal_matrix(spec), shots)
    ws = replicate_witnesses(spec, shots, replicates, seed)
    z = ws / analytic
    return ErrorValidation(
        analytic, float(np.std(ws, ddof=1)), float(np.mean(z)), float(np.var(z, ddof=1)), replicates, shots
    )


# --- contamination and signaling models ---------------------------------------------------


def contaminated_raw_b(weight: float, raw: np.ndarray | None = None) -> np.ndarray:
    """Raw (8, 8) distribution with a third level populated at ``weight``.

    The state sqrt(1-w)|psi> + sqrt(w)|22> with the extra level read out as
    the triple 111 by both parties. The readout is block diagonal in the
    level index, so the outcome distribution is the corresponding mixture.
    """
    if not 0 <= weight <= 1:
        raise ValueError("weight must lie in [0, 1]")
    base = (raw_distribution_b() if raw is None else np.asarray(raw, dtype=float)).reshape(8, 8)
    leak = np.zeros((8, 8))
    leak[7, 7] = 1.0
    return (1 - weight) * base + weight * leak


def signaling_settings(settings: np.ndarray, i: int, j: int, epsilon: float) -> np.ndarray:
    """Raise A's yes-marginal in setting (i, j) by epsilon, leaving B's marginal alone.

    Mass moves from (no, yes) to (yes, yes) and, if that runs out, from
    (no, no) to (yes, no).
    """
    s = np.array(settings, dtype=float)
    cell = s[i - 1, j - 1]
    move = min(epsilon, cell[2])
    cell[2] -= move
    cell[0] += move
    rest = epsilon - move
    if rest > cell[3] + 1e-15:
        raise ValueError("epsilon exceeds the available 'no' probability")
    cell[3] -= rest
    cell[1] += rest
    return s


@dataclass(frozen=True)
class PowerStudy:
    z: np.ndarray
    threshold: float

    @property
    def detection_rate(self) -> float:
        return float(np.mean(np.abs(self.z) > self.threshold))


def power_study_b(
    weight: float,
    shots: int,
    replicates: int = 200,
    seed: int = 0,
    threshold: float = 5.0,
    chunk: int = 100,
) -> PowerStudy:
    """z = W / Delta W for contaminated kind B datasets, all four spectator choices.

    Delta W is evaluated on each replicate's empirical matrix, as in scoring.
    """
    raw = contaminated_raw_b(weight)
    zs = []
    sizes = [min(chunk, replicates - k) for k in range(0, replicates, chunk)]
    for size, rng in zip(sizes, streams(seed, len(sizes))):
        c = rng.multinomial(shots, np.broadcast_to(_clean(raw.reshape(64)), (size, 64))) / shots
        for r in range(size):
            row = []
            for s in SPECTATOR_CHOICES:
                p = aggregate_b(c[r], s)
                err, _ = _error_or_flag(p, shots)
                row.append(witness(p) / err)
            zs.append(row)
    return PowerStudy(np.array(zs), threshold)


# --- no-signaling -------------------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    party: str
    index: int
    cond_a: int
    cond_b: int
    estimate_a: float
    estimate_b: float
    z: float

    def label(self) -> str:
        if self.party == "A":
            return f"p_{self.index}0 | j={self.cond_a} vs j={self.cond_b}"
        return f"p_0{self.index} | i={self.cond_a} vs i={self.cond_b}"


@dataclass(frozen=True)
class NoSignalingReport:
    estimates_a: np.ndarray  # [i, j] -> p_{i0,j}
    errors_a: np.ndarray
    estimates_b: np.ndarray  # [j, i] -> p_{0j,i}
    errors_b: np.ndarray
    comparisons: tuple = field(default_factory=tuple)

    @property
    def count(self) -> int:
        return len(self.comparisons)

    @property
    def max_abs_z(self) -> float:
        return max(abs(c.z) for c in self.comparisons)

    def worst(self) -> Comparison:
        return max(self.comparisons, key=lambda c: abs(c.z))

    @property
    def bonferroni_p(self) -> float:
        """Two-sided p-value of the largest |z|, multiplied by the comparison count."""
        return min(1.0, self.count * 2 * float(norm.sf(self.max_abs_z)))

    def signaling_detected(self, alpha: float = 0.05) -> bool:
        return self.bonferroni_p < alpha


def _pairwise(party, est, err) -> list[Comparison]:
    out = []
    n = est.shape[0]
    for k in range(n):
        for a, b in itertools.combinations(range(n), 2):
            se = math.sqrt(err[k, a] ** 2 + err[k, b] ** 2)
            diff = est[k, a] - est[k, b]
            z = 0.0 if diff == 0 else (diff / se if se > 0 else math.copysign(math.inf, diff))
            out.append(Comparison(party, k + 1, a + 1, b + 1, float(est[k, a]), float(est[k, b]), z))
    return out


def no_signaling_test(table: CountsTable) -> NoSignalingReport:
    """Compare each party's marginal across the other party's settings."""
    if table.kind != "A":
        raise ValueError("the no-signaling test needs kind A counts")
    c = table.pooled().astype(float)
    tot = c.sum(axis=-1)
    pa = (c[..., 0] + c[..., 1]) / tot  # [i, j]
    pb = ((c[..., 0] + c[..., 2]) / tot).T  # [j, i]
    ea = np.sqrt(pa * (1 - pa) / tot)
    eb = np.sqrt(pb * (1 - pb) / tot.T)
    comps = _pairwise("A", pa, ea) + _pairwise("B", pb, eb)
    return NoSignalingReport(pa, ea, pb, eb, tuple(comps))


def signaling_counts(table: CountsTable, i: int, j: int, epsilon: float) -> CountsTable:
    """Deterministically move counts to raise A's yes-marginal in setting (i, j)."""
    if table.kind != "A":
        raise ValueError("signaling injection needs kind A counts")
    c = np.array(table.counts)
    for job in range(table.jobs):
        cell = c[job, i - 1, j - 1]
        move = int(round(epsilon * cell.sum()))
        first = min(move, cell[2])
        cell[2] -= first
        cell[0] += first
        second = min(move - first, cell[3])
        cell[3] -= second
        cell[1] += second
    return CountsTable(table.kind, table.measurement_set, c, table.shots, table.repetitions, table.seed, table.device)


def extra_dimension_counts(table: CountsTable, weight: float) -> CountsTable:
    """Deterministically move a fraction ``weight`` of every job's trials to the extra-level outcome.

    Kind B: the raw outcome (111, 111). Kind A: (no, no) in every setting.
    """
    if not 0 <= weight <= 1:
        raise ValueError("weight must lie in [0, 1]")
    c = np.array(table.counts)
    per = table.trials_per_job
    if table.kind == "B":
        for job in range(table.jobs):
            kept = np.floor((1 - weight) * c[job]).astype(np.int64)
            kept[7, 7] += per - kept.sum()
            c[job] = kept
    else:
        kept = np.floor((1 - weight) * c).astype(np.int64)
        kept[..., 3] += per - kept.sum(axis=-1)
        c = kept
    return CountsTable(table.kind, table.measurement_set, c, table.shots, table.repetitions, table.seed, table.device)
