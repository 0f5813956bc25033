"""Binary RIS-placement optimization.

The decision variable is an N_B x 4 binary matrix X: X[i, j] = 1 deploys an
RIS on facet j+1 of building i.  Constraints: at most one RIS per building
and at most floor(N_B * gamma) RISs in total.  The objective is the fraction
of (satellite, NLoS user) pairs whose summed received power through the
deployed RISs strictly exceeds the threshold.

Solvers: an island-model genetic algorithm with periodic crossover- and
mutation-migration between populations on a ring, an exhaustive search for
small instances, and a random-placement baseline.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

EXHAUSTIVE_GUARD = 10 ** 7


@dataclass
class DeploymentMask:
    entries: np.ndarray  # (N_B, 4) uint8

    @classmethod
    def zeros(cls, n_b: int) -> "DeploymentMask":
        return cls(entries=np.zeros((n_b, 4), dtype=np.uint8))

    @classmethod
    def from_pairs(cls, pairs, n_b: int) -> "DeploymentMask":
        """pairs: iterable of (building_id, facet_id) with facet_id in 1..4."""
        m = cls.zeros(n_b)
        for b, j in pairs:
            m.entries[int(b), int(j) - 1] = 1
        return m

    def to_pairs(self):
        return [(int(i), int(j) + 1) for i, j in np.argwhere(self.entries)]

    @property
    def n_deployed(self) -> int:
        return int(self.entries.sum())


@dataclass(frozen=True)
class PgaParams:
    n_p: int = 4               # populations
    s_p: int = 50              # individuals per population
    i: int = 25                # migration interval (generations)
    n_m: int = 20              # migration rounds
    n_g: int = None            # total generations; defaults to i * n_m
    e1: int = 3                # crossover-migration elite size
    e2: int = 1                # mutation-migration elite size
    crossover_rate: float = 0.9
    mutation_rate: float = None  # per-bit; defaults to 1 / (4 * N_B)
    seed: int = 0

    def __post_init__(self):
        if self.n_g is None:
            object.__setattr__(self, "n_g", self.i * self.n_m)
        if self.n_p < 2:
            raise ValueError("n_p must be >= 2")
        if self.s_p < 2:
            raise ValueError("s_p must be >= 2")
        if self.i < 1 or self.n_m < 1:
            raise ValueError("i and n_m must be >= 1")
        if self.n_g != self.i * self.n_m:
            raise ValueError("n_g must equal i * n_m")
        if not 0 < self.e1 < self.s_p:
            raise ValueError("need 0 < e1 < s_p")
        if not 0 < self.e2 <= self.s_p:
            raise ValueError("need 0 < e2 <= s_p")
        for r in (self.crossover_rate, self.mutation_rate):
            if r is not None and not 0.0 <= r <= 1.0:
                raise ValueError("rates must be in [0, 1]")


@dataclass
class FitnessReport:
    best_mask: DeploymentMask
    best_fitness: float
    history: list = field(default_factory=list)  # running best per generation
    n_evaluations: int = 0
    wall_time: float = 0.0


def budget(n_b: int, gamma: float) -> int:
    return int(math.floor(n_b * gamma + 1e-12))


def _entries(x) -> np.ndarray:
    return np.asarray(getattr(x, "entries", x))


def objective(x, power_set, epsilon: float) -> float:
    """Covered fraction of (satellite, NLoS user) pairs under deployment x."""
    ent = _entries(x)
    n_b = power_set.n_buildings
    if ent.shape != (n_b, 4):
        raise ValueError(f"mask shape {ent.shape} != ({n_b}, 4)")
    w = power_set.stacked()
    if w.shape[0] == 0:
        return 0.0
    received = w @ ent.reshape(-1).astype(float)
    return float(np.count_nonzero(received > epsilon) / w.shape[0])


def is_feasible(x, gamma: float, n_b: int) -> bool:
    ent = _entries(x).reshape(n_b, 4)
    if ent.sum(axis=1).max(initial=0) > 1:
        return False
    return ent.sum() <= budget(n_b, gamma)


def _repair_population(pop: np.ndarray, cap: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized repair of a (S, N_B, 4) uint8 population."""
    pop = pop.copy()
    s, n_b, _ = pop.shape
    row_sum = pop.sum(axis=2)
    viol = row_sum > 1
    if viol.any():
        scores = np.where(pop > 0, rng.random(pop.shape), -1.0)
        keep = scores.argmax(axis=2)
        onehot = (np.arange(4)[None, None, :] == keep[:, :, None]).astype(np.uint8)
        pop = np.where(viol[:, :, None], onehot, pop)
    sel = pop.any(axis=2)
    over = sel.sum(axis=1) > cap
    if over.any():
        scores = np.where(sel, rng.random((s, n_b)), -np.inf)
        order = np.argsort(-scores, axis=1, kind="stable")
        ranks = np.empty_like(order)
        np.put_along_axis(ranks, order,
                          np.broadcast_to(np.arange(n_b), (s, n_b)).copy(), axis=1)
        clear = over[:, None] & sel & (ranks >= cap)
        pop[clear] = 0
    return pop


def repair(x, gamma: float, n_b: int, rng: np.random.Generator) -> DeploymentMask:
    """Feasible projection: one random kept bit per violating row, then
    random evictions down to the budget.  Feasible masks pass through."""
    ent = _entries(x).reshape(1, n_b, 4).astype(np.uint8)
    fixed = _repair_population(ent, budget(n_b, gamma), rng)
    return DeploymentMask(entries=fixed[0])


def random_deployment(n_b: int, gamma: float, rng: np.random.Generator) -> DeploymentMask:
    """floor(n_b * gamma) distinct buildings, one uniform facet each."""
    k = budget(n_b, gamma)
    mask = DeploymentMask.zeros(n_b)
    if k == 0:
        return mask
    chosen = rng.choice(n_b, size=k, replace=False)
    facets = rng.integers(0, 4, size=k)
    mask.entries[chosen, facets] = 1
    return mask


# ---------------------------------------------------------------------------
# Fitness evaluation with memoization
# ---------------------------------------------------------------------------

class _Evaluator:
    def __init__(self, power_set, epsilon: float):
        self.w = power_set.stacked()
        self.rows = self.w.shape[0]
        self.eps = epsilon
        self.cache = {}
        self.n_evals = 0

    def __call__(self, flat_pop: np.ndarray) -> np.ndarray:
        """flat_pop: (S, n_bits) uint8 -> (S,) fitness."""
        out = np.empty(flat_pop.shape[0])
        misses = []
        keys = []
        for i, row in enumerate(flat_pop):
            key = np.packbits(row).tobytes()
            keys.append(key)
            val = self.cache.get(key)
            if val is None:
                misses.append(i)
            else:
                out[i] = val
        if misses:
            sub = flat_pop[misses].astype(float)
            if self.rows:
                received = self.w @ sub.T
                vals = np.count_nonzero(received > self.eps, axis=0) / self.rows
            else:
                vals = np.zeros(len(misses))
            self.n_evals += len(misses)
            for i, v in zip(misses, vals):
                v = float(v)
                self.cache[keys[i]] = v
                out[i] = v
        return out


# ---------------------------------------------------------------------------
# Exhaustive search
# ---------------------------------------------------------------------------

def enumeration_size(n_b: int, gamma: float) -> int:
    cap = budget(n_b, gamma)
    return sum(math.comb(n_b, k) * 4 ** k for k in range(cap + 1))


def exhaustive_search(power_set, epsilon: float, gamma: float) -> FitnessReport:
    """Global optimum over every feasible mask; ties broken toward the
    lexicographically smallest flattened bit string."""
    n_b = power_set.n_buildings
    total = enumeration_size(n_b, gamma)
    if total > EXHAUSTIVE_GUARD:
        raise ValueError(f"instance too large for exhaustive search "
                         f"({total} > {EXHAUSTIVE_GUARD} masks)")
    t0 = time.perf_counter()
    ev = _Evaluator(power_set, epsilon)
    cap = budget(n_b, gamma)
    n_bits = 4 * n_b

    best_val = -1.0
    best_key = None
    best_bits = None

    def flush(block):
        nonlocal best_val, best_key, best_bits
        arr = np.array(block, dtype=np.uint8)
        if ev.rows:
            received = ev.w @ arr.T.astype(float)
            vals = np.count_nonzero(received > ev.eps, axis=0) / ev.rows
        else:
            vals = np.zeros(arr.shape[0])
        ev.n_evals += arr.shape[0]
        for bits, val in zip(arr, vals):
            key = np.packbits(bits).tobytes()
            better = val > best_val or (val == best_val
                                        and (best_key is None or key < best_key))
            if better:
                best_val, best_key, best_bits = float(val), key, bits.copy()

    block = []
    for k in range(cap + 1):
        for combo in itertools.combinations(range(n_b), k):
            for facets in itertools.product(range(4), repeat=k):
                bits = np.zeros(n_bits, dtype=np.uint8)
                for b, j in zip(combo, facets):
                    bits[4 * b + j] = 1
                block.append(bits)
                if len(block) >= 4096:
                    flush(block)
                    block = []
    if block:
        flush(block)

    mask = DeploymentMask(entries=best_bits.reshape(n_b, 4))
    return FitnessReport(best_mask=mask, best_fitness=best_val,
                         history=[best_val], n_evaluations=ev.n_evals,
                         wall_time=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Island-model genetic algorithm
# ---------------------------------------------------------------------------

def _crossover_mutate(p1, p2, rng, params, mut_rate):
    """Uniform crossover at the configured rate, then per-bit mutation."""
    do_x = rng.random(p1.shape[0]) < params.crossover_rate
    mix = rng.random(p1.shape) < 0.5
    child = np.where(do_x[:, None] & mix, p2, p1)
    flips = rng.random(child.shape) < mut_rate
    return child ^ flips.astype(np.uint8)


def _ga_generation(pop, fit, ev, rng, params, n_b, cap, mut_rate):
    """One generation: elitism of the best, tournament selection, uniform
    crossover, mutation, repair."""
    s = pop.shape[0]
    elite = int(np.argmax(fit))
    elite_row = pop[elite].copy()

    cand = rng.integers(0, s, size=(2, s - 1, 2))
    w1 = np.where(fit[cand[0, :, 0]] >= fit[cand[0, :, 1]],
                  cand[0, :, 0], cand[0, :, 1])
    w2 = np.where(fit[cand[1, :, 0]] >= fit[cand[1, :, 1]],
                  cand[1, :, 0], cand[1, :, 1])
    child = _crossover_mutate(pop[w1], pop[w2], rng, params, mut_rate)
    child = _repair_population(child.reshape(s - 1, n_b, 4), cap,
                               rng).reshape(s - 1, -1)
    new_pop = np.vstack([elite_row[None, :], child])
    return new_pop, ev(new_pop)


def pga_optimize(power_set, epsilon: float, gamma: float, params: PgaParams,
                 initial_masks=None) -> FitnessReport:
    """Island-model GA over the feasible deployment masks.

    N_P populations evolve independently for I generations per round; each
    round ends with a crossover-migration (top E1 of every population breed
    offspring that replace the worst E1 of the next population on the ring)
    and a mutation-migration (best E2 are mutated into the next population,
    replacing its worst E2).  Deterministic for a fixed params.seed.
    """
    n_b = power_set.n_buildings
    if power_set.total_nlos == 0:
        raise ValueError("no NLoS users to optimize over")
    cap = budget(n_b, gamma)
    n_bits = 4 * n_b
    mut_rate = params.mutation_rate if params.mutation_rate is not None \
        else 1.0 / n_bits
    t0 = time.perf_counter()
    ev = _Evaluator(power_set, epsilon)

    if cap == 0:
        mask = DeploymentMask.zeros(n_b)
        val = objective(mask, power_set, epsilon)
        return FitnessReport(best_mask=mask, best_fitness=val,
                             history=[val] * params.n_g, n_evaluations=1,
                             wall_time=time.perf_counter() - t0)

    streams = [np.random.default_rng(ss)
               for ss in np.random.SeedSequence(params.seed).spawn(params.n_p)]

    pops = []
    fits = []
    for p, rng in enumerate(streams):
        pop = np.zeros((params.s_p, n_bits), dtype=np.uint8)
        for i in range(params.s_p):
            pop[i] = random_deployment(n_b, gamma, rng).entries.reshape(-1)
        if p == 0 and initial_masks:
            for i, m in enumerate(initial_masks[: params.s_p]):
                fixed = repair(m, gamma, n_b, rng)
                pop[i] = fixed.entries.reshape(-1)
        pops.append(pop)
        fits.append(ev(pop))

    best_val = -1.0
    best_bits = None

    def track():
        nonlocal best_val, best_bits
        for pop, fit in zip(pops, fits):
            i = int(np.argmax(fit))
            if fit[i] > best_val:
                best_val = float(fit[i])
                best_bits = pop[i].copy()

    track()
    history = []

    for _ in range(params.n_m):
        for _ in range(params.i):
            for p in range(params.n_p):
                pops[p], fits[p] = _ga_generation(
                    pops[p], fits[p], ev, streams[p], params, n_b, cap, mut_rate)
            track()
            history.append(best_val)

        # crossover migration: top E1 of p breed into population p+1
        for p in range(params.n_p):
            q = (p + 1) % params.n_p
            order = np.argsort(-fits[p], kind="stable")
            parents = pops[p][order[: params.e1]]
            mates = parents[(np.arange(params.e1) + 1) % params.e1]
            child = _crossover_mutate(parents, mates, streams[p], params, mut_rate)
            child = _repair_population(child.reshape(-1, n_b, 4), cap,
                                       streams[p]).reshape(-1, n_bits)
            child_fit = ev(child)
            worst = np.argsort(fits[q], kind="stable")[: params.e1]
            pops[q][worst] = child
            fits[q][worst] = child_fit
        track()

        # mutation migration: best E2 of p, mutated, into population p+1
        for p in range(params.n_p):
            q = (p + 1) % params.n_p
            order = np.argsort(-fits[p], kind="stable")
            chosen = pops[p][order[: params.e2]].copy()
            flips = streams[p].random(chosen.shape) < mut_rate
            chosen ^= flips.astype(np.uint8)
            chosen = _repair_population(chosen.reshape(-1, n_b, 4), cap,
                                        streams[p]).reshape(-1, n_bits)
            chosen_fit = ev(chosen)
            worst = np.argsort(fits[q], kind="stable")[: params.e2]
            pops[q][worst] = chosen
            fits[q][worst] = chosen_fit
        track()

    mask = DeploymentMask(entries=best_bits.reshape(n_b, 4).astype(np.uint8))
    return FitnessReport(best_mask=mask, best_fitness=best_val,
                         history=history, n_evaluations=ev.n_evals,
                         wall_time=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Mask / history serialization
# ---------------------------------------------------------------------------

def save_mask(mask: DeploymentMask, path) -> None:
    import csv
    from pathlib import Path
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["building_id", "facet_id"])
        for b, j in mask.to_pairs():
            w.writerow([b, j])


def load_mask(path, n_b: int) -> DeploymentMask:
    import csv
    with open(path, newline="") as fh:
        pairs = [(int(r["building_id"]), int(r["facet_id"]))
                 for r in csv.DictReader(fh)]
    return DeploymentMask.from_pairs(pairs, n_b)


def save_history(report: FitnessReport, path) -> None:
    import csv
    from pathlib import Path
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["generation", "best_fitness"])
        for g, v in enumerate(report.history):
            w.writerow([g, f"{v:.17g}"])
