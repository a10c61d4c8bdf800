"""Local rules from a decision tree grown on a genetic neighborhood."""

from typing import Tuple

import numpy as np
from loguru import logger

from ..solvers.cart import CartParams, cart_build, cart_path_predicates
from .base import ExplainerKind, Explanation, LoreParams, rule_items
from .perturbation import SeedLike, perturb


def lore_fitness(
    Z: np.ndarray, x: np.ndarray, z_labels: np.ndarray, x_label: int, same: bool
) -> np.ndarray:
    """Neighborhood fitness.

    ``I[label matches] + (1 - hamming(x, z) / d) - I[z == x]``, where a
    match means the same label as x when ``same`` and a different one
    otherwise.
    """
    Z = np.atleast_2d(Z)
    d = x.shape[0]
    hamming = (Z != x[None, :]).sum(axis=1)
    agrees = (z_labels == x_label) if same else (z_labels != x_label)
    return agrees.astype(np.float64) + (1.0 - hamming / d) - (hamming == 0).astype(np.float64)


def _tournament(fitness: np.ndarray, size: int, count: int, rng: np.random.Generator) -> np.ndarray:
    contenders = rng.integers(0, fitness.size, size=(count, size))
    # argmax keeps the first contender on ties
    return contenders[np.arange(count), np.argmax(fitness[contenders], axis=1)]


def evolve_neighborhood(
    model, x: np.ndarray, label: int, same: bool, params: LoreParams, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Run one genetic search; returns the final population and its labels."""
    n = params.population_size
    d = x.shape[0]
    population = perturb(x, n, params.bit_flip_prob, rng).vectors
    labels = model.predict_batch(population)

    for _ in range(params.generations):
        fitness = lore_fitness(population, x, labels, label, same)
        parents = population[_tournament(fitness, params.tournament_size, n, rng)].copy()

        # Two-point crossover on consecutive parent pairs
        for i in range(0, n - 1, 2):
            if rng.random() < params.crossover_rate:
                lo, hi = np.sort(rng.choice(d + 1, size=2, replace=False))
                swap = parents[i, lo:hi].copy()
                parents[i, lo:hi] = parents[i + 1, lo:hi]
                parents[i + 1, lo:hi] = swap

        mutate = rng.random(n) < params.mutation_rate
        flips = (rng.random((n, d)) < params.bit_flip_prob) & mutate[:, None]
        children = np.where(flips, 1 - parents, parents).astype(np.uint8)
        child_labels = model.predict_batch(children)

        # Elitist replacement: keep the best n of parents and children
        pool = np.vstack([population, children])
        pool_labels = np.concatenate([labels, child_labels])
        pool_fitness = lore_fitness(pool, x, pool_labels, label, same)
        keep = np.argsort(-pool_fitness, kind="stable")[:n]
        population, labels = pool[keep], pool_labels[keep]

    return population, labels


def explain_lore(
    model, x: np.ndarray, params: LoreParams, seed: SeedLike, sample_id: str = ""
) -> Explanation:
    """Rule on x's path through a tree fitted to a genetic neighborhood.

    Two genetic runs collect neighbors with x's label and with other
    labels; the tree is grown on both sets plus x against model labels.
    Items are x's path predicates, root first, scored by path position.
    """
    x = np.asarray(x, dtype=np.uint8)
    label = model.predict(x)
    rng = np.random.default_rng(seed)

    same_pop, same_labels = evolve_neighborhood(model, x, label, True, params, rng)
    diff_pop, diff_labels = evolve_neighborhood(model, x, label, False, params, rng)
    keep_same = same_labels == label
    keep_diff = diff_labels != label

    common = dict(
        approach=ExplainerKind.LORE,
        model_id=model.model_id,
        sample_id=sample_id,
        predicted_label=label,
    )
    if not keep_diff.any():
        logger.warning(f"LORE found no differently-labeled neighbor of {sample_id or 'sample'}")
        return Explanation(**common, flags=("degenerate",), notes={"neighbors": float(keep_same.sum())})

    Z = np.vstack([x[None, :], same_pop[keep_same], diff_pop[keep_diff]])
    y = np.concatenate([[label], same_labels[keep_same], diff_labels[keep_diff]])
    Z, first = np.unique(Z, axis=0, return_index=True)
    y = y[first]

    tree = cart_build(
        Z,
        y,
        params=CartParams(max_depth=params.max_depth, min_leaf=params.min_leaf),
        n_classes=model.class_count,
    )
    predicates = cart_path_predicates(tree, x)
    scores = [float(len(predicates) - i) for i in range(len(predicates))]
    fidelity = float((tree.predict(Z) == y).mean())
    return Explanation(
        **common,
        items=rule_items(predicates, scores),
        flags=() if predicates else ("degenerate",),
        notes={"neighbors": float(Z.shape[0]), "fidelity": fidelity},
    )
