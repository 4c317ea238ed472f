"""
Sampler Worker Tasks

Runs independent hit-and-run chains, optionally in parallel processes, and
evaluates a detector on every emitted state. Chain i is seeded with
splitmix64(seed + i); results are always reduced in chain order, so output
does not depend on worker scheduling.
"""

import concurrent.futures as fut
import time
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from shared.models import SamplerConfig
from shared.utils.config import get_settings
from shared.utils.logging import bind_chain_context, clear_context, get_logger
from workers.sampler_worker.hit_and_run import iter_states

logger = get_logger("sampler_worker")

_MASK64 = (1 << 64) - 1


class Detector(Protocol):
    """Anything that maps a raw state matrix to a row of detection flags."""

    def detect(self, matrix: np.ndarray) -> np.ndarray: ...


@dataclass
class ChainResult:
    chain_index: int
    seed: int
    flags: np.ndarray  # (n_samples, n_flags) bool
    states: np.ndarray | None = None  # (n_samples, D, D) when kept


def split_seed(seed: int, chain_index: int) -> int:
    """splitmix64 finalizer applied to seed + chain_index (mod 2^64)."""
    z = (seed + chain_index + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def chain_sizes(n_samples: int, n_chains: int) -> list[int]:
    """Split n_samples across chains; earlier chains take the remainder."""
    base, extra = divmod(n_samples, n_chains)
    return [base + (1 if i < extra else 0) for i in range(n_chains) if base or i < extra]


def run_chain_task(
    config: SamplerConfig,
    detector: Detector,
    chain_index: int,
    keep_states: bool = False,
) -> ChainResult:
    """
    Run one chain and evaluate the detector on each emitted state.

    The chain uses config.n_samples and the seed split from config.seed.
    """
    seed = split_seed(config.seed, chain_index)
    bind_chain_context(chain_index, seed)
    logger.info("Starting chain", dims=config.dims, n_samples=config.n_samples)

    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    rows, kept = [], []
    for matrix in iter_states(config, rng):
        rows.append(detector.detect(matrix))
        if keep_states:
            kept.append(matrix)

    flags = np.asarray(rows, dtype=bool)
    logger.info(
        "Finished chain",
        steps=config.total_steps,
        wall_time=round(time.perf_counter() - started, 3),
        detected=flags.sum(axis=0).tolist(),
    )
    clear_context()
    return ChainResult(
        chain_index=chain_index,
        seed=seed,
        flags=flags,
        states=np.asarray(kept) if keep_states else None,
    )


def run_chains(
    config: SamplerConfig,
    detector: Detector,
    n_chains: int | None = None,
    max_workers: int | None = None,
    keep_states: bool = False,
) -> list[ChainResult]:
    """
    Run n_chains independent chains sharing config.n_samples between them.

    A single chain runs in-process; several chains run in a process pool.

    Returns:
        Chain results ordered by chain index
    """
    settings = get_settings()
    n_chains = n_chains or settings.n_chains
    max_workers = max_workers or settings.max_workers
    configs = [
        config.model_copy(update={"n_samples": size})
        for size in chain_sizes(config.n_samples, n_chains)
    ]

    if len(configs) == 1:
        return [run_chain_task(configs[0], detector, 0, keep_states)]

    logger.info("Running chains in parallel", n_chains=len(configs), max_workers=max_workers)
    with fut.ProcessPoolExecutor(max_workers=max_workers) as pool:
        futures = [
            pool.submit(run_chain_task, cfg, detector, index, keep_states)
            for index, cfg in enumerate(configs)
        ]
        results = [f.result() for f in futures]
    return sorted(results, key=lambda r: r.chain_index)
