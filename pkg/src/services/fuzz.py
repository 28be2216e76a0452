"""
Fuzz Service

Runs the property suite over a range of generator seeds. Each seed is
independent; with more than one worker the seeds are spread over a process
pool. Every failing seed leaves two files in the output directory, written
atomically:
- seed-<n>.json: the instance document (re-fails under `verify`)
- seed-<n>.witness.json: the failing properties with their witnesses
"""

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from src.services.instances import (
    GeneratorParams,
    dumps,
    generate_random,
    write_atomic,
)
from src.services.propcheck import Status, run_suite

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeedResult:
    seed: int
    digest: str
    failed: Tuple[str, ...]
    skipped: Tuple[str, ...]
    document: str
    report: Dict[str, Any] = field(compare=False)


@dataclass
class FuzzSummary:
    seeds: List[int] = field(default_factory=list)
    failed: List[SeedResult] = field(default_factory=list)
    skipped: List[SeedResult] = field(default_factory=list)
    written: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seeds": len(self.seeds),
            "first_seed": self.seeds[0] if self.seeds else None,
            "passed": len(self.seeds) - len(self.failed),
            "failed": [
                {"seed": r.seed, "digest": r.digest, "properties": list(r.failed)}
                for r in self.failed
            ],
            "skipped": [
                {"seed": r.seed, "properties": list(r.skipped)} for r in self.skipped
            ],
            "written": self.written,
        }


def run_seed(
    seed: int, params: GeneratorParams, budget: int, check_budget: int
) -> SeedResult:
    """Generate one instance and run the full suite on it (process-pool entry point)."""
    instance = generate_random(seed, params)
    report = run_suite(instance, budget=budget, check_budget=check_budget)
    return SeedResult(
        seed=seed,
        digest=instance.digest,
        failed=tuple(r.id for r in report.failed),
        skipped=tuple(r.id for r in report.skipped),
        document=dumps(instance),
        report=report.to_dict(),
    )


def _write_failure(result: SeedResult, out_dir: Path) -> List[str]:
    instance_path = out_dir / f"seed-{result.seed}.json"
    witness_path = out_dir / f"seed-{result.seed}.witness.json"
    failures = [
        p for p in result.report["properties"] if p["status"] == Status.FAIL.value
    ]
    witness = {
        "seed": result.seed,
        "digest": result.digest,
        "instance": instance_path.name,
        "properties": failures,
    }
    write_atomic(instance_path, result.document)
    write_atomic(witness_path, json.dumps(witness, indent=2) + "\n")
    return [str(instance_path), str(witness_path)]


def run_fuzz(
    seeds: int,
    params: GeneratorParams = GeneratorParams(),
    start_seed: int = 0,
    budget: int = 20_000,
    check_budget: int = 250_000,
    workers: int = 1,
    out_dir: Optional[Union[str, Path]] = None,
) -> FuzzSummary:
    """Run the suite on seeds start_seed .. start_seed + seeds - 1.

    workers=0 uses one process per CPU; workers=1 runs in this process.
    """
    seed_range = list(range(start_seed, start_seed + seeds))
    if workers == 0:
        workers = os.cpu_count() or 1
    logger.info("Fuzzing %d seeds from %d on %d worker(s)", seeds, start_seed, workers)

    results: List[SeedResult] = []
    if workers == 1:
        results = [run_seed(s, params, budget, check_budget) for s in seed_range]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(run_seed, s, params, budget, check_budget)
                for s in seed_range
            ]
            for done, future in enumerate(as_completed(futures), start=1):
                results.append(future.result())
                if done % 50 == 0:
                    logger.info("Fuzzed %d/%d seeds", done, seeds)
    results.sort(key=lambda r: r.seed)

    summary = FuzzSummary(seeds=seed_range)
    target = Path(out_dir) if out_dir is not None else None
    if target is not None:
        target.mkdir(parents=True, exist_ok=True)
    for result in results:
        if result.skipped:
            summary.skipped.append(result)
        if not result.failed:
            continue
        logger.warning("Seed %d failed: %s", result.seed, ", ".join(result.failed))
        summary.failed.append(result)
        if target is not None:
            summary.written.extend(_write_failure(result, target))
    logger.info(
        "Fuzz finished: %d passed, %d failed, %d with skipped properties",
        len(seed_range) - len(summary.failed),
        len(summary.failed),
        len(summary.skipped),
    )
    return summary
