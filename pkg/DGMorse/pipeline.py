"""
Verification pipeline: logging setup, threaded fan-out and the seeded sweeps
"""

import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from contextlib import contextmanager
from datetime import datetime
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .ainfty import (compose_morphisms, homology_roundtrip, homotopy_transfer,
                     identity_morphism, invert_infty_iso, invert_infty_quasi_iso, morphisms_equal,
                     verify_ainfty_module, verify_morphism)
from .builtins import free_module
from .complexes import retract_to_homology
from .config import ToolkitConfig
from .exceptions import ConfigurationError, ToolkitError
from .output_formatter import OutputFormatter
from .pathmod import (compose_path, identity_path_morphism, invert_path_iso, invert_path_quasi,
                      path_homology_roundtrip, verify_path_module, verify_path_morphism)
from .random_fixtures import (instance_rngs, random_complex, random_dga, random_free_module, random_infty_iso,
                              random_path_iso, random_path_quasi, random_quasi_iso, shifted_free_morphism)
from .reports import combine, failed, failed_checks, is_pass, passed

SWEEPS = ("iso", "transfer", "quasi", "path")

# Shifts cycled through by the iso sweep
ISO_SHIFTS = (0, 1, -1, 2)


def roundtrip_report(check: str, left, right) -> dict:
    witness = morphisms_equal(left, right)
    if witness:
        return failed(check, "composite is not the identity morphism", witness)
    return passed(check)


class VerificationPipeline:
    """Runs verification tasks and randomized sweeps under one configuration"""

    def __init__(self, config: Optional[ToolkitConfig] = None):
        """Initialize the pipeline with configuration"""
        self.config = config or ToolkitConfig()
        try:
            self.config.validate()
        except ValueError as e:
            raise ConfigurationError(str(e))
        self.setup_logging()
        self.formatter = OutputFormatter(self.config)
        self.timings: Dict[str, float] = {}

    def setup_logging(self):
        """Setup logging configuration"""
        handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
        if self.config.log_to_file:
            log_dir = Path(self.config.output_dir) / "logs"
            log_dir.mkdir(parents=True, exist_ok=True)
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            handlers.append(logging.FileHandler(log_dir / f"dgmorse_{timestamp}.log"))

        logging.basicConfig(
            level=self.config.log_level,
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            handlers=handlers
        )
        logging.getLogger("DGMorse").setLevel(self.config.log_level)
        self.logger = logging.getLogger(__name__)

    @contextmanager
    def timed(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - start

    def run_tasks(self, tasks: List[Callable[[], dict]], label: str) -> List[dict]:
        """
        Run independent tasks, on worker threads when more than one worker is
        configured. Results come back in task order whatever the completion order.
        """
        results: List[Optional[dict]] = [None] * len(tasks)
        workers = min(self.config.max_workers, len(tasks)) if self.config.use_threads else 1

        if workers <= 1:
            for index, task in enumerate(tasks):
                results[index] = self._run_one(task, label, index)
            return results

        with ThreadPoolExecutor(max_workers=workers) as executor:
            future_to_index = {executor.submit(self._run_one, task, label, index): index
                               for index, task in enumerate(tasks)}
            for future in as_completed(future_to_index):
                results[future_to_index[future]] = future.result()
        return results

    def _run_one(self, task: Callable[[], dict], label: str, index: int) -> dict:
        try:
            report = task()
        except ToolkitError as e:
            self.logger.warning(f"{label} instance {index} raised {type(e).__name__}: {e}")
            report = failed(f"instance {index}", f"{type(e).__name__}: {e}", e.witness)
        except Exception as e:
            self.logger.error(f"{label} instance {index} crashed: {e}")
            report = failed(f"instance {index}", f"{type(e).__name__}: {e}")
        if not is_pass(report):
            self.logger.info(f"{label} instance {index} failed")
        return report

    # Sweeps

    def run_sweep(self, which: str) -> dict:
        if which == "all":
            return combine("sweeps", [self.run_sweep(name) for name in SWEEPS])
        runners = {
            "iso": (self.iso_instance, self.config.iso_instances),
            "transfer": (self.transfer_instance, self.config.transfer_instances),
            "quasi": (self.quasi_instance, self.config.quasi_instances),
            "path": (self.path_instance, self.config.path_instances),
        }
        if which not in runners:
            raise ConfigurationError(f"unknown sweep {which!r} (expected one of {', '.join(SWEEPS)}, all)")
        runner, count = runners[which]
        self.logger.info(f"Running {which} sweep: {count} instances, seed {self.config.seed}")
        rngs = instance_rngs(self.config.seed, count)
        tasks = [partial(runner, index, rng) for index, rng in enumerate(rngs)]
        with self.timed(f"{which}_sweep"):
            reports = self.run_tasks(tasks, which)
        details = {"instances": count, "failed": len(failed_checks(reports)), "arity_bound": self.config.max_arity,
                   "degrees": [self.config.sweep_min_degree, self.config.sweep_max_degree],
                   "max_dim": self.config.sweep_max_dim}
        return combine(f"{which}_sweep", reports, details)

    def iso_instance(self, index: int, rng: np.random.Generator) -> dict:
        """Random ∞-isomorphism (shift cycled through ISO_SHIFTS) against its inverse."""
        K = self.config.max_arity
        A = random_dga(rng)
        V = random_complex(rng, self.config.sweep_degrees, self.config.sweep_max_dim)
        f = random_infty_iso(rng, free_module(A, V), K)
        m = ISO_SHIFTS[index % len(ISO_SHIFTS)]
        if m:
            f = compose_morphisms(shifted_free_morphism(A, V, m, K), f)
        g = invert_infty_iso(f)
        checks = [
            verify_morphism(f),
            verify_morphism(g),
            roundtrip_report("inverse_after", compose_morphisms(g, f), identity_morphism(f.source)),
            roundtrip_report("inverse_before", compose_morphisms(f, g), identity_morphism(f.target)),
        ]
        return combine(f"instance {index}", checks, {"algebra": A.name, "shift": m})

    def transfer_instance(self, index: int, rng: np.random.Generator) -> dict:
        """Transfer of a random free module onto its homology, at the transfer arity."""
        A = random_dga(rng)
        M = random_free_module(rng, A, self.config.sweep_max_dim, self.config.sweep_degrees)
        R = retract_to_homology(M.complex)
        small, i, p = homotopy_transfer(M, R, self.config.transfer_arity)
        checks = [verify_ainfty_module(small), verify_morphism(i), verify_morphism(p)]
        return combine(f"instance {index}", checks,
                       {"algebra": A.name, "homology_dims": {str(q): n for q, n in R.small.space.dims().items()}})

    def quasi_instance(self, index: int, rng: np.random.Generator) -> dict:
        A = random_dga(rng)
        instance = random_quasi_iso(rng, A, self.config.max_arity, self.config.sweep_max_dim,
                                    self.config.sweep_degrees)
        f = instance.morphism
        g = invert_infty_quasi_iso(f, retract_to_homology(instance.source.complex),
                                   retract_to_homology(instance.target.complex))
        checks = [verify_morphism(f), verify_morphism(g), homology_roundtrip(f, g)]
        return combine(f"instance {index}", checks, {"algebra": A.name})

    def path_instance(self, index: int, rng: np.random.Generator) -> dict:
        """Path quasi-isomorphism between cone modules, its homotopy inverse, and a path automorphism."""
        A = random_dga(rng)
        instance = random_path_quasi(rng, A, self.config.max_arity, self.config.sweep_max_dim,
                                     self.config.sweep_degrees)
        h = instance.morphism
        g = invert_path_quasi(h)
        auto = random_path_iso(rng, instance.target)
        checks = [
            verify_path_module(instance.source),
            verify_path_module(instance.target),
            verify_path_morphism(h),
            verify_path_morphism(g),
            path_homology_roundtrip(h, g),
            roundtrip_report("path_iso_roundtrip", compose_path(invert_path_iso(auto), auto),
                          identity_path_morphism(instance.target)),
        ]
        return combine(f"instance {index}", checks, {"algebra": A.name})

    # Results

    def generate_summary(self, report: Dict[str, Any]) -> Dict[str, Any]:
        """Generate summary of a command report"""
        checks = report.get("checks", [])
        summary = {
            "command": report.get("command"),
            "status": report.get("status"),
            "total_checks": len(checks),
            "passed": sum(1 for c in checks if is_pass(c)),
            "failed": [c.get("check") for c in failed_checks(checks)],
            "seed": report.get("seed"),
            "timestamp": datetime.now().isoformat(),
        }
        if self.timings:
            summary["processing_time"] = sum(self.timings.values())
        return summary

    def save_results(self, report: Dict[str, Any], summary: Optional[Dict[str, Any]] = None) -> Path:
        """Save a report and its summary to the output directory"""
        output_dir = Path(self.config.output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")

        if self.config.output_format == "text":
            results_file = output_dir / f"dgmorse_results_{timestamp}.txt"
            self.formatter.export_to_text(report, results_file)
        else:
            results_file = output_dir / f"dgmorse_results_{timestamp}.json"
            self.formatter.export_to_json(report, results_file)

        summary_file = output_dir / f"dgmorse_summary_{timestamp}.json"
        with open(summary_file, 'w', encoding='utf-8') as f:
            json.dump(summary or self.generate_summary(report), f, indent=2, default=str)

        self.logger.info(f"Results saved to {output_dir}")
        return results_file
