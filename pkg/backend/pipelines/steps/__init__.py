"""
Verification suites. Each module exposes run(config, progress) -> SuiteResult.
"""

import zlib

import numpy as np
from tqdm import tqdm

from backend.app.models import RunConfig, SuiteResult


def suite_rng(config: RunConfig, name: str) -> np.random.Generator:
    """Per-suite stream so suites stay reproducible when run alone or in any order."""
    return np.random.default_rng([config.seed, zlib.crc32(name.encode())])


def progress_range(count: int, name: str, progress: bool):
    return tqdm(range(count), desc=name, disable=not progress, leave=False)


class Tally:
    """Accumulates checks of the form deviation <= allowed."""

    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.violations = 0
        self.max_deviation = 0.0
        self.detail: dict = {}

    def check(self, deviation: float, allowed: float) -> bool:
        deviation = float(deviation)
        self.checked += 1
        self.max_deviation = max(self.max_deviation, deviation)
        if deviation > allowed:
            self.violations += 1
            return False
        return True

    def result(self) -> SuiteResult:
        return SuiteResult(
            name=self.name,
            passed=self.violations == 0 and self.checked > 0,
            checked=self.checked,
            violations=self.violations,
            max_deviation=self.max_deviation,
            detail=self.detail,
        )
