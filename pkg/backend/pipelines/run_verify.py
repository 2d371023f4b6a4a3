from backend.pipelines.steps import (
    ppt_nonsteerable,
    determinant_reduction,
    monotonicity,
    additivity,
    invariance,
    hierarchy,
    convexity,
    bounds,
    thresholds,
    key_rate,
    oracle_eigen,
    oracle_reid,
)
from backend.app.models import RunConfig, SuiteResult
from typing import Optional
import argparse
import json
import logging

logger = logging.getLogger(__name__)

SUITES = [
    ("ppt_nonsteerable", ppt_nonsteerable.run),
    ("determinant_reduction", determinant_reduction.run),
    ("monotonicity", monotonicity.run),
    ("additivity", additivity.run),
    ("invariance", invariance.run),
    ("hierarchy", hierarchy.run),
    ("convexity", convexity.run),
    ("bounds", bounds.run),
    ("thresholds", thresholds.run),
    ("key_rate", key_rate.run),
    ("oracle_eigen", oracle_eigen.run),
    ("oracle_reid", oracle_reid.run),
]


def _run_suite(name: str, suite_func, run_config: RunConfig, progress: bool) -> SuiteResult:
    # A crashing suite is reported as failed instead of aborting the whole run
    try:
        result = suite_func(run_config, progress)
    except Exception as e:
        logger.exception("Suite failed with an error: %s", name)
        return SuiteResult(name=name, passed=False, error=f"{type(e).__name__}: {e}")
    logger.info("Completed: %s (%d checks, %d violations)", name, result.checked, result.violations)
    return result


def run_verify(run_config: RunConfig, suite_names: Optional[list[str]] = None, progress: bool = True) -> list[SuiteResult]:
    suites = dict(SUITES)
    if suite_names:
        unknown = [name for name in suite_names if name not in suites]
        if unknown:
            raise KeyError(f"Unknown suite(s): {', '.join(unknown)}")
        selected = [(name, suites[name]) for name in suite_names]
    else:
        selected = SUITES

    results = []
    for name, suite_func in selected:
        logger.info("Running suite: %s", name)
        results.append(_run_suite(name, suite_func, run_config, progress))
    return results


def summarize(results: list[SuiteResult]) -> dict:
    return {
        "passed": all(result.passed for result in results),
        "suites": [result.model_dump() for result in results],
    }


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run the steering verification suites")
    parser.add_argument("--suite", type=str, action="append", help="Run only this suite (repeatable)")
    parser.add_argument("--seed", type=int, default=0)

    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    summary = summarize(run_verify(RunConfig.build(seed=args.seed), args.suite))
    print(json.dumps(summary, indent=2))
    raise SystemExit(0 if summary["passed"] else 1)
