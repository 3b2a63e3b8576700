"""
Test runner for the axiomlab project.

Runs the suite in the usual selections (fast, integration, slow proofs,
property tests) plus the code quality checks.
"""

import importlib.util
import subprocess
import sys
from typing import List


def _run(cmd: List[str], label: str) -> int:
    try:
        result = subprocess.run(cmd, check=False)
        return result.returncode
    except Exception as e:
        print(f"Error running {label}: {e}")
        return 1


def _pytest(*args: str) -> List[str]:
    return [sys.executable, "-m", "pytest", "tests/", "-v", "--tb=short", *args]


def run_tests() -> int:
    """Run all tests with coverage when available."""
    cmd = _pytest("--durations=10")
    if importlib.util.find_spec("pytest_cov") is not None:
        cmd.extend(
            [
                "--cov=src",
                "--cov-report=term-missing",
                "--cov-report=html:htmlcov",
                "--cov-fail-under=80",
            ]
        )
        print("Running tests with coverage reporting...")
    else:
        print("Coverage not available, running tests without coverage...")
    return _run(cmd, "tests")


def run_fast_tests() -> int:
    """Run everything except the integration replays and slow searches."""
    return _run(_pytest("-m", "not integration and not slow"), "fast tests")


def run_integration_tests_only() -> int:
    """Run the proof replays and command-line round trips."""
    return _run(_pytest("-m", "integration"), "integration tests")


def run_slow_tests_only() -> int:
    """Run exhaustive sweeps and the independent searches."""
    return _run(_pytest("-m", "slow", "--durations=0"), "slow tests")


def run_property_tests_only() -> int:
    """Run the hypothesis property tests."""
    return _run(_pytest("-m", "property", "--hypothesis-show-statistics"), "property tests")


def type_check() -> int:
    """Run mypy type checking."""
    print("Running type checking...")
    code = _run([sys.executable, "-m", "mypy", "src/"], "mypy")
    print("✓ MyPy type checking passed" if code == 0 else "✗ MyPy type checking failed")
    return code


def lint_code() -> int:
    """Run ruff and the black formatting check."""
    print("Running code quality checks...")
    exit_code = 0
    for tool, cmd in (
        ("Ruff", [sys.executable, "-m", "ruff", "check", "src/", "tests/"]),
        ("Black", [sys.executable, "-m", "black", "--check", "--diff", "src/", "tests/"]),
    ):
        code = _run(cmd, tool)
        print(f"✓ {tool} passed" if code == 0 else f"✗ {tool} failed")
        exit_code = max(exit_code, code)
    return exit_code


def security_check() -> int:
    """Run bandit over the package."""
    print("Running security checks...")
    code = _run(
        [sys.executable, "-m", "bandit", "-r", "src/", "-c", "pyproject.toml", "-q"], "bandit"
    )
    print("✓ Bandit security check passed" if code == 0 else "✗ Bandit found issues")
    return code


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Run axiomlab tests")
    selection = parser.add_mutually_exclusive_group()
    selection.add_argument("--fast", action="store_true", help="Skip integration and slow tests")
    selection.add_argument(
        "--integration-only", action="store_true", help="Run only integration tests"
    )
    selection.add_argument("--slow-only", action="store_true", help="Run only slow tests")
    selection.add_argument(
        "--property-only", action="store_true", help="Run only hypothesis tests"
    )
    parser.add_argument("--lint", action="store_true", help="Run code quality checks")
    parser.add_argument("--type-check", action="store_true", help="Run type checking")
    parser.add_argument("--security", action="store_true", help="Run security checks")
    parser.add_argument("--ci", action="store_true", help="Run every check and the full suite")

    args = parser.parse_args()
    exit_code = 0

    if args.lint or args.ci:
        exit_code = max(exit_code, lint_code())
    if args.type_check or args.ci:
        exit_code = max(exit_code, type_check())
    if args.security or args.ci:
        exit_code = max(exit_code, security_check())

    if args.fast:
        exit_code = max(exit_code, run_fast_tests())
    elif args.integration_only:
        exit_code = max(exit_code, run_integration_tests_only())
    elif args.slow_only:
        exit_code = max(exit_code, run_slow_tests_only())
    elif args.property_only:
        exit_code = max(exit_code, run_property_tests_only())
    elif args.ci or not (args.lint or args.type_check or args.security):
        exit_code = max(exit_code, run_tests())

    if exit_code == 0:
        print("\n✓ All checks passed!")
    else:
        print(f"\n✗ Some checks failed (exit code: {exit_code})")

    sys.exit(exit_code)
