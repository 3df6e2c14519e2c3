#!/usr/bin/env python3
"""
Installation check: Python version, dependencies, configuration and a
small end-to-end fit.
"""

import subprocess
import sys
from pathlib import Path


def check_system():
    """Check system requirements."""
    print("="*70)
    print("SYSTEM REQUIREMENTS CHECK")
    print("="*70)

    version_info = sys.version_info
    version = f"{version_info.major}.{version_info.minor}.{version_info.micro}"
    python_ok = version_info.major == 3 and version_info.minor >= 11
    status = "✅" if python_ok else "❌"
    print(f"{status} {'Python 3.11+':20s}: {version}")
    return python_ok


def check_dependencies():
    """Check Python dependencies."""
    print("\n" + "="*70)
    print("PYTHON DEPENDENCIES CHECK")
    print("="*70)

    required = ["numpy", "scipy", "pandas", "pydantic", "psutil"]

    checks = []
    for package in required:
        try:
            result = subprocess.run(
                [sys.executable, "-m", "pip", "show", package],
                capture_output=True,
                text=True,
                timeout=10
            )
            installed = "Not installed"
            if result.returncode == 0:
                for line in result.stdout.split("\n"):
                    if line.startswith("Version:"):
                        installed = line.split(":")[1].strip()
            checks.append((package, installed, result.returncode == 0))
        except (OSError, subprocess.SubprocessError):
            checks.append((package, "Error checking", False))

    for name, version, ok in checks:
        status = "✅" if ok else "❌"
        print(f"{status} {name:20s}: {version}")

    return all(ok for _, _, ok in checks)


def check_configuration():
    """Check that the configuration loads and validates."""
    print("\n" + "="*70)
    print("CONFIGURATION CHECK")
    print("="*70)

    sys.path.insert(0, str(Path(__file__).parent))
    from mnnts import CONFIG_FILE, load_settings

    settings = load_settings()
    print(f"✅ {'Config file':20s}: {CONFIG_FILE} ({'present' if CONFIG_FILE.exists() else 'defaults'})")
    print(f"✅ {'Default unit':20s}: {settings.default_unit}")
    print(f"✅ {'Workers':20s}: {settings.workers}")
    return True


def check_fit():
    """Fit a small synthetic dataset and evaluate its marginals."""
    print("\n" + "="*70)
    print("END-TO-END CHECK")
    print("="*70)

    from mnnts import fit_md, marginal, synthetic_wind_dataset

    data = synthetic_wind_dataset(n_obs=200, seed=0)
    report = fit_md(data, (1,) * data.n_vars)
    total = sum(marginal(report.params, [i]).probs.sum() for i in range(1, data.n_vars + 1))
    ok = abs(total - data.n_vars) < 1e-8
    status = "✅" if ok else "❌"
    print(f"{status} {'MD fit':20s}: loglik {report.loglik:.3f}")
    print(f"{status} {'Marginal mixtures':20s}: probabilities sum to one")
    return ok


def main():
    """Run all checks."""
    print("""
╔═══════════════════════════════════════════════════════════════╗
║   MNNTS - INSTALLATION VALIDATION                             ║
╚═══════════════════════════════════════════════════════════════╝
    """)

    checks = [
        ("System Requirements", check_system),
        ("Python Dependencies", check_dependencies),
        ("Configuration", check_configuration),
        ("End-to-End Fit", check_fit),
    ]

    results = {}
    for name, check_func in checks:
        try:
            results[name] = check_func()
        except Exception as e:
            print(f"\n❌ {name} check failed: {e}")
            results[name] = False

    # Summary
    print("\n" + "="*70)
    print("VALIDATION SUMMARY")
    print("="*70)

    all_passed = True
    for name, passed in results.items():
        status = "✅ PASSED" if passed else "❌ FAILED"
        print(f"{status:12s} {name}")
        if not passed:
            all_passed = False

    print("="*70)

    if all_passed:
        print("\n✅ ALL CHECKS PASSED")
        print("\nNext steps:")
        print("  1. python3 -m mnnts synth --out data/wind.csv")
        print("  2. python3 -m mnnts fit --input data/wind.csv --unit degrees --m 3,3,3,3,3,3,3 --output data/wind.json")
        return 0
    else:
        print("\n❌ SOME CHECKS FAILED - Please fix issues above")
        print("\nCommon fixes:")
        print("  • Install deps: pip install -r requirements.txt")
        print("  • Reset config: rm ~/.mnnts-config/config.json")
        return 1


if __name__ == "__main__":
    sys.exit(main())
