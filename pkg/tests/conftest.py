"""Per-criterion result lines for the acceptance module."""


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    num, _, rest = name.removeprefix("test_criterion_").partition("_")
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE criterion {num} ({rest.replace('_', ' ')}): {verdict}")
