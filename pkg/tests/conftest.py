import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=100)
settings.register_profile("thorough", deadline=None, max_examples=1000)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    import sys

    lines = {}
    for mod in list(sys.modules.values()):
        lines.update(getattr(mod, "ACCEPTANCE_LINES", None) or {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
