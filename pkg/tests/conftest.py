from hypothesis import HealthCheck, settings

settings.register_profile(
    "exact",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, from the actual test outcomes."""
    rows = []
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", "call") != "call" and key != "error":
                continue
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" in props:
                rows.append((props["criterion"], "PASS" if rep.passed else "FAIL", props.get("claim", "")))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n, status, claim in sorted(rows):
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {claim}")
