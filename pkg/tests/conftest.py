def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import SUMMARY
    except ImportError:
        return
    if SUMMARY:
        terminalreporter.section("acceptance criteria")
        for k in sorted(SUMMARY):
            terminalreporter.write_line(SUMMARY[k])
