import time

SESSION_START = time.monotonic()


def session_elapsed() -> float:
    return time.monotonic() - SESSION_START


def pytest_collection_modifyitems(items):
    # run the acceptance module last so its wall-clock budget covers the
    # whole session and unit failures surface first
    acceptance = [i for i in items if "test_acceptance" in i.nodeid]
    rest = [i for i in items if "test_acceptance" not in i.nodeid]
    items[:] = rest + acceptance


def pytest_terminal_summary(terminalreporter):
    terminalreporter.write_line(
        f"total suite wall time: {session_elapsed():.1f}s")
