"""Shared state for the acceptance suite: result lines and every bound pair it produced."""

LINES: list[str] = []
FITS: list[tuple[str, float | None, float]] = []


def report(number: int, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    LINES.append(line)
    print(line)
    return ok
