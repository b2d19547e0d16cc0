"""Collects one pass/fail line per acceptance criterion for the terminal summary."""
import re

RESULTS = {}


def record(key: str, ok: bool, detail: str) -> bool:
    RESULTS[key] = (ok, detail)
    print(line(key))
    return ok


def line(key: str) -> str:
    ok, detail = RESULTS[key]
    return f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}"


def lines() -> list:
    def order(k):
        m = re.match(r"\d+", k)
        return (int(m.group()) if m else 99, k)
    return [line(k) for k in sorted(RESULTS, key=order)]
