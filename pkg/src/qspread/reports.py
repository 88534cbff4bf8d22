"""Structured outcomes of verification runs."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction

EXACT_ZERO = "exact-zero"


@dataclass
class CheckReport:
    """Outcome of one named check.

    ``max_residual`` is a float, or the string "exact-zero" when the check
    ran on the exact backend and every residual vanished identically.  A
    witness (the offending input, as a plain list) is present exactly when
    the check failed.
    """

    check_name: str
    params: dict
    status: str  # "pass" | "fail" | "error"
    max_residual: float | str | None  # None only on status="error"
    witness: list | None = None
    seed: int | None = None
    runtime_ms: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "params": self.params,
            "status": self.status,
            "max_residual": self.max_residual,
            "witness": self.witness,
            "seed": self.seed,
            "runtime_ms": self.runtime_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


class ResidualTracker:
    """Collects (witness, residual) pairs and turns them into a CheckReport."""

    def __init__(self, check_name: str, tolerance, params: dict | None = None,
                 seed: int | None = None):
        self.check_name = check_name
        self.tolerance = tolerance
        self.params = dict(params or {})
        self.seed = seed
        self.worst = None
        self.worst_witness = None
        self.all_exact = True
        self._start = time.perf_counter()

    def add(self, witness, residual) -> None:
        if not isinstance(residual, (int, Fraction)):
            self.all_exact = False
        if self.worst is None or residual > self.worst:
            self.worst = residual
            self.worst_witness = witness

    def max_residual(self):
        return self.worst if self.worst is not None else 0

    def report(self, extra_params: dict | None = None) -> CheckReport:
        runtime_ms = int((time.perf_counter() - self._start) * 1000)
        worst = self.max_residual()
        ok = worst <= self.tolerance
        if ok and self.all_exact and worst == 0:
            residual_out: float | str = EXACT_ZERO
        else:
            residual_out = float(worst)
        params = dict(self.params)
        params["tolerance"] = float(self.tolerance)
        if extra_params:
            params.update(extra_params)
        return CheckReport(
            check_name=self.check_name,
            params=params,
            status="pass" if ok else "fail",
            max_residual=residual_out,
            witness=None if ok else _as_jsonable(self.worst_witness),
            seed=self.seed,
            runtime_ms=runtime_ms,
        )


def _as_jsonable(witness):
    if witness is None:
        return None
    if isinstance(witness, (list, tuple)):
        return [_as_jsonable(w) for w in witness]
    if isinstance(witness, Fraction):
        return str(witness)
    if isinstance(witness, (int, float, str, bool)):
        return witness
    return repr(witness)


def error_report(check_name: str, params: dict, message: str,
                 seed: int | None = None) -> CheckReport:
    return CheckReport(
        check_name=check_name,
        params={**params, "error": message},
        status="error",
        max_residual=None,
        witness=None,
        seed=seed,
    )
