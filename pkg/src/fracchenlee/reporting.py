"""Stability report rows, run-config files and CSV serialisation."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, TextIO, Tuple

import numpy as np

from .errors import ConfigError, DomainError, ParameterError
from .frackernel import as_order
from .integrator import IntegratorConfig, Trajectory, convergence_report
from .stability import (
    StabilityVerdict,
    classify_e0,
    classify_e2m,
    controlled_jacobian_at,
    discriminant,
    eigenvalues3,
    matignon_classify,
)
from .systems import State, SystemKind, SystemSpec

TRAJECTORY_HEADER = ("j", "t", "x1", "x2", "x3", "dist")
REPORT_HEADER = (
    "a", "c", "k", "m", "q", "delta", "q2",
    "re1", "im1", "re2", "im2", "re3", "im3",
    "verdict", "clause", "agree",
)
INVALID = "Invalid"


def fmt(value) -> str:
    """Shortest text for ``None``/str; 17 significant digits for numbers."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    return "%.17g" % value


# ---------------------------------------------------------------------------
# stability rows


@dataclass(frozen=True)
class StabilityReportRow:
    a: float
    c: float
    k: float
    m: float
    q: float
    delta: Optional[float]
    q2: Optional[float]
    eigenvalues: Tuple[complex, ...]
    verdict: str
    clause: str
    agree: Optional[bool]
    theorem_verdict: Optional[str] = None

    @property
    def valid(self) -> bool:
        return self.verdict != INVALID

    def as_record(self) -> Dict[str, object]:
        rec = {"a": self.a, "c": self.c, "k": self.k, "m": self.m, "q": self.q,
               "delta": self.delta, "q2": self.q2}
        for i in range(3):
            z = self.eigenvalues[i] if i < len(self.eigenvalues) else None
            rec[f"re{i + 1}"] = None if z is None else z.real
            rec[f"im{i + 1}"] = None if z is None else z.imag
        rec.update(verdict=self.verdict, clause=self.clause, agree=self.agree)
        return rec

    def csv_cells(self) -> List[str]:
        return [fmt(v) for v in self.as_record().values()]


def analyze_point(a: float, c: float, k: float, m: float, q: float) -> StabilityReportRow:
    """Classify ``(0, m, 0)`` of the controlled system both ways.

    The verdict column is the eigenvalue-argument verdict; ``agree`` records
    whether the parameter case table says the same. ``m = 0`` is the origin.
    Raises :class:`ParameterError`/:class:`DomainError` for invalid input.
    """
    q = as_order(q)
    if a * c == 0.0:
        raise ParameterError(f"need a*c != 0, got a={a!r}, c={c!r}")
    if k == 0.0:
        raise ParameterError("control gain k must be nonzero")
    rep = discriminant(a, c, m)
    eigs = eigenvalues3(controlled_jacobian_at(a, c, k, m))
    direct = matignon_classify(eigs, q)
    theorem: StabilityVerdict = classify_e0(a, c, k, q) if m == 0.0 else classify_e2m(a, c, k, m, q)
    return StabilityReportRow(
        a=a, c=c, k=k, m=m, q=q,
        delta=rep.delta,
        q2=rep.q2 if m != 0.0 else None,
        eigenvalues=tuple(eigs),
        verdict=direct.kind.value,
        clause=theorem.clause,
        agree=direct.kind is theorem.kind,
        theorem_verdict=theorem.kind.value,
    )


def invalid_row(a, c, k, m, q, reason: str) -> StabilityReportRow:
    delta = (a + c) ** 2 - 4.0 * m * m / 3.0
    return StabilityReportRow(a, c, k, m, q, delta, None, (), INVALID, reason, None)


def sweep_point(args) -> StabilityReportRow:
    a, c, k, m, q = args
    try:
        return analyze_point(a, c, k, m, q)
    except (ParameterError, DomainError) as exc:
        return invalid_row(a, c, k, m, q, str(exc).split(",")[0])


def write_report(rows: Iterable[StabilityReportRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for row in rows:
        writer.writerow(row.csv_cells())


# ---------------------------------------------------------------------------
# trajectories


def write_trajectory(traj: Trajectory, x_e, stream: TextIO) -> None:
    dist = convergence_report(traj, x_e).distances
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    for i, (j, t, x) in enumerate(traj):
        writer.writerow([str(j), fmt(t), fmt(x.x1), fmt(x.x2), fmt(x.x3), fmt(float(dist[i]))])


def read_trajectory(stream: TextIO) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Parse a trajectory CSV into ``(j, t, x, dist)`` arrays."""
    reader = csv.reader(stream)
    header = next(reader)
    if tuple(header) != TRAJECTORY_HEADER:
        raise ValueError(f"unexpected trajectory header {header!r}")
    rows = np.array([[float(v) for v in r] for r in reader if r], dtype=np.float64).reshape(-1, 6)
    return rows[:, 0].astype(int), rows[:, 1], rows[:, 2:5], rows[:, 5]


# ---------------------------------------------------------------------------
# run configuration files

CONFIG_DEFAULTS: Dict[str, object] = {
    "q": 0.9,
    "h": 0.01,
    "N": 500,
    "rho": 0.01,
    "epsilon": 0.01,
    "t": 502.0,
    "t0": 0.0,
    "kernel_mode": "paper-literal",
    "control_mode": "eq15-offset",
    "system": "controlled",
    "a": -2.0,
    "b": 0.0,
    "c": 1.0,
    "k": -0.8,
    "x_e": "0, 1, 0",
}
_FLOAT_KEYS = {"q", "h", "rho", "epsilon", "t", "t0", "a", "b", "c", "k"}


@dataclass(frozen=True)
class RunConfig:
    integrator: IntegratorConfig
    system: SystemSpec
    x_e: State


def parse_config_text(text: str) -> Dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; blank lines ignored."""
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in CONFIG_DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def build_run_config(values: Dict[str, object]) -> RunConfig:
    unknown = set(values) - set(CONFIG_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    merged = {**CONFIG_DEFAULTS, **values}
    try:
        num = {key: float(merged[key]) for key in _FLOAT_KEYS}
        n_steps = float(merged["N"])
        x_e = merged["x_e"]
        if isinstance(x_e, str):
            x_e = [float(v) for v in x_e.replace(",", " ").split()]
        x_e = State(*map(float, x_e))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numeric value: {exc}") from exc
    if not n_steps.is_integer():
        raise ConfigError(f"N must be an integer, got {merged['N']!r}")
    cfg = IntegratorConfig(
        q=num["q"], h=num["h"], N=int(n_steps), rho=num["rho"], epsilon=num["epsilon"],
        t_kernel=num["t"], t0=num["t0"],
        kernel_mode=merged["kernel_mode"], control_mode=merged["control_mode"],
    )
    try:
        kind = SystemKind(str(merged["system"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        if kind is SystemKind.CONTROLLED:
            system = SystemSpec.controlled(num["a"], num["c"], num["k"], anchor=x_e)
        elif kind is SystemKind.SPECIAL:
            system = SystemSpec.special(num["a"], num["c"])
        else:
            system = SystemSpec.full(num["a"], num["b"], num["c"])
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(cfg, system, x_e)


def load_run_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return build_run_config(parse_config_text(fh.read()))


def dump_run_config(values: Dict[str, object]) -> str:
    buf = io.StringIO()
    for key, value in {**CONFIG_DEFAULTS, **values}.items():
        buf.write(f"{key} = {value}\n")
    return buf.getvalue()
