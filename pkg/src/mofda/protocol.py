"""Task/result records and their newline-delimited JSON wire format.

Every record is one JSON object on one line, tagged ``"v": 1``. Floats are
written with ``repr`` precision so a record survives the round trip
bit-for-bit, which keeps remote results identical to local ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exceptions import ProtocolError
from .scalarization import ReferencePoint, WeightVector
from .solver import SolverConfig

VERSION = 1


@dataclass(frozen=True)
class Task:
    task_id: int
    problem_name: str
    weight: WeightVector
    z: ReferencePoint
    solver_cfg: SolverConfig

    def to_record(self) -> dict:
        return {
            "v": VERSION,
            "task_id": self.task_id,
            "problem_name": self.problem_name,
            "weight": {"components": list(self.weight.components), "index": self.weight.index},
            "z": {"z_star": list(self.z.z_star), "utopian_shift": self.z.utopian_shift},
            "solver_cfg": self.solver_cfg.to_dict(),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Task":
        task_id = rec.get("task_id") if isinstance(rec, dict) else None
        try:
            _check_version(rec)
            task = cls(
                task_id=_as_int(rec["task_id"]),
                problem_name=str(rec["problem_name"]),
                weight=WeightVector(tuple(rec["weight"]["components"]), _as_int(rec["weight"]["index"])),
                z=ReferencePoint(tuple(rec["z"]["z_star"]), float(rec["z"].get("utopian_shift", 0.0))),
                solver_cfg=SolverConfig.from_dict(rec["solver_cfg"]),
            )
        except ProtocolError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ProtocolError(f"invalid task record: {exc!r}", _as_int_or_none(task_id)) from None
        if task.task_id != task.weight.index:
            raise ProtocolError("task_id must equal weight.index", task.task_id)
        return task


@dataclass(frozen=True)
class TaskResult:
    task_id: int
    best_point: tuple[float, ...]
    objectives: tuple[float, ...]
    scalar_value: float
    evals_used: int
    wall_time: float = field(default=0.0, compare=False)
    trace: tuple[tuple[int, float], ...] | None = field(default=None, compare=False)

    def to_record(self) -> dict:
        rec = {
            "v": VERSION,
            "task_id": self.task_id,
            "best_point": list(self.best_point),
            "objectives": list(self.objectives),
            "scalar_value": self.scalar_value,
            "evals_used": self.evals_used,
            "wall_time": self.wall_time,
        }
        if self.trace is not None:
            rec["trace"] = [list(t) for t in self.trace]
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "TaskResult":
        try:
            _check_version(rec)
            trace = rec.get("trace")
            return cls(
                task_id=_as_int(rec["task_id"]),
                best_point=tuple(float(v) for v in rec["best_point"]),
                objectives=tuple(float(v) for v in rec["objectives"]),
                scalar_value=float(rec["scalar_value"]),
                evals_used=_as_int(rec["evals_used"]),
                wall_time=float(rec["wall_time"]),
                trace=None if trace is None else tuple((int(i), float(v)) for i, v in trace),
            )
        except ProtocolError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"invalid result record: {exc!r}") from None


def error_record(message: str, task_id=None) -> dict:
    return {"v": VERSION, "task_id": task_id, "error": message}


def _check_version(rec):
    if not isinstance(rec, dict):
        raise ProtocolError("record must be a JSON object")
    if rec.get("v") != VERSION:
        raise ProtocolError(f"unsupported record version {rec.get('v')!r}", _as_int_or_none(rec.get("task_id")))


def _as_int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(f"expected an integer, got {v!r}")
    return v


def _as_int_or_none(v):
    return v if isinstance(v, int) and not isinstance(v, bool) else None


def encode(rec: dict) -> bytes:
    return (json.dumps(rec, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")


def decode(line: bytes | str) -> dict:
    try:
        rec = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProtocolError(f"malformed record: {exc}") from None
    if not isinstance(rec, dict):
        raise ProtocolError("record must be a JSON object")
    return rec
