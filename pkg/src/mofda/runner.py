"""Multiobjective runs: one scalarized solve per weight vector, spread over workers.

Each weight vector becomes an independent :class:`~mofda.protocol.Task`.
Tasks are handed to a set of executors, local worker processes and/or
remote workers reached over TCP, and the results are put back in
``task_id`` order. A solve depends only on its task, so the archive is the
same whatever the number of workers, the transport or the completion order.
"""

from __future__ import annotations

import logging
import multiprocessing
import socket
import threading
import time
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import protocol
from .benchmarks import BenchmarkProblem, get_problem
from .exceptions import ProtocolError, RunnerError
from .protocol import Task, TaskResult
from .scalarization import ReferencePoint, WeightVector, generate_weights, scalarize_problem, tchebycheff
from .solver import SolverConfig, fda_solve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParetoArchive:
    """All ``n`` results of a run, ordered by ``task_id``.

    Points are never dropped; ``dominated_flags[i]`` marks result ``i`` as
    Pareto-dominated by another result of the same run.
    """

    problem_name: str
    weights: tuple[WeightVector, ...]
    results: tuple[TaskResult, ...]
    dominated_flags: tuple[bool, ...]

    def __len__(self):
        return len(self.results)

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objectives for r in self.results])

    @property
    def points(self) -> np.ndarray:
        return np.array([r.best_point for r in self.results])

    def nondominated_objectives(self) -> np.ndarray:
        keep = [not f for f in self.dominated_flags]
        return self.objectives[keep]


def dominates(a, b) -> bool:
    """``a`` dominates ``b`` under minimisation."""
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def dominated_mask(objectives) -> list[bool]:
    objs = [tuple(o) for o in objectives]
    return [any(dominates(other, o) for other in objs) for o in objs]


def nondominated_filter(archive: ParetoArchive) -> ParetoArchive:
    """Flag dominated results; identical objective vectors do not dominate each other."""
    flags = tuple(dominated_mask(r.objectives for r in archive.results))
    return ParetoArchive(archive.problem_name, archive.weights, archive.results, flags)


def execute_task(task: Task) -> TaskResult:
    """Solve one scalarized subproblem. Pure apart from the wall-clock field."""
    problem = get_problem(task.problem_name)
    objective = scalarize_problem(problem, task.weight, task.z)
    start = time.perf_counter()
    res = fda_solve(objective, problem.bounds, task.solver_cfg)
    wall = time.perf_counter() - start
    objectives = problem.evaluate(res.best_point)
    return TaskResult(
        task_id=task.task_id,
        best_point=tuple(float(v) for v in res.best_point),
        objectives=tuple(float(v) for v in objectives),
        scalar_value=tchebycheff(objectives, task.weight, task.z),
        evals_used=res.evals_used,
        wall_time=wall,
        trace=None if res.trace is None else tuple(res.trace),
    )


# --- executors -------------------------------------------------------------


class _ProcessPool:
    """A process pool that is rebuilt after a worker process dies."""

    def __init__(self, size):
        self.size = size
        self._lock = threading.Lock()
        self._pool = None
        self._generation = 0

    def get(self):
        with self._lock:
            if self._pool is None:
                ctx = multiprocessing.get_context("spawn")
                self._pool = ProcessPoolExecutor(self.size, mp_context=ctx)
                self._generation += 1
            return self._pool, self._generation

    def reset(self, generation):
        with self._lock:
            if self._pool is not None and generation == self._generation:
                self._pool.shutdown(wait=False, cancel_futures=True)
                self._pool = None

    def shutdown(self):
        with self._lock:
            if self._pool is not None:
                self._pool.shutdown(wait=True, cancel_futures=True)
                self._pool = None


class LocalExecutor:
    """One slot of a shared local process pool."""

    healthy = True

    def __init__(self, pool: _ProcessPool, timeout: float | None = None):
        self.pool = pool
        self.timeout = timeout

    def run(self, task: Task) -> TaskResult:
        pool, generation = self.pool.get()
        try:
            return pool.submit(execute_task, task).result(timeout=self.timeout)
        except BrokenProcessPool:
            self.pool.reset(generation)
            raise

    def close(self):
        pass

    def __repr__(self):
        return "LocalExecutor()"


class RemoteExecutor:
    """Sends tasks to one ``worker`` endpoint over a persistent connection.

    A transport failure marks the executor unhealthy and it takes no more
    tasks; an error reply from a live worker does not.
    """

    def __init__(self, address: str, timeout: float | None = None):
        self.address = address
        self.host, self.port = parse_address(address)
        self.timeout = timeout
        self.healthy = True
        self._sock = None
        self._file = None

    def _connect(self):
        self._sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
        self._file = self._sock.makefile("rb")

    def run(self, task: Task) -> TaskResult:
        try:
            if self._sock is None:
                self._connect()
            self._sock.sendall(protocol.encode(task.to_record()))
            line = self._file.readline()
            if not line:
                raise ConnectionError(f"worker {self.address} closed the connection")
        except OSError:
            self.healthy = False
            self.close()
            raise
        rec = protocol.decode(line)
        if "error" in rec:
            raise ProtocolError(f"worker {self.address}: {rec['error']}", rec.get("task_id"))
        result = TaskResult.from_record(rec)
        if result.task_id != task.task_id:
            self.healthy = False
            self.close()
            raise ProtocolError(f"worker {self.address} answered task {result.task_id}, expected {task.task_id}")
        return result

    def close(self):
        for obj in (self._file, self._sock):
            if obj is not None:
                try:
                    obj.close()
                except OSError:
                    pass
        self._sock = self._file = None

    def __repr__(self):
        return f"RemoteExecutor({self.address!r})"


def parse_address(address: str) -> tuple[str, int]:
    host, sep, port = str(address).rpartition(":")
    if not sep:
        raise ValueError(f"address must look like host:port, got {address!r}")
    return host or "127.0.0.1", int(port)


def dispatch(tasks: Sequence[Task], executors: Sequence, retries: int = 1) -> list[TaskResult]:
    """Run ``tasks`` on ``executors`` and return the results in ``task_id`` order.

    A failed task goes back on the queue for at most ``retries`` more
    attempts; after that the whole run fails with :class:`RunnerError`
    naming the task. Executors reporting ``healthy = False`` after a failure
    are retired.
    """
    if not executors:
        raise ValueError("no executors to run tasks on")
    pending = deque(tasks)
    failures = Counter()
    results: dict[int, TaskResult] = {}
    cond = threading.Condition()
    state = {"in_flight": 0, "live": len(executors), "error": None}

    def fail(task_id, message):
        if state["error"] is None:
            state["error"] = RunnerError(message, task_id)

    def slot(executor):
        while True:
            with cond:
                while not pending and state["in_flight"] and state["error"] is None:
                    cond.wait()
                if state["error"] is not None or not pending:
                    return
                task = pending.popleft()
                state["in_flight"] += 1
            try:
                result, exc = executor.run(task), None
            except Exception as err:  # noqa: BLE001 - every failure is retried alike
                result, exc = None, err
            with cond:
                state["in_flight"] -= 1
                if exc is None:
                    results[task.task_id] = result
                else:
                    failures[task.task_id] += 1
                    log.warning("task %d failed on %r: %r", task.task_id, executor, exc)
                    if failures[task.task_id] > retries:
                        fail(task.task_id, f"task {task.task_id} failed after {retries} retry: {exc!r}")
                    else:
                        pending.appendleft(task)
                    if not getattr(executor, "healthy", True):
                        state["live"] -= 1
                        if state["live"] == 0 and (pending or state["in_flight"]):
                            stuck = pending[0].task_id if pending else None
                            fail(stuck, "all workers failed")
                        cond.notify_all()
                        return
                cond.notify_all()

    threads = [threading.Thread(target=slot, args=(ex,), daemon=True) for ex in executors]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if state["error"] is not None:
        raise state["error"]
    missing = [t.task_id for t in tasks if t.task_id not in results]
    if missing:
        raise RunnerError(f"tasks without results: {missing}", missing[0])
    return [results[t.task_id] for t in sorted(tasks, key=lambda t: t.task_id)]


def make_tasks(problem_name: str, n: int, solver_cfg: SolverConfig, z: ReferencePoint) -> list[Task]:
    problem = get_problem(problem_name)
    return [
        Task(w.index, problem.name, w, z, solver_cfg)
        for w in generate_weights(problem.n_obj, n)
    ]


def run_mo_fda(
    problem: str | BenchmarkProblem,
    n: int = 100,
    solver_cfg: SolverConfig = SolverConfig(),
    workers: int = 1,
    endpoints: Sequence[str] = (),
    z: ReferencePoint | None = None,
    retries: int = 1,
    timeout: float | None = None,
) -> ParetoArchive:
    """Solve ``n`` Tchebycheff subproblems and collect them into an archive.

    ``workers`` local processes plus one slot per remote ``endpoints`` entry
    share the tasks. ``z`` defaults to the problem's ideal point.
    """
    if isinstance(problem, BenchmarkProblem):
        if problem.n_var != get_problem(problem.name).n_var:
            raise ValueError("tasks name problems by registry name; non-default dimensions cannot be dispatched")
        problem = problem.name
    prob = get_problem(problem)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if workers < 0 or (workers == 0 and not endpoints):
        raise ValueError("need at least one local worker or remote endpoint")
    solver_cfg.check_dimension(prob.n_var)
    if z is None:
        z = ReferencePoint(prob.ideal_point)
    tasks = make_tasks(prob.name, n, solver_cfg, z)

    pool = _ProcessPool(workers) if workers else None
    executors = [LocalExecutor(pool, timeout) for _ in range(workers)]
    executors += [RemoteExecutor(addr, timeout) for addr in endpoints]
    try:
        results = dispatch(tasks, executors, retries)
    finally:
        for ex in executors:
            ex.close()
        if pool is not None:
            pool.shutdown()
    archive = ParetoArchive(
        prob.name, tuple(t.weight for t in tasks), tuple(results), (False,) * len(results)
    )
    return nondominated_filter(archive)
