import socket
import threading

import numpy as np
import pytest

from mofda import protocol
from mofda.benchmarks import get_problem
from mofda.exceptions import ProtocolError, RunnerError
from mofda.protocol import Task, TaskResult
from mofda.runner import (
    ParetoArchive,
    dispatch,
    dominated_mask,
    execute_task,
    make_tasks,
    nondominated_filter,
    parse_address,
    run_mo_fda,
)
from mofda.scalarization import ReferencePoint, WeightVector, tchebycheff
from mofda.solver import SolverConfig
from mofda.worker import handle_line, make_worker_server

SMALL = SolverConfig(eval_budget=2_000)
Z2 = ReferencePoint((0.0, 0.0))


def zdt1_task(i=0, n=5, cfg=SMALL):
    return make_tasks("zdt1", n, cfg, Z2)[i]


def fake_result(task_id, objectives):
    return TaskResult(task_id, (0.0,), tuple(objectives), 0.0, 1)


def archive_of(objs):
    results = tuple(fake_result(i, o) for i, o in enumerate(objs))
    ws = tuple(WeightVector((1.0, 0.0), i) for i in range(len(objs)))
    return ParetoArchive("zdt1", ws, results, (False,) * len(objs))


@pytest.mark.parametrize("objs, flags", [
    ([(0, 1), (1, 0)], (False, False)),
    ([(0, 0), (1, 1)], (False, True)),
    ([(0, 1), (0, 1)], (False, False)),
    ([(0, 1), (0, 2), (1, 0), (2, 2)], (False, True, False, True)),
])
def test_nondominated_filter(objs, flags):
    out = nondominated_filter(archive_of(objs))
    assert out.dominated_flags == flags
    assert len(out) == len(objs)


def test_protocol_round_trip():
    task = Task(3, "zdt1", WeightVector((0.1, 0.9), 3), ReferencePoint((0.0, 0.0), 0.01), SMALL)
    line = protocol.encode(task.to_record())
    assert line.endswith(b"\n") and line.count(b"\n") == 1
    assert Task.from_record(protocol.decode(line)) == task
    res = TaskResult(3, (0.1 + 0.2, 1 / 3), (1e-300, 2.0), 0.30000000000000004, 77, 0.5, ((1, 2.0), (5, 1.5)))
    back = TaskResult.from_record(protocol.decode(protocol.encode(res.to_record())))
    assert back == res and back.best_point == res.best_point and back.trace == res.trace


def test_record_field_names():
    rec = zdt1_task().to_record()
    assert set(rec) == {"v", "task_id", "problem_name", "weight", "z", "solver_cfg"}
    assert rec["v"] == 1
    res = fake_result(0, (1.0, 2.0)).to_record()
    assert set(res) == {"v", "task_id", "best_point", "objectives", "scalar_value", "evals_used", "wall_time"}


@pytest.mark.parametrize("mutate", [
    lambda r: r.update(v=2),
    lambda r: r.pop("problem_name"),
    lambda r: r.update(task_id=1),
    lambda r: r["solver_cfg"].update(bogus=1),
    lambda r: r["weight"].update(components=[0.5, 0.6]),
])
def test_bad_task_records(mutate):
    rec = zdt1_task().to_record()
    mutate(rec)
    with pytest.raises(ProtocolError):
        Task.from_record(rec)


def test_decode_rejects_garbage():
    with pytest.raises(ProtocolError):
        protocol.decode(b"{not json")
    with pytest.raises(ProtocolError):
        protocol.decode(b"[1, 2]")


def test_parse_address():
    assert parse_address("127.0.0.1:9000") == ("127.0.0.1", 9000)
    assert parse_address(":81") == ("127.0.0.1", 81)
    with pytest.raises(ValueError):
        parse_address("localhost")


def test_execute_task_invariants():
    task = zdt1_task(2)
    res = execute_task(task)
    problem = get_problem("zdt1")
    assert res.task_id == 2
    assert res.evals_used <= SMALL.eval_budget
    np.testing.assert_array_equal(problem.evaluate(res.best_point), res.objectives)
    assert abs(res.scalar_value - tchebycheff(res.objectives, task.weight, task.z)) <= 1e-12
    assert problem.bounds.contains(res.best_point)


def test_first_objective_weight_drives_f1_to_zero():
    task = make_tasks("zdt1", 2, SMALL, Z2)[1]
    assert task.weight.components == (1.0, 0.0)
    assert execute_task(task).objectives[0] <= 1e-9


def test_handle_line_malformed_reply():
    reply = handle_line(b"this is not a record\n")
    assert "error" in reply and reply["task_id"] is None
    rec = zdt1_task(1).to_record()
    rec["problem_name"] = "zdt99"
    reply = handle_line(protocol.encode(rec))
    assert reply["task_id"] == 1 and "zdt99" in reply["error"]


@pytest.fixture
def worker():
    server = make_worker_server("127.0.0.1:0")
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()
    server.server_close()


def test_worker_over_tcp(worker):
    host, port = parse_address(worker.address)
    t0, t1 = zdt1_task(0), zdt1_task(4)
    with socket.create_connection((host, port), timeout=30) as sock:
        f = sock.makefile("rb")
        sock.sendall(b"garbage\n")
        err = protocol.decode(f.readline())
        assert "error" in err
        # still alive; two sequential tasks give the same answers as in-process runs
        for task in (t0, t1, t0):
            sock.sendall(protocol.encode(task.to_record()))
            res = TaskResult.from_record(protocol.decode(f.readline()))
            assert res == execute_task(task)


class Flaky:
    healthy = True

    def __init__(self, fail_ids, times=1):
        self.left = {i: times for i in fail_ids}
        self.calls = []

    def run(self, task):
        self.calls.append(task.task_id)
        if self.left.get(task.task_id, 0) > 0:
            self.left[task.task_id] -= 1
            raise ConnectionError("simulated crash")
        return fake_result(task.task_id, (task.task_id, 0))

    def close(self):
        pass


def test_dispatch_orders_and_retries_once():
    tasks = make_tasks("zdt1", 6, SMALL, Z2)
    ex = Flaky({2, 4})
    results = dispatch(list(reversed(tasks)), [ex])
    assert [r.task_id for r in results] == list(range(6))
    assert ex.calls.count(2) == 2 and ex.calls.count(4) == 2


def test_dispatch_fails_with_task_id_after_retry():
    tasks = make_tasks("zdt1", 4, SMALL, Z2)
    with pytest.raises(RunnerError) as info:
        dispatch(tasks, [Flaky({3}, times=2)])
    assert info.value.task_id == 3


class Dead(Flaky):
    def run(self, task):
        self.healthy = False
        raise ConnectionError("down")


def test_unhealthy_executor_retired():
    tasks = make_tasks("zdt1", 5, SMALL, Z2)
    good = Flaky(set())
    results = dispatch(tasks, [Dead(set()), good])
    assert len(results) == 5


def test_all_executors_dead():
    with pytest.raises(RunnerError):
        dispatch(make_tasks("zdt1", 3, SMALL, Z2), [Dead(set())])


def test_run_shape_and_ids():
    arc = run_mo_fda("zdt1", n=5, solver_cfg=SMALL, workers=1)
    assert [r.task_id for r in arc.results] == [0, 1, 2, 3, 4]
    assert len(arc.dominated_flags) == 5
    assert arc.dominated_flags == tuple(dominated_mask(arc.objectives))
    assert [w.index for w in arc.weights] == [0, 1, 2, 3, 4]


def test_identical_across_worker_counts_and_transport(worker):
    cfg = SolverConfig(eval_budget=1_000)
    one = run_mo_fda("zdt2", n=5, solver_cfg=cfg, workers=1)
    two = run_mo_fda("zdt2", n=5, solver_cfg=cfg, workers=2)
    mixed = run_mo_fda("zdt2", n=5, solver_cfg=cfg, workers=1, endpoints=[worker.address])
    remote = run_mo_fda("zdt2", n=5, solver_cfg=cfg, workers=0, endpoints=[worker.address])
    assert one == two == mixed == remote


def test_unreachable_endpoint_falls_back_to_local():
    # nothing listens on a freshly closed port
    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    arc = run_mo_fda("zdt1", n=3, solver_cfg=SMALL, workers=1, endpoints=[f"127.0.0.1:{port}"], timeout=5)
    assert len(arc) == 3


def test_run_validation():
    with pytest.raises(ValueError):
        run_mo_fda("zdt1", n=1, solver_cfg=SMALL)
    with pytest.raises(ValueError):
        run_mo_fda("zdt1", n=3, solver_cfg=SMALL, workers=0)
    with pytest.raises(ValueError):
        run_mo_fda(get_problem("zdt1", n_var=5), n=3, solver_cfg=SMALL)


@pytest.mark.slow
def test_each_task_improves_on_box_center():
    cfg = SolverConfig(eval_budget=50_000)
    arc = run_mo_fda("zdt1", n=20, solver_cfg=cfg, workers=1)
    problem = get_problem("zdt1")
    center = problem.evaluate([0.5] * 30)
    for w, r in zip(arc.weights, arc.results):
        assert r.scalar_value <= tchebycheff(center, w, Z2)
