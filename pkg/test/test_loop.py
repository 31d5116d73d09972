import threading
import time

import pytest

from netresid.loop import WorkerPool


def square(x):
    return x * x


def fail(x):
    raise ValueError('bad input %d' % x)


def slow_identity(x):
    time.sleep(0.01 * (5 - x))
    return (x, threading.current_thread().name)


def test_results_ordered_by_key():
    tasks = [((3 - i, 'x'), square, (i,)) for i in range(4)]
    results = WorkerPool(3).map(tasks)
    assert [key for key, _ in results] == [(0, 'x'), (1, 'x'), (2, 'x'), (3, 'x')]
    assert [o.value for _, o in results] == [9, 4, 1, 0]


def test_same_results_for_any_thread_count():
    tasks = [(i, square, (i,)) for i in range(10)]
    one = [(k, o.value) for k, o in WorkerPool(1).map(tasks)]
    many = [(k, o.value) for k, o in WorkerPool(4).map(tasks)]
    assert one == many


def test_errors_are_captured():
    tasks = [(0, square, (2,)), (1, fail, (7,)), (2, square, (3,))]
    results = dict(WorkerPool(2).map(tasks))
    assert results[0].ok and results[0].value == 4
    assert not results[1].ok
    assert isinstance(results[1].error, ValueError)
    assert results[2].value == 9


def test_runtime_recorded():
    (_, outcome), = WorkerPool(1).map([('a', time.sleep, (0.02,))])
    assert outcome.runtime >= 0.015


def test_uses_worker_threads():
    results = WorkerPool(3).map([(i, slow_identity, (i,)) for i in range(5)])
    names = {o.value[1] for _, o in results}
    assert threading.current_thread().name not in names


def test_inline_with_one_thread():
    results = WorkerPool(1).map([(i, slow_identity, (i,)) for i in range(2)])
    assert {o.value[1] for _, o in results} == {threading.current_thread().name}


def test_empty():
    assert WorkerPool(4).map([]) == []


def test_bad_thread_count():
    with pytest.raises(ValueError):
        WorkerPool(0)
