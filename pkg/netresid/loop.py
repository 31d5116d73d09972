import logging
import queue
import threading
import time

_log = logging.getLogger(__name__)

_STOP = object()


class RunForeverAsThread():
    def run_as_thread(self, *args, **kwargs):
        t = threading.Thread(target=self.run_forever, args=args, kwargs=kwargs)
        t.daemon = True
        t.start()
        return t


class CollectLoop(RunForeverAsThread):
    """
    Pull ``(key, fn, args)`` jobs from an input queue, run them and push
    ``(key, outcome)`` to an output queue. ``outcome`` is a :class:`Outcome`.
    """

    def __init__(self, inqueue, outqueue):
        self._inqueue = inqueue
        self._outqueue = outqueue

    def run_forever(self):
        while 1:
            job = self._inqueue.get(block=True)
            if job is _STOP:
                return
            key, fn, args = job
            start = time.perf_counter()
            try:
                value = fn(*args)
            except KeyboardInterrupt:
                raise
            except Exception as e:
                _log.debug('Task %r raised %r', key, e)
                self._outqueue.put((key, Outcome(None, e, time.perf_counter() - start)))
            else:
                self._outqueue.put((key, Outcome(value, None, time.perf_counter() - start)))


class Outcome():
    __slots__ = ('value', 'error', 'runtime')

    def __init__(self, value, error, runtime):
        self.value = value
        self.error = error
        self.runtime = runtime

    @property
    def ok(self):
        return self.error is None


class WorkerPool():
    """
    A fixed number of worker threads fed from one queue. Results are merged by
    the calling thread and returned ordered by task key, so the outcome of
    :meth:`map` never depends on ``threads`` or on scheduling.

    With ``threads=1`` tasks run inline in the calling thread.
    """

    def __init__(self, threads=1):
        if threads < 1:
            raise ValueError('threads must be >= 1')
        self._threads = threads

    def map(self, tasks):
        """
        :param tasks:
            an iterable of ``(key, fn, args)``; keys must be unique and sortable.

        :return:
            a list of ``(key, Outcome)`` sorted by key.
        """
        tasks = list(tasks)
        if self._threads == 1 or len(tasks) <= 1:
            return sorted(self._run_inline(tasks), key=lambda kv: kv[0])

        inq, outq = queue.Queue(), queue.Queue()
        nworkers = min(self._threads, len(tasks))
        workers = [CollectLoop(inq, outq).run_as_thread() for _ in range(nworkers)]

        for t in tasks:
            inq.put(t)
        for _ in workers:
            inq.put(_STOP)

        results = [outq.get(block=True) for _ in tasks]

        for w in workers:
            w.join()

        return sorted(results, key=lambda kv: kv[0])

    @staticmethod
    def _run_inline(tasks):
        inq, outq = queue.Queue(), queue.Queue()
        for t in tasks:
            inq.put(t)
        inq.put(_STOP)
        CollectLoop(inq, outq).run_forever()
        return [outq.get_nowait() for _ in tasks]
