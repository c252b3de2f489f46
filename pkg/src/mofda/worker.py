"""TCP worker: reads task records line by line and answers with results.

A worker keeps no state between tasks and runs one task at a time. A bad
record gets an error reply and the connection stays open; a dropped
connection simply abandons whatever was in flight.
"""

from __future__ import annotations

import logging
import socketserver

from . import protocol
from .exceptions import MofdaError, ProtocolError
from .protocol import Task
from .runner import execute_task, parse_address

log = logging.getLogger(__name__)


def handle_line(line: bytes) -> dict:
    """Turn one request line into the reply record (never raises)."""
    task_id = None
    try:
        rec = protocol.decode(line)
        if isinstance(rec.get("task_id"), int):
            task_id = rec["task_id"]
        task = Task.from_record(rec)
        return execute_task(task).to_record()
    except ProtocolError as exc:
        return protocol.error_record(str(exc), exc.task_id if exc.task_id is not None else task_id)
    except (MofdaError, ValueError, KeyError) as exc:
        return protocol.error_record(f"task failed: {exc}", task_id)


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        peer = self.client_address
        log.info("connection from %s", peer)
        for line in self.rfile:
            if not line.strip():
                continue
            reply = handle_line(line)
            try:
                self.wfile.write(protocol.encode(reply))
                self.wfile.flush()
            except OSError:
                log.info("connection to %s dropped", peer)
                return
        log.info("connection from %s closed", peer)


class WorkerServer(socketserver.TCPServer):
    allow_reuse_address = True

    @property
    def address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"


def make_worker_server(address: str) -> WorkerServer:
    """Bind a worker to ``host:port`` (port 0 picks a free one) without serving."""
    return WorkerServer(parse_address(address), _Handler)


def worker_serve(address: str):
    """Serve tasks on ``address`` until interrupted."""
    with make_worker_server(address) as server:
        log.info("worker listening on %s", server.address)
        server.serve_forever()
