"""Python bindings for the molecuforge construction engine."""

import json as _json
import os as _os

from . import _core
from ._core import Error, ForceFieldParams, Workspace, element_symbols

__all__ = [
    "Error",
    "ForceFieldParams",
    "Workspace",
    "Session",
    "element_symbols",
    "load_xml",
    "save_xml",
    "export_xyz",
    "run_script",
]


def load_xml(document):
    return Workspace.from_xml(document)


def save_xml(workspace):
    return workspace.to_xml()


def export_xyz(workspace):
    return workspace.to_xyz()


def run_script(path):
    """Run a command script; returns the report as a dict."""
    return _json.loads(_core.run_script(_os.fspath(path)))


class Session:
    """A protocol session with a private workspace.

    execute() takes a request dict and returns (response, events).
    """

    def __init__(self, base_dir=""):
        self._session = _core.Session(_os.fspath(base_dir))
        self._next_id = 0
        self.closed = False

    def execute_line(self, line):
        lines, self.closed = self._session.execute_line(line)
        messages = [_json.loads(m) for m in lines]
        return messages[0], messages[1:]

    def execute(self, request):
        return self.execute_line(_json.dumps(request))

    def call(self, cmd, **args):
        """Send one command with a fresh id; raise Error on failure."""
        self._next_id += 1
        response, events = self.execute({"id": self._next_id, "cmd": cmd, "args": args})
        if not response["ok"]:
            err = Error(response["error"]["message"])
            err.code = response["error"]["code"]
            raise err
        return response["result"], events

    @property
    def workspace(self):
        return self._session.workspace
