"""Runtime shim: executes one generated snippet and reports the outcome.

Invoked as ``python runtime_shim.py <request.json>``. The request names a
snippet file and a report file; the snippet runs as a top-level program in
a fresh module namespace, its stdout/stderr pass straight through to this
process's streams, and a JSON report is always written before exit:

    request: {"snippet_path": str, "report_path": str,
              "timeout_s": number (ignored here; the caller owns timeouts),
              "no_network": bool (optional)}
    report:  {"status": "success"|"error", "exit_code": int,
              "exception": {"type": str, "message": str, "traceback": str} | null}

Exit codes: 0 snippet succeeded, 1 snippet raised, 2 the request itself
was unreadable or invalid. Standard library only.
"""

import json
import os
import sys
import traceback


def _write_report(report_path, report):
    with open(report_path, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2)
        handle.write("\n")


def _block_network():
    import socket

    def _refuse(*args, **kwargs):
        raise OSError("network access is disabled for this execution")

    socket.socket = _refuse
    socket.create_connection = _refuse


def run_shim(request_path):
    try:
        with open(request_path, "r", encoding="utf-8") as handle:
            request = json.load(handle)
        # resolve now so a snippet that calls os.chdir cannot break the report write
        snippet_path = os.path.abspath(request["snippet_path"])
        report_path = os.path.abspath(request["report_path"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write("shim: invalid request file: %s\n" % exc)
        return 2

    if request.get("no_network"):
        _block_network()

    try:
        with open(snippet_path, "r", encoding="utf-8") as handle:
            source = handle.read()
        code = compile(source, snippet_path, "exec")
        namespace = {"__name__": "__main__", "__file__": snippet_path, "__builtins__": __builtins__}
        exec(code, namespace)
    except SystemExit as exc:
        exit_code = exc.code if isinstance(exc.code, int) else (0 if exc.code is None else 1)
        if exit_code == 0:
            _write_report(report_path, {"status": "success", "exit_code": 0, "exception": None})
            return 0
        _write_report(
            report_path,
            {
                "status": "error",
                "exit_code": exit_code,
                "exception": {
                    "type": "SystemExit",
                    "message": str(exc.code),
                    "traceback": traceback.format_exc(),
                },
            },
        )
        return 1
    except BaseException as exc:  # report-before-exit covers every failure mode
        _write_report(
            report_path,
            {
                "status": "error",
                "exit_code": 1,
                "exception": {
                    "type": type(exc).__name__,
                    "message": str(exc),
                    "traceback": traceback.format_exc(),
                },
            },
        )
        return 1

    _write_report(report_path, {"status": "success", "exit_code": 0, "exception": None})
    return 0


def main(argv):
    if len(argv) != 2:
        sys.stderr.write("usage: runtime_shim.py <request.json>\n")
        return 2
    return run_shim(argv[1])


if __name__ == "__main__":
    sys.exit(main(sys.argv))
