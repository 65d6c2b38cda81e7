"""File output helpers: provenance headers, atomic writes, CSV and solution dumps."""
import json
import os
import struct
import tempfile

import numpy as np

FORMAT_VERSION = "1"


def fmt(v):
    """Deterministic text for a CSV cell (``repr`` round-trips floats)."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def atomic_write(path, data):
    """Write ``data`` (str or bytes) to ``path`` via a temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def header_lines(config):
    """``# key: value`` comment lines embedding the resolved run config."""
    if not config:
        return []
    text = json.dumps(config, sort_keys=True, default=_json_default)
    return [f"# format_version: {FORMAT_VERSION}", f"# config: {text}"]


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def csv_text(columns, rows, config=None):
    lines = header_lines(config)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, columns, rows, config=None):
    atomic_write(path, csv_text(columns, rows, config))


def read_csv(path):
    """Return ``(config, columns, rows)``; cells stay strings."""
    config = None
    rows = []
    columns = None
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# config: "):
                config = json.loads(line[len("# config: "):])
                continue
            if line.startswith("#") or not line:
                continue
            if columns is None:
                columns = line.split(",")
            else:
                rows.append(line.split(","))
    return config, columns, rows


def write_solution(prefix, solution, config=None):
    """``<prefix>.csv`` with ``index,value`` per nonzero, ``<prefix>.json`` summary."""
    nz = np.flatnonzero(solution.x)
    write_csv(f"{prefix}.csv", ["index", "value"], [(int(i), solution.x[i]) for i in nz], config)
    summary = dict(solution.summary())
    if config:
        summary["config"] = config
    atomic_write(f"{prefix}.json", json.dumps(summary, sort_keys=True, indent=2, default=_json_default) + "\n")


def write_matrix(path, a):
    """Row-major float64 dump behind a 16-byte header: rows, cols as uint64 LE."""
    a = np.ascontiguousarray(a, dtype="<f8")
    rows, cols = a.shape
    atomic_write(path, struct.pack("<QQ", rows, cols) + a.tobytes())


def read_matrix(path):
    with open(path, "rb") as fh:
        rows, cols = struct.unpack("<QQ", fh.read(16))
        return np.frombuffer(fh.read(), dtype="<f8").reshape(rows, cols).copy()
