"""Self-describing JSON matrix files.

Every file is an object with ``format_version``, ``kind``, ``n``, ``payload``
and ``metadata``. Numbers are written with Python's shortest round-trip float
repr, so reading a file back reproduces every stored double exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import SymmetricBandMetric
from .penta import PentaHamiltonian
from .polyfam import TridiagonalHamiltonian

FORMAT_VERSION = 1

KINDS = ("tridiagonal-hamiltonian", "pentadiagonal-hamiltonian", "symmetric-band-metric", "dense")


class MatrixFileError(ValueError):
    """Malformed or inconsistent matrix file."""


def _floats(values) -> list:
    if values is None:
        return None
    return [float(x) for x in np.asarray(values, dtype=float).ravel()]


@dataclass
class MatrixFile:
    kind: str
    n: int
    payload: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MatrixFileError(f"unknown kind {self.kind!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise MatrixFileError(f"invalid size {self.n!r}")
        self._check_lengths()

    def _check_lengths(self):
        n, p = self.n, self.payload

        def need(name, length, nullable=False):
            if name not in p:
                raise MatrixFileError(f"payload is missing {name!r}")
            if p[name] is None and nullable:
                return
            if not isinstance(p[name], list) or len(p[name]) != length:
                raise MatrixFileError(f"{name!r} must be a list of length {length}")

        if self.kind == "tridiagonal-hamiltonian":
            need("diag", n)
            need("super", n - 1)
            need("sub", n - 1)
        elif self.kind == "pentadiagonal-hamiltonian":
            need("diag", n, nullable=True)
            need("super1", n - 1)
            need("sub1", n - 1)
            need("super2", max(n - 2, 0))
            need("sub2", max(n - 2, 0))
        elif self.kind == "symmetric-band-metric":
            diags = p.get("diagonals")
            if not isinstance(diags, list) or not diags or len(diags) > n:
                raise MatrixFileError("'diagonals' must hold between 1 and n lists")
            for d, values in enumerate(diags):
                if not isinstance(values, list) or len(values) != n - d:
                    raise MatrixFileError(f"diagonal {d} must have length {n - d}")
            if "bandwidth" in p and p["bandwidth"] != len(diags) - 1:
                raise MatrixFileError("'bandwidth' disagrees with the number of diagonals")
        else:
            rows = p.get("rows")
            if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
                raise MatrixFileError(f"'rows' must be an {n}x{n} nested list")

    def to_json(self) -> str:
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "n": self.n,
            "payload": self.payload,
            "metadata": self.metadata,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MatrixFile":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixFileError(f"not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise MatrixFileError("top level must be an object")
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise MatrixFileError(f"unsupported format_version {version!r}")
        try:
            return cls(doc["kind"], doc["n"], doc["payload"], doc.get("metadata") or {})
        except KeyError as exc:
            raise MatrixFileError(f"missing field {exc.args[0]!r}") from None

    def write(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def read(cls, path) -> "MatrixFile":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_object(self):
        p = self.payload
        try:
            if self.kind == "tridiagonal-hamiltonian":
                return TridiagonalHamiltonian(p["diag"], p["super"], p["sub"])
            if self.kind == "pentadiagonal-hamiltonian":
                return PentaHamiltonian(p["diag"], p["super1"], p["sub1"], p["super2"], p["sub2"])
            if self.kind == "symmetric-band-metric":
                return SymmetricBandMetric(tuple(p["diagonals"]))
            return np.array(p["rows"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise MatrixFileError(str(exc)) from None

    @classmethod
    def from_object(cls, obj, metadata: dict | None = None) -> "MatrixFile":
        metadata = dict(metadata or {})
        if isinstance(obj, TridiagonalHamiltonian):
            payload = {"diag": _floats(obj.a), "super": _floats(obj.c), "sub": _floats(obj.b)}
            return cls("tridiagonal-hamiltonian", obj.n, payload, metadata)
        if isinstance(obj, PentaHamiltonian):
            payload = {
                "diag": _floats(obj.diag),
                "super1": _floats(obj.sup1),
                "sub1": _floats(obj.sub1),
                "super2": _floats(obj.sup2),
                "sub2": _floats(obj.sub2),
            }
            return cls("pentadiagonal-hamiltonian", obj.n, payload, metadata)
        if isinstance(obj, SymmetricBandMetric):
            if obj.scale != 1.0:
                metadata.setdefault("scale", float(obj.scale))
            payload = {"bandwidth": obj.bandwidth, "diagonals": [_floats(d) for d in obj.diagonals]}
            return cls("symmetric-band-metric", obj.n, payload, metadata)
        arr = np.asarray(obj, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise MatrixFileError("dense payload must be a square matrix")
        return cls("dense", arr.shape[0], {"rows": [_floats(r) for r in arr]}, metadata)


def save(obj, path, metadata: dict | None = None) -> MatrixFile:
    mf = MatrixFile.from_object(obj, metadata)
    mf.write(path)
    return mf


def load(path):
    """Read a matrix file and return the corresponding object."""
    return MatrixFile.read(path).to_object()
