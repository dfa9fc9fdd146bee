"""Problem and solution file formats.

Problems are JSON ("stcf-v1"): a dim and a list of truncated quadratic
terms {"A": [[..]], "b": [..], "c": .., "lambda": number|"inf"}, each
optionally carrying a "support" of strictly increasing coordinate
indices for high-dimensional sparse sums.  Solutions are JSON with the
minimizer, value, and active term indices.  All writes are atomic
(tmp file + rename)."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .quadform import Quadratic, TruncatedQuadratic

FORMAT_NAME = "stcf-v1"


@dataclass
class ProblemFile:
    """dim, terms, and (optionally) per-term supports; supports is None
    when every term acts on the full space."""

    dim: int
    terms: list
    supports: list | None = None


def _atomic_write_text(path, text: str) -> None:
    tmp = str(path) + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def load_problem(path) -> ProblemFile:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValueError("invalid JSON in %s: %s" % (path, e)) from None
    if not isinstance(doc, dict):
        raise ValueError("problem file must be a JSON object")
    if doc.get("format") != FORMAT_NAME:
        raise ValueError("field 'format' must be %r, got %r"
                         % (FORMAT_NAME, doc.get("format")))
    if "dim" not in doc:
        raise ValueError("field 'dim' is missing")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ValueError("field 'dim' must be a positive integer")
    raw_terms = doc.get("terms")
    if not isinstance(raw_terms, list) or not raw_terms:
        raise ValueError("field 'terms' must be a non-empty list")
    terms = []
    supports = []
    any_support = False
    for ti, rt in enumerate(raw_terms):
        if not isinstance(rt, dict):
            raise ValueError("terms[%d] must be an object" % ti)
        try:
            term = TruncatedQuadratic.from_json_dict(rt)
        except (ValueError, TypeError) as e:
            raise ValueError("terms[%d]: %s" % (ti, e)) from None
        sup = rt.get("support")
        if sup is None:
            sup = tuple(range(term.dim))
            if term.dim != dim:
                raise ValueError("terms[%d]: dim %d without 'support' in a "
                                 "%d-dimensional problem" % (ti, term.dim, dim))
        else:
            any_support = True
            sup = tuple(int(j) for j in sup)
            if len(sup) != term.dim:
                raise ValueError("terms[%d]: 'support' length %d does not "
                                 "match term dim %d" % (ti, len(sup), term.dim))
            if any(j < 0 or j >= dim for j in sup):
                raise ValueError("terms[%d]: 'support' index out of range" % ti)
            if any(b <= a for a, b in zip(sup, sup[1:])):
                raise ValueError("terms[%d]: 'support' must be strictly "
                                 "increasing" % ti)
        terms.append(term)
        supports.append(sup)
    return ProblemFile(dim, terms, supports if any_support else None)


def save_problem(path, problem: ProblemFile) -> None:
    out_terms = []
    sups = problem.supports or [tuple(range(t.dim)) for t in problem.terms]
    for term, sup in zip(problem.terms, sups):
        d = term.to_json_dict()
        if tuple(sup) != tuple(range(problem.dim)):
            d["support"] = list(sup)
        out_terms.append(d)
    doc = {"format": FORMAT_NAME, "dim": problem.dim, "terms": out_terms}
    _atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


def solution_dict(sol, extra: dict | None = None) -> dict:
    doc = {
        "format": FORMAT_NAME,
        "value": float(sol.value),
        "x": np.asarray(sol.x, dtype=float).reshape(-1).tolist(),
        "active": sorted(int(i) for i in sol.active),
        "pieces_visited": int(sol.pieces_visited),
        "iterations": int(sol.iterations),
    }
    if extra:
        doc.update(extra)
    return doc


def save_solution(path, sol, extra: dict | None = None) -> None:
    _atomic_write_text(path, json.dumps(solution_dict(sol, extra), indent=2) + "\n")


# ---------------------------------------------------------------------------
# CSV inputs
# ---------------------------------------------------------------------------


def load_regression_csv(path):
    """Header 'y,x1,...,xp'; returns (X, y)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty CSV file %s" % path) from None
        header = [h.strip() for h in header]
        if not header or header[0] != "y":
            raise ValueError("regression CSV must start with a 'y' column")
        p = len(header) - 1
        if p < 1:
            raise ValueError("regression CSV needs at least one x column")
        ys, xs = [], []
        for ln, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != p + 1:
                raise ValueError("line %d: expected %d fields, got %d"
                                 % (ln, p + 1, len(row)))
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ValueError("line %d: non-numeric field" % ln) from None
            ys.append(vals[0])
            xs.append(vals[1:])
    if not ys:
        raise ValueError("regression CSV has no data rows")
    return np.array(xs), np.array(ys)


def load_points_csv(path):
    """Header 'x,y' or 'x,y,w'; returns (points, weights or None)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty CSV file %s" % path) from None
        header = [h.strip() for h in header]
        if header[:2] != ["x", "y"] or len(header) > 3 or \
                (len(header) == 3 and header[2] != "w"):
            raise ValueError("points CSV header must be 'x,y' or 'x,y,w'")
        has_w = len(header) == 3
        pts, ws = [], []
        for ln, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ValueError("line %d: expected %d fields, got %d"
                                 % (ln, len(header), len(row)))
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ValueError("line %d: non-numeric field" % ln) from None
            pts.append(vals[:2])
            if has_w:
                ws.append(vals[2])
    if not pts:
        raise ValueError("points CSV has no data rows")
    return np.array(pts), (np.array(ws) if has_w else None)


def load_signal_txt(path) -> np.ndarray:
    """One sample per line (blank lines ignored)."""
    try:
        values = np.loadtxt(path, ndmin=1)
    except ValueError as e:
        raise ValueError("invalid signal file %s: %s" % (path, e)) from None
    if values.ndim != 1 or values.size == 0:
        raise ValueError("signal file must hold a single non-empty column")
    return values.astype(float)


def save_signal_txt(path, values) -> None:
    values = np.asarray(values, dtype=float).reshape(-1)
    _atomic_write_text(path, "\n".join("%.12g" % v for v in values) + "\n")
