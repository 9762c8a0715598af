"""Instance parsers: PSPLib single-mode (.sm) text files and a JSON format.

The .sm reader follows the published PSPLib single-mode layout (header with
job and resource counts, PRECEDENCE RELATIONS, REQUESTS/DURATIONS,
RESOURCEAVAILABILITIES).  The two dummy supersource/sink jobs are kept as
zero-duration tasks so start vectors stay aligned with PSPLib numbering.
Due dates, release dates and tardiness costs are ignored with a warning; the
only objective here is makespan.

The JSON format extends the same data with per-edge start-to-start minimum
lags and resource unavailability windows:

    {
      "tasks": [
        {"id": 0, "duration": 4, "demands": [1],
         "successors": [{"id": 1}, {"id": 2, "minLag": 3}]}
      ],
      "resources": [{"id": 0, "capacity": 1}],
      "unavailability": [{"resource": 0, "start": 5, "end": 10}]
    }

A successor entry without "minLag" is finish-to-start; with "minLag" it is a
start-to-start minimum lag replacing finish-to-start on that edge.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .instance import (
    Instance,
    ResourceDef,
    Successor,
    Task,
    UnavailabilityWindow,
    validate,
)


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class ParseReport:
    instance: Instance
    warnings: tuple[str, ...] = ()


# --- PSPLib .sm -------------------------------------------------------------


def parse_sm(text: str) -> ParseReport:
    """Parse a complete PSPLib single-mode file."""
    lines = text.splitlines()
    warnings: list[str] = []

    n_jobs = _header_int(lines, r"jobs\b", "jobs")
    n_res = _header_int(lines, r"-\s+renewable", "renewable resources")

    for i, line in enumerate(lines):
        if "duedate" in line or "rel.date" in line:
            warnings.append(
                f"line {i + 1}: due dates, release dates and tardiness costs are ignored"
            )
            break

    successors = _parse_precedence(lines, n_jobs)
    durations, demands = _parse_requests(lines, n_jobs, n_res)
    capacities = _parse_availabilities(lines, n_res)

    tasks = tuple(
        Task(
            id=j,
            duration=durations[j],
            demands=tuple(demands[j]),
            successors=tuple(Successor(s) for s in successors[j]),
        )
        for j in range(n_jobs)
    )
    resources = tuple(ResourceDef(r, capacities[r]) for r in range(n_res))
    instance = Instance(tasks=tasks, resources=resources)
    violations = validate(instance)
    if violations:
        raise ParseError("parsed instance is invalid: " + "; ".join(violations))
    return ParseReport(instance=instance, warnings=tuple(warnings))


def _header_int(lines, pattern: str, what: str) -> int:
    rx = re.compile(pattern, re.IGNORECASE)
    for i, line in enumerate(lines):
        if rx.search(line) and ":" in line:
            tail = line.split(":", 1)[1]
            match = re.search(r"\d+", tail)
            if not match:
                raise ParseError(f"line {i + 1}: no count after '{what}' header")
            return int(match.group())
    raise ParseError(f"missing '{what}' header line")


def _section_start(lines, name: str) -> int:
    for i, line in enumerate(lines):
        if name in line:
            return i
    raise ParseError(f"missing section {name}")


def _parse_precedence(lines, n_jobs) -> list[list[int]]:
    start = _section_start(lines, "PRECEDENCE RELATIONS")
    successors: list[list[int]] = []
    i = start + 1
    while len(successors) < n_jobs:
        if i >= len(lines) or lines[i].startswith("***"):
            raise ParseError(
                f"line {min(i, len(lines) - 1) + 1}: PRECEDENCE RELATIONS section "
                f"ended after {len(successors)} of {n_jobs} jobs"
            )
        line = lines[i].strip()
        i += 1
        if not line or line[0].isalpha():
            continue
        parts = line.split()
        try:
            jobnr, n_modes, n_succ = int(parts[0]), int(parts[1]), int(parts[2])
            succ = [int(p) - 1 for p in parts[3 : 3 + n_succ]]
        except (ValueError, IndexError) as exc:
            raise ParseError(f"line {i}: malformed precedence row: {line!r}") from exc
        if jobnr != len(successors) + 1:
            raise ParseError(f"line {i}: expected job {len(successors) + 1}, got {jobnr}")
        if n_modes != 1:
            raise ParseError(f"line {i}: job {jobnr} has {n_modes} modes; only single-mode is supported")
        if len(succ) != n_succ:
            raise ParseError(f"line {i}: job {jobnr} lists {len(succ)} of {n_succ} successors")
        successors.append(succ)
    return successors


def _parse_requests(lines, n_jobs, n_res) -> tuple[list[int], list[list[int]]]:
    start = _section_start(lines, "REQUESTS/DURATIONS")
    durations = []
    demands = []
    i = start + 1
    while len(durations) < n_jobs:
        if i >= len(lines) or lines[i].startswith("***"):
            raise ParseError(
                f"line {min(i, len(lines) - 1) + 1}: REQUESTS/DURATIONS section "
                f"ended after {len(durations)} of {n_jobs} jobs"
            )
        line = lines[i].strip()
        i += 1
        if not line or line[0].isalpha() or line.startswith("---"):
            continue
        parts = line.split()
        try:
            jobnr = int(parts[0])
            duration = int(parts[2])
            req = [int(p) for p in parts[3 : 3 + n_res]]
        except (ValueError, IndexError) as exc:
            raise ParseError(f"line {i}: malformed requests row: {line!r}") from exc
        if jobnr != len(durations) + 1:
            raise ParseError(f"line {i}: expected job {len(durations) + 1}, got {jobnr}")
        if len(req) != n_res:
            raise ParseError(f"line {i}: job {jobnr} lists {len(req)} of {n_res} demands")
        durations.append(duration)
        demands.append(req)
    return durations, demands


def _parse_availabilities(lines, n_res) -> list[int]:
    start = _section_start(lines, "RESOURCEAVAILABILITIES")
    for i in range(start + 1, len(lines)):
        line = lines[i].strip()
        if not line or line.startswith("***"):
            continue
        if line[0].isalpha() or line.startswith("R "):
            continue
        parts = line.split()
        try:
            caps = [int(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"line {i + 1}: malformed capacities row: {line!r}") from exc
        if len(caps) != n_res:
            raise ParseError(
                f"line {i + 1}: {len(caps)} capacities for {n_res} resources"
            )
        return caps
    raise ParseError("RESOURCEAVAILABILITIES section has no capacities row")


# --- JSON -------------------------------------------------------------------


def parse_json(text: str) -> ParseReport:
    """Parse the JSON instance format; errors name the offending JSON path."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("$: expected a JSON object")

    tasks_doc = _require(doc, "tasks", list, "$")
    resources_doc = _require(doc, "resources", list, "$")
    windows_doc = doc.get("unavailability", [])
    if not isinstance(windows_doc, list):
        raise ParseError("unavailability: expected an array")

    resources = []
    for i, rdoc in enumerate(resources_doc):
        path = f"resources[{i}]"
        if not isinstance(rdoc, dict):
            raise ParseError(f"{path}: expected an object")
        resources.append(
            ResourceDef(
                id=_require(rdoc, "id", int, path),
                capacity=_require(rdoc, "capacity", int, path),
            )
        )

    tasks = []
    for i, tdoc in enumerate(tasks_doc):
        path = f"tasks[{i}]"
        if not isinstance(tdoc, dict):
            raise ParseError(f"{path}: expected an object")
        succ_doc = tdoc.get("successors", [])
        if not isinstance(succ_doc, list):
            raise ParseError(f"{path}.successors: expected an array")
        successors = []
        for k, sdoc in enumerate(succ_doc):
            spath = f"{path}.successors[{k}]"
            if not isinstance(sdoc, dict):
                raise ParseError(f"{spath}: expected an object")
            min_lag = sdoc.get("minLag")
            if min_lag is not None and not isinstance(min_lag, int):
                raise ParseError(f"{spath}.minLag: expected an integer")
            successors.append(Successor(task=_require(sdoc, "id", int, spath), min_lag=min_lag))
        demands_doc = _require(tdoc, "demands", list, path)
        if not all(isinstance(v, int) for v in demands_doc):
            raise ParseError(f"{path}.demands: expected an array of integers")
        tasks.append(
            Task(
                id=_require(tdoc, "id", int, path),
                duration=_require(tdoc, "duration", int, path),
                demands=tuple(demands_doc),
                successors=tuple(successors),
            )
        )

    windows = []
    for i, wdoc in enumerate(windows_doc):
        path = f"unavailability[{i}]"
        if not isinstance(wdoc, dict):
            raise ParseError(f"{path}: expected an object")
        windows.append(
            UnavailabilityWindow(
                resource=_require(wdoc, "resource", int, path),
                start=_require(wdoc, "start", int, path),
                end=_require(wdoc, "end", int, path),
            )
        )

    instance = Instance(
        tasks=tuple(tasks), resources=tuple(resources), unavailability=tuple(windows)
    )
    violations = validate(instance)
    if violations:
        raise ParseError("parsed instance is invalid: " + "; ".join(violations))
    return ParseReport(instance=instance)


def instance_to_json(instance: Instance) -> str:
    doc = {
        "tasks": [
            {
                "id": t.id,
                "duration": t.duration,
                "demands": list(t.demands),
                "successors": [
                    {"id": e.task} if e.min_lag is None else {"id": e.task, "minLag": e.min_lag}
                    for e in t.successors
                ],
            }
            for t in instance.tasks
        ],
        "resources": [{"id": r.id, "capacity": r.capacity} for r in instance.resources],
        "unavailability": [
            {"resource": w.resource, "start": w.start, "end": w.end}
            for w in instance.unavailability
        ],
    }
    return json.dumps(doc, indent=2)


def load_instance(path) -> ParseReport:
    """Parse a file as .sm or JSON depending on its extension."""
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith(".sm"):
        return parse_sm(text)
    return parse_json(text)


def _require(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise ParseError(f"{path}.{key}: missing required field")
    value = doc[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ParseError(f"{path}.{key}: expected an integer")
    if kind is list and not isinstance(value, list):
        raise ParseError(f"{path}.{key}: expected an array")
    return value
