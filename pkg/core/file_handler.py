"""
File I/O for resochi: problem and orbit-system documents, and reports
"""

import io
import csv
import json
import math
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import mpmath

from core.contact import ReebOrbit, ReebOrbitSystem, TableLaw
from core.exactnum import (
    ExactScalar,
    SymbolEntry,
    SymbolTable,
    evaluate_float,
    format_scalar,
    parse_scalar
)
from core.models import LinearizedReturnMap, RotationBlock, orbit_from_map
from core.resonance import MeanIndexProblem
from utils.constants import (
    BLOCK_ELLIPTIC,
    DEGENERACY_TOL,
    FORMAT_CSV,
    FORMAT_JSON,
    FORMAT_TEXT,
    LAW_TABLE,
    ORBIT_BAD,
    SUPPORTED_FORMATS,
    WITNESS_PRECISION_DPS
)
from utils.exceptions import InputFormatError
from utils.helpers import to_report_value
from utils.validators import (
    is_infinite_n,
    is_valid_output_path,
    validate_orbit_system_document,
    validate_problem_document
)

# Set up logging
logger = logging.getLogger(__name__)


def read_json(path: str) -> Any:
    """
    Read a JSON document

    Args:
        path: Path to the file

    Returns:
        Parsed document

    Raises:
        InputFormatError: If the file is missing or not JSON (with line and column)
    """
    try:
        with open(path, 'r', encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise InputFormatError(f"{path}: file not found")
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}")


def symbols_from_document(entries: Sequence[dict]) -> SymbolTable:
    """Symbol table from [{"name": ..., "witness": ...}, ...]"""
    table_entries = []
    with mpmath.workdps(WITNESS_PRECISION_DPS):
        for entry in entries:
            witness = entry.get("witness")
            try:
                value = None if witness is None else mpmath.mpf(witness)
            except (ValueError, TypeError):
                raise InputFormatError(f"Symbol {entry.get('name')}: witness {witness!r} is not numeric")
            table_entries.append(SymbolEntry(entry["name"], value, entry.get("description", "")))
    return SymbolTable(tuple(table_entries))


def symbols_to_document(table: SymbolTable) -> List[dict]:
    documents = []
    for entry in table.entries:
        document = {"name": entry.name}
        if entry.witness is not None:
            with mpmath.workdps(table.precision):
                document["witness"] = mpmath.nstr(entry.witness, table.precision)
        if entry.description:
            document["description"] = entry.description
        documents.append(document)
    return documents


def _scalar_from_document(value: Any, where: str) -> ExactScalar:
    if isinstance(value, int) and not isinstance(value, bool):
        return ExactScalar(Fraction(value))
    if isinstance(value, str):
        try:
            return parse_scalar(value)
        except InputFormatError as e:
            raise InputFormatError(f"{where}: {e}")
    raise InputFormatError(f"{where}: expected scalar text, got {value!r}")


def _check_declared(scalar: ExactScalar, symbols: SymbolTable, where: str) -> None:
    for symbol in scalar.symbols:
        if symbol not in symbols:
            raise InputFormatError(f"{where}: symbol {symbol} is not declared in 'symbols'")


def problem_from_document(document: Any) -> MeanIndexProblem:
    """
    Build a MeanIndexProblem from its JSON document

    Args:
        document: Parsed JSON

    Returns:
        MeanIndexProblem

    Raises:
        InputFormatError: If the document is malformed
    """
    valid, message = validate_problem_document(document)
    if not valid:
        raise InputFormatError(message)
    symbols = symbols_from_document(document.get("symbols", []))
    deltas = []
    for position, raw in enumerate(document["deltas"]):
        delta = _scalar_from_document(raw, f"deltas[{position}]")
        _check_declared(delta, symbols, f"deltas[{position}]")
        deltas.append(delta)
    N = None if is_infinite_n(document["N"]) else document["N"]
    return MeanIndexProblem(
        n=document["n"],
        N=N,
        deltas=tuple(deltas),
        labels=tuple(document.get("labels") or ()),
        symbols=symbols
    )


def problem_to_document(problem: MeanIndexProblem) -> Dict[str, Any]:
    """JSON document of a problem"""
    return {
        "n": problem.n,
        "N": "inf" if problem.N is None else problem.N,
        "symbols": symbols_to_document(problem.symbols),
        "deltas": [format_scalar(delta) for delta in problem.deltas],
        "labels": list(problem.labels)
    }


def load_problem(path: str) -> MeanIndexProblem:
    """Read a mean-index problem file"""
    problem = problem_from_document(read_json(path))
    logger.info(f"Loaded problem with m={problem.m}, n={problem.n}, N={problem.N} from {path}")
    return problem


def _number_from_document(value: Any, where: str):
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise InputFormatError(f"{where}: {value!r} is not a rational literal")
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise InputFormatError(f"{where}: expected a number, got {value!r}")


def _map_from_document(law: dict, where: str) -> LinearizedReturnMap:
    blocks = []
    for index, block in enumerate(law.get("blocks", [])):
        theta = None
        if block["kind"] == BLOCK_ELLIPTIC:
            theta = _number_from_document(block["theta"], f"{where}.blocks[{index}].theta")
        blocks.append(RotationBlock(
            block["kind"],
            theta=theta,
            eigenvalue=block.get("eigenvalue"),
            winding=block.get("winding", 0)
        ))
    return LinearizedReturnMap(tuple(blocks), winding=law.get("winding", 0), strict=law.get("strict", False))


def _check_block_delta(raw: Any, mean_index: Any, symbols: SymbolTable, where: str) -> None:
    """A declared delta must equal the mean index of the blocks, exactly when both are rational"""
    if isinstance(raw, float):
        declared = raw
    else:
        scalar = _scalar_from_document(raw, where)
        _check_declared(scalar, symbols, where)
        if scalar.is_rational and isinstance(mean_index, Fraction):
            if scalar.rational_part != mean_index:
                raise InputFormatError(f"{where}: {raw} contradicts the mean index {mean_index} of the blocks")
            return
        declared = float(scalar.rational_part) if scalar.is_rational else evaluate_float(scalar, symbols)
    if not math.isclose(declared, float(mean_index), rel_tol=1e-12, abs_tol=DEGENERACY_TOL):
        raise InputFormatError(f"{where}: {raw} contradicts the mean index {float(mean_index)} of the blocks")


def _orbit_from_document(document: dict, n: int, symbols: SymbolTable, position: int) -> ReebOrbit:
    where = f"orbits[{position}]"
    law = document["cz_law"]
    sigma = document.get("sigma")

    if law["type"] == LAW_TABLE:
        raw_delta = document["delta"]
        if isinstance(raw_delta, float):
            delta, numeric = raw_delta, raw_delta
        else:
            delta = _scalar_from_document(raw_delta, f"{where}.delta")
            _check_declared(delta, symbols, f"{where}.delta")
            numeric = delta.rational_part if delta.is_rational else evaluate_float(delta, symbols)
        table = TableLaw(law["values"], numeric, n, bad=document["class"] == ORBIT_BAD)
        return ReebOrbit(document["name"], document["class"], delta, table, sigma)

    return_map = _map_from_document(law, f"{where}.cz_law")
    if len(return_map.blocks) != n - 1:
        raise InputFormatError(
            f"{where}: {len(return_map.blocks)} blocks given, a {2 * n - 1}-manifold needs {n - 1}"
        )
    if "delta" in document:
        _check_block_delta(document["delta"], return_map.mean_index, symbols, f"{where}.delta")
    orbit = orbit_from_map(document["name"], return_map, sigma)
    declared = document.get("class")
    if declared is not None and declared != orbit.parity_class:
        raise InputFormatError(f"{where}: class {declared!r} contradicts its blocks ({orbit.parity_class})")
    return orbit


def system_from_document(document: Any) -> ReebOrbitSystem:
    """
    Build a ReebOrbitSystem from its JSON document

    Args:
        document: Parsed JSON

    Returns:
        ReebOrbitSystem

    Raises:
        InputFormatError: If the document is malformed
    """
    valid, message = validate_orbit_system_document(document)
    if not valid:
        raise InputFormatError(message)
    n = document["n"]
    symbols = symbols_from_document(document.get("symbols", []))
    orbits = tuple(
        _orbit_from_document(orbit, n, symbols, position)
        for position, orbit in enumerate(document["orbits"])
    )
    return ReebOrbitSystem(
        n=n,
        orbits=orbits,
        symbols=symbols,
        homotopy_note=document.get("homotopy_note", ""),
        cf2_enforced=bool(document.get("cf2_enforced", False)),
        nondegenerate=bool(document.get("nondegenerate", True))
    )


def system_to_document(system: ReebOrbitSystem) -> Dict[str, Any]:
    """JSON document of an orbit system; laws must provide to_document()"""
    orbits = []
    for orbit in system.orbits:
        delta = orbit.mean_index
        orbits.append({
            "name": orbit.name,
            "class": orbit.parity_class,
            "delta": format_scalar(delta) if isinstance(delta, ExactScalar) else delta,
            "sigma": orbit.sigma,
            "cz_law": orbit.cz_iterate_law.to_document()
        })
    return {
        "n": system.n,
        "homotopy_note": system.homotopy_note,
        "cf2_enforced": system.cf2_enforced,
        "nondegenerate": system.nondegenerate,
        "symbols": symbols_to_document(system.symbols),
        "orbits": orbits
    }


def load_orbit_system(path: str) -> ReebOrbitSystem:
    """Read an orbit-system file"""
    system = system_from_document(read_json(path))
    logger.info(f"Loaded orbit system with {len(system.orbits)} orbits (n={system.n}) from {path}")
    return system


def _text_lines(value: Any, indent: int = 0) -> List[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(item, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar_text(item)}")
        return lines
    if isinstance(value, list):
        if all(not isinstance(item, (dict, list)) for item in value):
            return [pad + ", ".join(_scalar_text(item) for item in value)]
        lines = []
        for item in value:
            lines.append(f"{pad}-")
            lines.extend(_text_lines(item, indent + 1))
        return lines
    return [pad + _scalar_text(value)]


def _scalar_text(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, list):
        return "[" + ", ".join(_scalar_text(item) for item in value) + "]"
    return str(value)


def render_report(report: Dict[str, Any], fmt: str = FORMAT_JSON,
                  table: Optional[Sequence[Dict[str, Any]]] = None) -> str:
    """
    Render a report in json, csv or text form

    Args:
        report: Report mapping (values may be Fractions, dataclasses, lattices)
        fmt: Output format
        table: Rows used by the csv format; without it the report is
            flattened to key,value rows

    Returns:
        Rendered text ending with a newline
    """
    if fmt not in SUPPORTED_FORMATS:
        raise InputFormatError(f"Unsupported format {fmt!r}; expected one of {SUPPORTED_FORMATS}")
    data = to_report_value(report)

    if fmt == FORMAT_JSON:
        return json.dumps(data, indent=2) + "\n"

    if fmt == FORMAT_TEXT:
        return "\n".join(_text_lines(data)) + "\n"

    buffer = io.StringIO()
    if table:
        rows = to_report_value(list(table))
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: json.dumps(value) if isinstance(value, (list, dict)) else value
                             for key, value in row.items()})
    else:
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in _flatten(data):
            writer.writerow([key, value])
    return buffer.getvalue()


def _flatten(value: Any, prefix: str = ""):
    if isinstance(value, dict):
        for key, item in value.items():
            yield from _flatten(item, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(value, list) and any(isinstance(item, (dict, list)) for item in value):
        for index, item in enumerate(value):
            yield from _flatten(item, f"{prefix}[{index}]")
    else:
        yield prefix, json.dumps(value) if isinstance(value, list) else value


def write_report(text: str, output_path: Optional[str] = None, stream=None) -> None:
    """
    Write rendered report text to a file, or to a stream when no path is given

    Raises:
        InputFormatError: If the output path is unusable
    """
    if output_path is None:
        stream.write(text)
        return
    valid, message = is_valid_output_path(output_path)
    if not valid:
        raise InputFormatError(f"{output_path}: {message}")
    with open(output_path, 'w', encoding="utf-8") as f:
        f.write(text)
    logger.info(f"Report written to {output_path}")


def write_document(document: Dict[str, Any], output_path: Optional[str] = None, stream=None) -> None:
    """Write a problem or orbit-system document as JSON"""
    write_report(json.dumps(document, indent=2) + "\n", output_path, stream)
