#!/usr/bin/env -S uv run --script
# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26",
#     "scipy>=1.11",
# ]
# ///
"""
Parse NASA-7 thermodynamic data (CHEMKIN fixed-column or JSON) into species records.

Usage:
    uv run thermo_parser.py ../data/thermo.dat
    uv run thermo_parser.py ../data/thermo.dat --species N2 --temperature 300
    uv run thermo_parser.py ../data/gaussian_species.json --r0 1 -T 2 -f text
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from errors import (
    BadNumber,
    DGError,
    DuplicateSpecies,
    MalformedRecord,
    SpeciesNotFound,
    ThermoError,
    ThermoFileNotFound,
)
from thermo import R_UNIVERSAL, SpeciesThermo, ThermoInterval, species_properties

log = logging.getLogger(__name__)

# Atomic masses in kg/mol.
ATOMIC_MASS = {
    "H": 1.00794e-3,
    "HE": 4.002602e-3,
    "C": 12.0107e-3,
    "N": 14.0067e-3,
    "O": 15.9994e-3,
    "AR": 39.948e-3,
}

DEFAULT_TEMPERATURES = (300.0, 1000.0, 5000.0)
DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@dataclass(frozen=True)
class ThermoDatabase:
    species: dict[str, SpeciesThermo] = field(default_factory=dict)
    temperatures: tuple[float, float, float] = DEFAULT_TEMPERATURES

    def __len__(self) -> int:
        return len(self.species)

    @property
    def names(self) -> list[str]:
        return list(self.species)


def read_input(value: str) -> str:
    """Read from file if value starts with @ or names an existing file, otherwise return as-is."""
    path = value[1:] if value.startswith("@") else value
    if value.startswith("@") or Path(path).is_file():
        try:
            with open(path, "r", encoding="utf-8", errors="replace") as f:
                return f.read()
        except FileNotFoundError:
            raise ThermoFileNotFound(f"thermo file not found: {path}") from None
        except OSError as e:
            raise ThermoFileNotFound(f"cannot read thermo file {path}: {e}") from None
    return value


def _number(text: str, what: str, species: str) -> float:
    token = text.strip().upper().replace("D", "E")
    try:
        value = float(token)
    except ValueError:
        raise BadNumber(f"{species}: cannot parse {what} field {text!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise BadNumber(f"{species}: non-finite {what} field {text!r}")
    return value


def _marker(line: str) -> str:
    """Record line number marker in column 80 (or the last non-blank character)."""
    if len(line) >= 80:
        return line[79]
    stripped = line.rstrip()
    return stripped[-1] if stripped else ""


def _parse_elements(line: str, name: str) -> tuple[tuple[str, float], ...]:
    elements = []
    chunks = [line[i:i + 5] for i in range(24, 44, 5)]
    if len(line) > 78:
        chunks.append(line[73:78])
    for chunk in chunks:
        symbol, count = chunk[:2].strip().upper(), chunk[2:].strip()
        if not symbol or symbol == "0":
            continue
        n = _number(count or "0", "element count", name)
        if n != 0:
            elements.append((symbol, n))
    return tuple(elements)


def molar_mass(elements: tuple[tuple[str, float], ...], name: str) -> float:
    """Molar mass (kg/mol) from an element composition."""
    total = 0.0
    for symbol, count in elements:
        if symbol not in ATOMIC_MASS:
            raise MalformedRecord(
                f"{name}: unknown element {symbol!r}",
                hint="Pass a molar-mass override for this species.",
            )
        total += ATOMIC_MASS[symbol] * count
    return total


def _coefficients(lines: list[str], name: str) -> list[float]:
    values = []
    for row, line in enumerate(lines, start=2):
        count = 5 if row < 4 else 4
        padded = line.ljust(75)
        for k in range(count):
            values.append(_number(padded[15 * k:15 * (k + 1)], f"line {row} coefficient {k + 1}", name))
    return values


def _build_species(
    name: str,
    header: str,
    coeff_lines: list[str],
    defaults: tuple[float, float, float],
    overrides: dict[str, float],
) -> SpeciesThermo:
    padded = header.ljust(80)
    T_low = _number(padded[45:55], "T_low", name) if padded[45:55].strip() else defaults[0]
    T_high = _number(padded[55:65], "T_high", name) if padded[55:65].strip() else defaults[2]
    T_mid = _number(padded[65:73], "T_common", name) if padded[65:73].strip() else defaults[1]
    if not (T_low < T_high and T_low <= T_mid <= T_high):
        raise MalformedRecord(f"{name}: inconsistent temperature ranges {T_low}, {T_mid}, {T_high}")

    c = _coefficients(coeff_lines, name)
    high, low = tuple(c[0:7]), tuple(c[7:14])
    intervals = [
        ThermoInterval(T_low, T_mid, low),
        ThermoInterval(T_mid, T_high, high),
    ]
    intervals = tuple(iv for iv in intervals if iv.T_high > iv.T_low)

    elements = _parse_elements(padded, name)
    W = overrides.get(name)
    if W is None:
        W = molar_mass(elements, name)
    try:
        record = SpeciesThermo(name=name, W=W, intervals=intervals, elements=elements)
    except ThermoError as e:
        raise MalformedRecord(str(e)) from None
    if not record.cv_positive():
        raise MalformedRecord(f"{name}: cp/R <= 1 somewhere in range (cv must stay positive)")
    return record


def parse_thermo_file(text: str, overrides: dict[str, float] | None = None) -> ThermoDatabase:
    """
    Parse a THERMO section in CHEMKIN fixed-column format.

    Args:
        text: File contents
        overrides: Optional species name -> molar mass (kg/mol)

    Returns:
        ThermoDatabase keyed by species name

    Raises:
        MalformedRecord, BadNumber, DuplicateSpecies
    """
    if text.lstrip().startswith("{"):
        return parse_thermo_json(text, overrides)
    overrides = overrides or {}
    lines = [ln.rstrip("\r\n") for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("!")]

    pos = 0
    if pos < len(lines) and lines[pos].strip().upper().startswith("THERMO"):
        pos += 1
        parts = lines[pos].split() if pos < len(lines) else []
        if len(parts) >= 3 and _marker(lines[pos]) != "1":
            defaults = tuple(_number(p, "default temperature", "header") for p in parts[:3])
            pos += 1
        else:
            defaults = DEFAULT_TEMPERATURES
    else:
        defaults = DEFAULT_TEMPERATURES

    species: dict[str, SpeciesThermo] = {}
    while pos < len(lines):
        line = lines[pos]
        if line.strip().upper().startswith("END"):
            break
        name = line[:18].split()[0] if line[:18].split() else ""
        if not name or _marker(line) != "1":
            raise MalformedRecord(f"line {pos + 1}: expected a record header marked '1', got {line[:40]!r}")
        block = lines[pos + 1:pos + 4]
        for expected, row in enumerate(block, start=2):
            if _marker(row) != str(expected):
                raise MalformedRecord(f"{name}: line {expected} of the record is missing or mismarked")
        if len(block) < 3:
            raise MalformedRecord(f"{name}: record has {len(block) + 1} lines, expected 4")
        if name in species:
            raise DuplicateSpecies(f"{name}: defined more than once")
        species[name] = _build_species(name, line, block, defaults, overrides)
        pos += 4

    log.debug("parsed %d species", len(species))
    return ThermoDatabase(species=species, temperatures=defaults)


def parse_thermo_json(text: str, overrides: dict[str, float] | None = None) -> ThermoDatabase:
    """
    Parse the key-value format used for fictitious species.

    {"SPECIES": {"W": 10.0, "intervals": [[T_low, T_high, [a0, a1, a2, a3, a4, b1, b2]]]}}
    """
    overrides = overrides or {}
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, RecursionError) as e:
        raise MalformedRecord(f"invalid JSON thermo data: {e}") from None
    if not isinstance(data, dict):
        raise MalformedRecord("JSON thermo data must be an object keyed by species name")

    species = {}
    for raw_name, entry in data.items():
        name = str(raw_name).strip()
        if name in species:
            raise DuplicateSpecies(f"{name}: defined more than once")
        if not isinstance(entry, dict) or "intervals" not in entry:
            raise MalformedRecord(f"{name}: expected an object with 'W' and 'intervals'")
        try:
            intervals = tuple(
                ThermoInterval(float(lo), float(hi), tuple(float(a) for a in coeffs))
                for lo, hi, coeffs in entry["intervals"]
            )
            W = float(overrides.get(name, entry.get("W", 0.0)))
            species[name] = SpeciesThermo(name=name, W=W, intervals=intervals)
        except (TypeError, ValueError) as e:
            raise BadNumber(f"{name}: {e}") from None
        except ThermoError as e:
            raise MalformedRecord(str(e)) from None
        if not species[name].cv_positive():
            raise MalformedRecord(f"{name}: cp/R <= 1 somewhere in range (cv must stay positive)")
    return ThermoDatabase(species=species)


def lookup(db: ThermoDatabase, name: str) -> SpeciesThermo:
    key = name.strip()
    if key not in db.species:
        raise SpeciesNotFound(f"species {key!r} not found; available: {', '.join(db.names)}")
    return db.species[key]


def serialize_thermo(db: ThermoDatabase) -> str:
    """
    Write a database back to text that parse_thermo_file reads.

    CHEMKIN records carry no molar mass, only element counts, so a database
    with any species lacking elements (the JSON fictitious species) is
    written in the JSON form instead.
    """
    if any(not s.elements for s in db.species.values()):
        return serialize_thermo_json(db)
    out = ["THERMO", "".join(f"{t:10.3f}" for t in db.temperatures)]
    for s in db.species.values():
        low = s.intervals[0]
        high = s.intervals[-1]
        T_mid = low.T_high if len(s.intervals) > 1 else s.T_max
        elements = "".join(f"{sym:<2}{int(round(n)):>3d}" for sym, n in s.elements[:4])
        header = f"{s.name:<18}{'':6}{elements:<20}G{s.T_min:10.3f}{s.T_max:10.3f}{T_mid:8.3f}"
        out.append(f"{header:<79}1")
        c = list(high.coeffs) + list(low.coeffs)
        rows = [c[0:5], c[5:10], c[10:14]]
        for row_no, row in enumerate(rows, start=2):
            body = "".join(f"{x:15.8E}" for x in row)
            out.append(f"{body:<79}{row_no}")
    out.append("END")
    return "\n".join(out) + "\n"


def serialize_thermo_json(db: ThermoDatabase) -> str:
    data = {
        s.name: {
            "W": s.W,
            "intervals": [[iv.T_low, iv.T_high, list(iv.coeffs)] for iv in s.intervals],
        }
        for s in db.species.values()
    }
    return json.dumps(data, indent=2) + "\n"


def load_database(path: str | Path, overrides: dict[str, float] | None = None) -> ThermoDatabase:
    """Parse a thermo file from disk; relative names fall back to the shipped data directory."""
    p = Path(path)
    if not p.is_file() and (DATA_DIR / p).is_file():
        p = DATA_DIR / p
    if not p.is_file():
        raise ThermoFileNotFound(f"thermo file not found: {path}")
    text = p.read_text(encoding="utf-8", errors="replace")
    return parse_thermo_file(text, overrides)


def inspect_thermo(
    text: str,
    species: list[str] | None = None,
    temperature: float | None = None,
    R0: float = R_UNIVERSAL,
) -> dict[str, Any]:
    """Parse thermo text and summarize (optionally evaluate) its species."""
    try:
        db = parse_thermo_file(text)
        names = species or db.names
        records = []
        for name in names:
            s = lookup(db, name)
            entry = {
                "name": s.name,
                "W": s.W,
                "T_range": [s.T_min, s.T_max],
                "intervals": len(s.intervals),
                "elements": dict(s.elements),
            }
            if temperature is not None:
                cp, h, u = species_properties(temperature, s, R0)
                entry.update({"T": temperature, "cp": float(cp), "h": float(h), "u": float(u)})
            records.append(entry)
        return {"success": True, "count": len(db), "species": records}
    except DGError as e:
        return {"success": False, "error": str(e), "hint": e.hint}


def format_text(result: dict) -> str:
    if not result.get("success"):
        return f"Error: {result['error']}\nHint: {result.get('hint', '')}"
    lines = [f"Species: {result['count']}", ""]
    for s in result["species"]:
        lines.append(f"  {s['name']:<12} W={s['W']:.6g}  T=[{s['T_range'][0]:g}, {s['T_range'][1]:g}]")
        if "cp" in s:
            lines.append(f"    at T={s['T']:g}: cp={s['cp']:.6g}  h={s['h']:.6g}  u={s['u']:.6g}")
    return "\n".join(lines)


def main():
    parser = argparse.ArgumentParser(
        description="Inspect a NASA-7 thermo file (CHEMKIN fixed-column or JSON)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # List species in the shipped database
  uv run thermo_parser.py ../data/thermo.dat

  # Evaluate N2 at 300 K
  uv run thermo_parser.py ../data/thermo.dat -s N2 -T 300

  # Nondimensional fictitious species (R0 = 1)
  uv run thermo_parser.py ../data/gaussian_species.json --r0 1 -T 2
        """,
    )
    parser.add_argument("thermo", help="Thermo file path, @filepath, or inline text")
    parser.add_argument("--species", "-s", action="append", help="Species to report (repeatable)")
    parser.add_argument("--temperature", "-T", type=float, help="Evaluate cp, h, u at this temperature")
    parser.add_argument("--r0", type=float, default=R_UNIVERSAL, help="Universal gas constant (default: SI)")
    parser.add_argument("--format", "-f", choices=["json", "text"], default="json", help="Output format")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="Increase log verbosity")

    args = parser.parse_args()
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        text = read_input(args.thermo)
    except DGError as e:
        result = {"success": False, "error": str(e), "hint": e.hint}
    else:
        result = inspect_thermo(text, args.species, args.temperature, args.r0)

    if args.format == "text":
        print(format_text(result))
    else:
        print(json.dumps(result, indent=2))
    sys.exit(0 if result.get("success") else 1)


if __name__ == "__main__":
    main()
