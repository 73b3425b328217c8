##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Reads and writes function files, perturbation files and CSV outputs. Function and perturbation #
# files are JSON documents validated by pydantic models; every element string is checked with    #
# the exact field parser before anything is built from it.                                       #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import csv
import os
from typing import Annotated, Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, BeforeValidator, Field, field_validator, model_validator

from src.errors import InputError
from src.exactfield import DEFAULT_D, format_element, parse_element
from src.microperturb import CrazyPerturbation, DenseGroup, MicroPiece
from src.pwfunction import BreakpointDatum, PiecewiseFunction
from utils.logs_config import logger

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


def _as_text(value: Any) -> Any:
    # integers are accepted as element text ("0", "1")
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return value


ElementText = Annotated[str, BeforeValidator(_as_text)]


def _check_element(text: Optional[str]) -> Optional[str]:
    if text is not None:
        parse_element(text)
    return text


class RowModel(BaseModel):
    """One breakpoint row; omitted limits equal the value."""

    x: ElementText
    value: ElementText
    left: Optional[ElementText] = None
    right: Optional[ElementText] = None
    slope: Optional[ElementText] = None

    @field_validator("x", "value", "left", "right", "slope")
    @classmethod
    def _elements(cls, value: Optional[str]) -> Optional[str]:
        return _check_element(value)

    def datum(self, d: int) -> BreakpointDatum:
        value = parse_element(self.value, d)
        left = value if self.left is None else parse_element(self.left, d)
        right = value if self.right is None else parse_element(self.right, d)
        return BreakpointDatum(parse_element(self.x, d), value, left, right)

    def texts(self) -> List[str]:
        return [t for t in (self.x, self.value, self.left, self.right, self.slope) if t is not None]


def _check_radicands(texts: Sequence[str], d: int) -> None:
    for text in texts:
        element = parse_element(text, d)
        if not element.is_rational() and element.d != d:
            raise ValueError(f"element {text!r} uses sqrt({element.d}) but the file declares d = {d}")


class FunctionFile(BaseModel):
    """Function-definition document: d, f, rows and an optional closing row at x = 1."""

    d: int = DEFAULT_D
    f: ElementText
    name: str = ""
    rows: List[RowModel] = Field(min_length=1)
    closing: Optional[RowModel] = None

    @field_validator("f")
    @classmethod
    def _f(cls, value: str) -> str:
        parse_element(value)
        return value

    @model_validator(mode="after")
    def _same_field(self) -> "FunctionFile":
        texts = [self.f] + [t for row in self.rows for t in row.texts()]
        if self.closing is not None:
            texts += self.closing.texts()
        _check_radicands(texts, self.d)
        return self

    def to_function(self) -> PiecewiseFunction:
        slopes = None
        if any(row.slope is not None for row in self.rows):
            slopes = [None if row.slope is None else parse_element(row.slope, self.d) for row in self.rows]
        closing = None if self.closing is None else self.closing.datum(self.d)
        return PiecewiseFunction(parse_element(self.f, self.d), [row.datum(self.d) for row in self.rows], slopes=slopes, closing=closing, name=self.name, d=self.d)

    @classmethod
    def from_function(cls, pi: PiecewiseFunction) -> "FunctionFile":
        closing = None
        if pi.closing is not None:
            c = pi.closing
            closing = RowModel(
                x=format_element(c.x),
                value=format_element(c.value),
                left=None if c.left_limit == c.value else format_element(c.left_limit),
                right=None if c.right_limit == c.value else format_element(c.right_limit),
            )
        return cls(d=pi.d, f=format_element(pi.f), name=pi.name, rows=[RowModel(**row) for row in pi.to_rows()], closing=closing)


class CosetModel(BaseModel):
    b: ElementText
    c: ElementText

    @field_validator("b", "c")
    @classmethod
    def _elements(cls, value: str) -> str:
        parse_element(value)
        return value


class PieceModel(BaseModel):
    interval: Tuple[ElementText, ElementText]
    cosets: List[CosetModel] = Field(min_length=1)

    @field_validator("interval")
    @classmethod
    def _interval(cls, value: Tuple[str, str]) -> Tuple[str, str]:
        for text in value:
            parse_element(text)
        return value


class PerturbationFile(BaseModel):
    """Perturbation document: pwl part, generators of T and micro pieces."""

    d: int = DEFAULT_D
    name: str = ""
    pwl: FunctionFile
    group: List[ElementText] = Field(min_length=1)
    pieces: List[PieceModel] = Field(default_factory=list)

    @field_validator("group")
    @classmethod
    def _group(cls, value: List[str]) -> List[str]:
        for text in value:
            parse_element(text)
        return value

    @model_validator(mode="after")
    def _same_field(self) -> "PerturbationFile":
        texts = list(self.group) + [t for piece in self.pieces for t in piece.interval] + [t for piece in self.pieces for co in piece.cosets for t in (co.b, co.c)]
        _check_radicands(texts, self.d)
        return self

    def to_perturbation(self) -> CrazyPerturbation:
        d = self.d
        pieces = [
            MicroPiece(parse_element(piece.interval[0], d), parse_element(piece.interval[1], d), tuple((parse_element(co.b, d), parse_element(co.c, d)) for co in piece.cosets))
            for piece in self.pieces
        ]
        group = DenseGroup([parse_element(t, d) for t in self.group], d=d)
        return CrazyPerturbation(self.pwl.to_function(), pieces, group, name=self.name)

    @classmethod
    def from_perturbation(cls, p: CrazyPerturbation) -> "PerturbationFile":
        pieces = [
            PieceModel(interval=(format_element(piece.lo), format_element(piece.hi)), cosets=[CosetModel(b=format_element(b), c=format_element(c)) for b, c in piece.cosets])
            for piece in p.pieces
        ]
        return cls(d=p.pwl.d, name=p.name, pwl=FunctionFile.from_function(p.pwl), group=[format_element(t) for t in p.group.generators], pieces=pieces)


def _read_text(file_path: str) -> str:
    with open(file_path, mode="r", encoding="utf-8-sig") as f:
        return f.read()


def _write_text(file_path: str, text: str) -> None:
    os.makedirs(os.path.dirname(file_path) or ".", exist_ok=True)
    with open(file_path, mode="w", encoding="utf-8") as f:
        f.write(text + "\n")


def load_function_file(file_path: str) -> PiecewiseFunction:
    """
    Read and validate a function file.

    Raises FileNotFoundError, pydantic.ValidationError for schema or element syntax problems and
    InputError when the rows do not describe a function on [0, 1).
    """
    pi = FunctionFile.model_validate_json(_read_text(file_path)).to_function()
    logger.debug(f"Function file loaded → {file_path} ({pi.n} breakpoints)")
    return pi


def load_perturbation_file(file_path: str, d: Optional[int] = None) -> CrazyPerturbation:
    """
    Read and validate a perturbation file; with `d`, the file must declare the same field.
    """
    document = PerturbationFile.model_validate_json(_read_text(file_path))
    if d is not None and document.d != d:
        raise InputError(f"perturbation file {file_path} declares d = {document.d} but the function is over sqrt({d})")
    p = document.to_perturbation()
    logger.debug(f"Perturbation file loaded → {file_path} ({len(p.pieces)} micro pieces)")
    return p


def save_function_file(pi: PiecewiseFunction, file_path: str) -> None:
    _write_text(file_path, FunctionFile.from_function(pi).model_dump_json(indent=2, exclude_none=True))
    logger.info(f"Function file written successfully → {file_path}")


def save_perturbation_file(p: CrazyPerturbation, file_path: str) -> None:
    _write_text(file_path, PerturbationFile.from_perturbation(p).model_dump_json(indent=2, exclude_none=True))
    logger.info(f"Perturbation file written successfully → {file_path}")


def write_output_csv(file_path: str, data: List[Dict[str, Any]]) -> None:
    """
    Write rows to a UTF-8 CSV file, columns in the key order of the first row.
    """
    if not data:
        logger.warning("No data to write to output CSV.")
        return

    os.makedirs(os.path.dirname(file_path) or ".", exist_ok=True)

    # Preserve key order from the first row
    fieldnames = list(data[0].keys())

    with open(file_path, mode="w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, extrasaction="ignore")
        writer.writeheader()
        for row in data:
            writer.writerow(row)

    logger.info(f"Output CSV written successfully → {file_path}")

