"""Replication-project data: loading, per-study analysis and table formatting.

Effects are analysed on the Fisher-z scale: a correlation ``r`` from ``n``
observations becomes ``theta = atanh(r)`` with standard error
``1 / sqrt(n - 3)``.  Studies given directly as ``(theta, se)`` pairs are
supported too.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .core import StudyPair, sceptical_pvalues
from .design import DesignRequest, conditional_power, required_relative_sample_size
from .exceptions import InfeasibleError, ParseError, ScepticalError, ValidationError
from .methods import Method
from .numerics import std_normal_sf

__all__ = [
    "CORRELATION_COLUMNS",
    "EFFECT_COLUMNS",
    "StudyRecord",
    "AnalysisRow",
    "load_studies",
    "parse_studies",
    "dump_studies",
    "analyze_studies",
    "ANALYSIS_FIELDS",
    "round_half_away",
    "format_p",
    "format_fixed",
    "format_row",
]

CORRELATION_COLUMNS = ("study", "r_o", "n_o", "r_r", "n_r")
EFFECT_COLUMNS = ("study", "theta_o", "se_o", "theta_r", "se_r")


@dataclass(frozen=True)
class StudyRecord:
    """One original/replication pair.  Derived quantities are properties and
    always recomputed from the stored inputs."""

    study_id: str
    theta_o: float
    se_o: float
    theta_r: float
    se_r: float
    r_o: float | None = None
    n_o: int | None = None
    r_r: float | None = None
    n_r: int | None = None

    def __post_init__(self):
        for name in ("theta_o", "theta_r", "se_o", "se_r"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{self.study_id}: {name} must be finite")
        for name in ("se_o", "se_r"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{self.study_id}: {name} must be positive")

    @classmethod
    def from_correlations(cls, study_id, r_o, n_o, r_r, n_r):
        for r, name in ((r_o, "r_o"), (r_r, "r_r")):
            if not (math.isfinite(r) and abs(r) < 1):
                raise ValidationError(f"{study_id}: |{name}| must be < 1, got {r}")
        for n, name in ((n_o, "n_o"), (n_r, "n_r")):
            if int(n) != n or n < 4:
                raise ValidationError(f"{study_id}: {name} must be an integer >= 4, got {n}")
        return cls(study_id, math.atanh(r_o), 1 / math.sqrt(n_o - 3),
                   math.atanh(r_r), 1 / math.sqrt(n_r - 3),
                   r_o=float(r_o), n_o=int(n_o), r_r=float(r_r), n_r=int(n_r))

    @property
    def z_o(self):
        return self.theta_o / self.se_o

    @property
    def z_r(self):
        return self.theta_r / self.se_r

    @property
    def p_o(self):
        return std_normal_sf(self.z_o)

    @property
    def p_r(self):
        return std_normal_sf(self.z_r)

    @property
    def c(self):
        """Variance ratio; ``(n_r - 3) / (n_o - 3)`` for correlations."""
        if self.n_o is not None:
            return (self.n_r - 3) / (self.n_o - 3)
        return (self.se_o / self.se_r) ** 2

    def pair(self):
        return StudyPair(self.z_o, self.z_r, self.c)


@dataclass(frozen=True)
class AnalysisRow:
    study_id: str
    theta_o: float
    theta_r: float
    se_o: float
    se_r: float
    z_o: float
    z_r: float
    p_o: float
    p_r: float
    c: float
    power_2tr: float
    c_star: float | None
    p_max: float
    p_s_star: float
    success_2tr: bool
    success_sceptical: bool
    note: str = ""

    def as_dict(self):
        return asdict(self)


# --------------------------------------------------------------------------
# reading and writing
# --------------------------------------------------------------------------

def _number(text, line, col, kind=float):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line=line, column=col) from None
    if kind is int:
        if not value.is_integer():
            raise ParseError(f"not an integer: {text!r}", line=line, column=col)
        return int(value)
    return value


def parse_studies(text):
    """Parse CSV text with either the correlation or the effect header."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty input", line=1, column=1) from None
    if tuple(header) == CORRELATION_COLUMNS:
        kinds = (str, float, int, float, int)
    elif tuple(header) == EFFECT_COLUMNS:
        kinds = (str, float, float, float, float)
    else:
        raise ParseError(
            f"header must be {','.join(CORRELATION_COLUMNS)} or {','.join(EFFECT_COLUMNS)}",
            line=1, column=1,
        )
    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}",
                             line=line, column=min(len(row), len(header)) + 1)
        study = row[0].strip()
        if not study:
            raise ParseError("empty study name", line=line, column=1)
        values = [_number(cell.strip(), line, col, kind)
                  for col, (cell, kind) in enumerate(zip(row[1:], kinds[1:]), start=2)]
        try:
            if kinds[2] is int:
                records.append(StudyRecord.from_correlations(study, *values))
            else:
                records.append(StudyRecord(study, values[0], values[1], values[2], values[3]))
        except ValidationError as exc:
            raise ValidationError(f"line {line}: {exc}") from None
    return records


def load_studies(path):
    """Read study pairs from a UTF-8 CSV file; row order is preserved."""
    return parse_studies(Path(path).read_text(encoding="utf-8"))


def dump_studies(records):
    """CSV text for ``records`` (correlation columns when every record has
    them, effect columns otherwise).  Floats use their shortest exact repr,
    so loading the output gives back identical values."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if all(r.n_o is not None for r in records):
        writer.writerow(CORRELATION_COLUMNS)
        for r in records:
            writer.writerow([r.study_id, repr(r.r_o), r.n_o, repr(r.r_r), r.n_r])
    else:
        writer.writerow(EFFECT_COLUMNS)
        for r in records:
            writer.writerow([r.study_id, repr(r.theta_o), repr(r.se_o),
                             repr(r.theta_r), repr(r.se_r)])
    return out.getvalue()


# --------------------------------------------------------------------------
# analysis
# --------------------------------------------------------------------------

def analyze_studies(records, alpha=0.025):
    """Per-study comparison of the two-trials rule and the controlled
    sceptical p-value.

    ``power_2tr`` is the conditional power for replication significance at
    the actual ``c``; ``c_star`` is the relative sample size giving the same
    conditional power with the sceptical p-value.  A study whose design
    cannot be computed keeps ``c_star = None`` and explains why in ``note``.
    """
    rows = []
    for rec in records:
        pair = rec.pair()
        res = sceptical_pvalues(pair)
        p_max = max(rec.p_o, rec.p_r)
        c_star, note, power = None, "", float("nan")
        try:
            power = conditional_power(rec.z_o, rec.c, alpha, Method.TWO_TRIALS)
            c_star = required_relative_sample_size(
                DesignRequest(rec.z_o, alpha, power)).c_required
        except InfeasibleError as exc:
            note = f"infeasible: {exc}"
        except ScepticalError as exc:
            note = f"error: {exc}"
        rows.append(AnalysisRow(
            study_id=rec.study_id, theta_o=rec.theta_o, theta_r=rec.theta_r,
            se_o=rec.se_o, se_r=rec.se_r, z_o=rec.z_o, z_r=rec.z_r,
            p_o=rec.p_o, p_r=rec.p_r, c=rec.c, power_2tr=power, c_star=c_star,
            p_max=p_max, p_s_star=res.p_s_star,
            success_2tr=bool(rec.z_o > 0 and rec.z_r > 0 and p_max <= alpha),
            success_sceptical=bool(res.p_s_star <= alpha), note=note,
        ))
    return rows


ANALYSIS_FIELDS = tuple(f.name for f in fields(AnalysisRow))


# --------------------------------------------------------------------------
# printed precision
# --------------------------------------------------------------------------

def round_half_away(x, digits):
    """Round to ``digits`` decimals, halves away from zero."""
    q = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def format_fixed(x, digits):
    return f"{round_half_away(x, digits):.{digits}f}"


def format_p(p, censor=1e-4):
    """p-value display: ``< 0.0001`` below ``censor``, one significant digit
    below 0.01 and two otherwise (trailing zeros dropped)."""
    if p < censor:
        return f"< {censor:g}"
    sig = 1 if p < 0.01 else 2
    digits = sig - 1 - math.floor(math.log10(p))
    value = round_half_away(p, digits)
    # rounding can carry into the next decade, e.g. 0.0096 -> 0.01
    text = f"{value:.{max(digits, 0)}f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def format_row(row):
    """Table columns of an :class:`AnalysisRow` at printed precision."""
    return {
        "study": row.study_id,
        "theta_o": format_fixed(row.theta_o, 2),
        "theta_r": format_fixed(row.theta_r, 2),
        "p_o": format_p(row.p_o),
        "p_r": format_p(row.p_r),
        "power": format_fixed(100 * row.power_2tr, 1),
        "c": format_fixed(row.c, 1),
        "c_star": "" if row.c_star is None else format_fixed(row.c_star, 1),
        "p_max": format_p(row.p_max),
        "p_s_star": format_p(row.p_s_star),
    }
