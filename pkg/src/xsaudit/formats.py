"""Flat result records and table rendering.

JSON Lines and CSV carry the same fields and parse back into identical
:class:`TestResult` objects. Floats are written with ``repr`` so they
round-trip exactly.
"""

from __future__ import annotations

import csv
import enum
import io
import json

from .battery import TestResult

SCHEMA_VERSION = 1

FIELDS = (
    "schema",
    "generator",
    "lane",
    "seed",
    "test",
    "params",
    "statistic",
    "p",
    "log10_p",
    "log10_1mp",
    "verdict",
    "counts",
    "detail",
)


class OutputFormat(enum.Enum):
    HUMAN = "human"
    MARKDOWN = "markdown"
    CSV = "csv"
    JSONL = "jsonl"


def flat_record(r: TestResult) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "generator": r.generator,
        "lane": r.lane,
        "seed": r.seed,
        "test": r.test,
        "params": dict(r.params),
        "statistic": r.statistic,
        "p": r.p_value,
        "log10_p": r.log10_p,
        "log10_1mp": r.log10_1mp,
        "verdict": r.verdict.value,
        "counts": list(r.counts),
        "detail": dict(r.detail),
    }


def from_flat_record(rec: dict) -> TestResult:
    if int(rec.get("schema", SCHEMA_VERSION)) != SCHEMA_VERSION:
        raise ValueError(f"unsupported record schema {rec.get('schema')!r}")
    return TestResult.from_record(
        {
            "test": rec["test"],
            "params": dict(rec["params"]),
            "statistic": float(rec["statistic"]),
            "p_value": float(rec["p"]),
            "log10_p": float(rec["log10_p"]),
            "log10_1mp": float(rec["log10_1mp"]),
            "verdict": rec["verdict"],
            "counts": tuple(rec["counts"]),
            "detail": dict(rec["detail"]),
            "generator": rec["generator"],
            "lane": rec["lane"],
            "seed": None if rec["seed"] in (None, "") else int(rec["seed"]),
        }
    )


def jsonl_line(r: TestResult) -> str:
    return json.dumps(flat_record(r), sort_keys=True) + "\n"


def parse_jsonl(text: str) -> list[TestResult]:
    return [from_flat_record(json.loads(line)) for line in text.splitlines() if line.strip()]


# CSV cells: dicts as "k=v;k=v", lists as "a;b;c"


def _encode_scalar(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _decode_scalar(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _encode_dict(d: dict) -> str:
    return ";".join(f"{k}={_encode_scalar(v)}" for k, v in d.items())


def _decode_dict(text: str) -> dict:
    out = {}
    for item in filter(None, text.split(";")):
        k, _, v = item.partition("=")
        out[k] = _decode_scalar(v)
    return out


def csv_text(results, header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(FIELDS)
    for r in results:
        rec = flat_record(r)
        rec["params"] = _encode_dict(rec["params"])
        rec["detail"] = _encode_dict(rec["detail"])
        rec["counts"] = ";".join(str(c) for c in rec["counts"])
        rec["seed"] = "" if rec["seed"] is None else rec["seed"]
        w.writerow([_encode_scalar(rec[f]) for f in FIELDS])
    return buf.getvalue()


def parse_csv(text: str) -> list[TestResult]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        row["params"] = _decode_dict(row["params"])
        row["detail"] = _decode_dict(row["detail"])
        row["counts"] = [int(c) for c in row["counts"].split(";") if c]
        out.append(from_flat_record(row))
    return out


# -- rendering ------------------------------------------------------------------


def _fmt_p(r: TestResult) -> tuple[str, str]:
    def one(log10: float, linear: float) -> str:
        return f"{linear:.4g}" if log10 > -300 else f"1e{log10:.1f}"

    return one(r.log10_p, r.p_value), one(r.log10_1mp, 1.0 - r.p_value)


def _text_table(header, rows) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _md_table(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(x) for x in row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def render_results(results, fmt: OutputFormat) -> str:
    results = list(results)
    if fmt is OutputFormat.JSONL:
        return "".join(jsonl_line(r) for r in results)
    if fmt is OutputFormat.CSV:
        return csv_text(results)
    header = ("generator", "lane", "seed", "test", "params", "statistic", "p", "1-p", "verdict")
    rows = []
    for r in results:
        p, q = _fmt_p(r)
        params = " ".join(f"{k}={v}" for k, v in r.params.items())
        rows.append((r.generator, r.lane, r.seed, r.test, params, f"{r.statistic:.4g}", p, q, r.verdict.value))
    if fmt is OutputFormat.MARKDOWN:
        return _md_table(header, rows)
    return _text_table(header, rows)


def render_summary(rows, fmt: OutputFormat) -> str:
    """Render summary rows (generator, lane, failed tests)."""
    if fmt is OutputFormat.JSONL:
        return "".join(
            json.dumps({"generator": r.generator, "lane": r.lane, "failed": list(r.failed)}) + "\n"
            for r in rows
        )
    if fmt is OutputFormat.CSV:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("generator", "lane", "failed"))
        for r in rows:
            w.writerow((r.generator, r.lane, ";".join(r.failed)))
        return buf.getvalue()
    header = ("Generator", "Lane", "Failed systematically")
    body = [(r.generator, r.lane, ", ".join(r.failed) or "none") for r in rows]
    if fmt is OutputFormat.MARKDOWN:
        return _md_table(header, body)
    return _text_table(header, body)
