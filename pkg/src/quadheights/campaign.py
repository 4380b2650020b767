"""Bound constants, point literals, and family campaigns with CSV/JSON reports."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import mpmath

from .arrangements import arrangement_from_json
from .generators import (
    BinaryFormPair,
    StreamPoint,
    excon_config,
    excon_points,
    exinf_config,
    exinf_points,
    unit_fibers,
)
from .heights import (
    Arrangement,
    HyperForm,
    ProjPoint,
    ZeroHeight,
    canonicalize,
    has_zero_height,
    height,
    proximity,
)
from .numfield import DEFAULT_PREC, GUARD_BITS, PlaceSet, QuadElem, QuadField
from .sampling import random_point

log = logging.getLogger(__name__)

CSV_COLUMNS = ("family", "u", "d", "coords", "h", "m", "ratio", "defect_vs_target")
DIGITS = 30


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# bound constants


def galg_bound(delta: int, m: int, n: int) -> Fraction:
    """delta m (delta m - 1)(delta n + 1) / (delta m + delta n - 2)."""
    if delta < 1 or n < 1 or m < n or delta * m < 2:
        raise ValueError("need delta*m >= 2 and m >= n >= 1")
    dm, dn = delta * m, delta * n
    return Fraction(dm * (dm - 1) * (dn + 1), dm + dn - 2)


def genth_bound(delta: int, n: int) -> Fraction:
    """(delta n)^2 (delta n - 1) / (2 delta n - 3)."""
    if delta < 1 or n < 1 or 2 * delta * n - 3 <= 0:
        raise ValueError("need 2*delta*n - 3 > 0")
    dn = delta * n
    return Fraction(dn * dn * (dn - 1), 2 * dn - 3)


def ruwang_bound(delta: int, n: int) -> Fraction:
    """2 binom(n + delta, delta) - 2."""
    if delta < 1 or n < 1:
        raise ValueError("need delta, n >= 1")
    return Fraction(2 * math.comb(n + delta, delta) - 2)


@dataclass(frozen=True)
class BoundTable:
    delta: int
    m: int
    n: int
    roth: Fraction
    wirsing: Fraction
    conj_b: Fraction
    conj_a: Fraction
    quad_plane: Fraction
    quad_plane_lines: Fraction
    excon_line_exception: Fraction
    ruwang: Fraction
    galg: Fraction | None
    genth: Fraction | None

    def as_strings(self) -> dict[str, Any]:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in asdict(self).items()}


def bound_table(delta: int, n: int, m: int | None = None) -> BoundTable:
    m = n if m is None else m
    try:
        galg = galg_bound(delta, m, n)
    except ValueError:
        galg = None
    try:
        genth = genth_bound(delta, n)
    except ValueError:
        genth = None
    return BoundTable(
        delta, m, n,
        roth=Fraction(2),
        wirsing=Fraction(2 * delta),
        conj_b=Fraction(2 * delta * n),
        conj_a=Fraction(2 * delta + n - 1),
        quad_plane=Fraction(8),
        quad_plane_lines=Fraction(15, 2),
        excon_line_exception=Fraction(6),
        ruwang=ruwang_bound(delta, n),
        galg=galg,
        genth=genth,
    )


# ---------------------------------------------------------------------------
# literals


def _rat(x: Any) -> Fraction:
    if isinstance(x, bool):
        raise ValueError(f"not a number: {x!r}")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise ValueError(f"not a rational literal: {x!r}")


def parse_point(obj: Any, d: int | None = None) -> ProjPoint:
    """Point literal: a list of coordinates, or {"d": d, "coords": [...]}.

    A coordinate is an integer, a "p/q" string, or a pair [a, b] meaning
    a + b sqrt(d).
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    if isinstance(obj, dict):
        d = obj.get("d", d)
        obj = obj["coords"]
    K = QuadField(int(d)) if d not in (None, 1) else None
    xs = []
    for c in obj:
        if isinstance(c, list):
            a, b = (_rat(t) for t in c)
            if b and K is None:
                raise ValueError("quadratic coordinate needs d")
            xs.append(QuadElem(a, b, K if b else None))
        else:
            xs.append(QuadElem(_rat(c)))
    return canonicalize(xs)


def format_coords(P: ProjPoint) -> str:
    return ";".join(f"{x.a},{x.b}" for x in P.coords)


def parse_coords(text: str, d: int) -> ProjPoint:
    K = QuadField(d) if d != 1 else None
    xs = []
    for part in text.split(";"):
        a, b = (Fraction(t) for t in part.split(","))
        xs.append(QuadElem(a, b, K if b else None))
    return canonicalize(xs)


def parse_form(obj: Any) -> HyperForm:
    """Form literal: a list of integers (a linear form) or
    {"nvars": k, "degree": d, "coeffs": [...]} in descending-lex order."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if isinstance(obj, list):
        return HyperForm.linear([_rat(c) for c in obj])
    return HyperForm.from_coefficients(int(obj["nvars"]), int(obj["degree"]),
                                       [_rat(c) for c in obj["coeffs"]])


def fmt(x: mpmath.mpf) -> str:
    return mpmath.nstr(x, DIGITS)


# ---------------------------------------------------------------------------
# configuration


GENERATORS = ("exinf", "excon", "unit_fibers", "random")


@dataclass
class CampaignConfig:
    family: str
    generator: dict[str, Any]
    S: PlaceSet
    max_exp: int = 10
    precision: int = DEFAULT_PREC
    target: Fraction | None = None
    epsilon: float = 0.1
    arrangement: list[list[int]] | None = None
    checks: dict[str, Any] = field(default_factory=dict)
    jobs: int = 1

    @classmethod
    def from_json(cls, text: str) -> "CampaignConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
        if not isinstance(raw, dict):
            raise ConfigError("line 1: top level must be a JSON object")
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "CampaignConfig":
        def need(key: str) -> Any:
            if key not in raw:
                raise ConfigError(f"field '{key}': missing")
            return raw[key]

        gen = need("generator")
        if not isinstance(gen, dict) or gen.get("type") not in GENERATORS:
            raise ConfigError(f"field 'generator.type': expected one of {GENERATORS}")
        try:
            S = PlaceSet.parse(need("S"))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"field 'S': {e}") from e
        known = {"family", "generator", "S", "max_exp", "precision", "target",
                 "epsilon", "arrangement", "checks", "jobs"}
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"field '{sorted(extra)[0]}': unknown field")
        try:
            target = Fraction(str(raw["target"])) if raw.get("target") is not None else None
        except ValueError as e:
            raise ConfigError(f"field 'target': {e}") from e
        for key in ("max_exp", "precision", "jobs"):
            if key in raw and (not isinstance(raw[key], int) or raw[key] < 0):
                raise ConfigError(f"field '{key}': expected a nonnegative integer")
        arr = raw.get("arrangement")
        if arr is not None:
            if not (isinstance(arr, list) and all(isinstance(r, list) and
                                                  all(isinstance(c, int) for c in r) for r in arr)):
                raise ConfigError("field 'arrangement': expected a list of integer coefficient lists")
        return cls(
            family=str(raw.get("family", gen["type"])),
            generator=gen,
            S=S,
            max_exp=raw.get("max_exp", 10),
            precision=raw.get("precision", DEFAULT_PREC),
            target=target,
            epsilon=float(raw.get("epsilon", 0.1)),
            arrangement=arr,
            checks=raw.get("checks", {}),
            jobs=raw.get("jobs", 1),
        )

    @classmethod
    def load(cls, path: str | Path) -> "CampaignConfig":
        return cls.from_json(Path(path).read_text())


def family_arrangement(cfg: CampaignConfig) -> Arrangement:
    """The arrangement D of a config: explicit, or the generator's own."""
    g = cfg.generator
    try:
        if cfg.arrangement is not None:
            return arrangement_from_json(cfg.arrangement)
        if g["type"] == "exinf":
            return exinf_config(int(g.get("n", 2)), int(g.get("delta", 1))).arrangement
        if g["type"] == "excon":
            return excon_config().arrangement
        if g["type"] == "unit_fibers":
            return Arrangement(_pair(g).divisor_forms())
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"field 'generator': {e}") from e
    raise ConfigError("field 'arrangement': required for the random generator")


def family_target(cfg: CampaignConfig) -> tuple[Fraction, int, int]:
    """(target constant c, delta, n); c defaults to the family's 2*delta*n-type value."""
    g = cfg.generator
    if g["type"] == "exinf":
        n, delta = int(g.get("n", 2)), int(g.get("delta", 1))
        t = Fraction(2 * delta * n)
    elif g["type"] == "excon":
        n, delta, t = 2, 2, Fraction(6)
    elif g["type"] == "unit_fibers":
        n, delta = 1, len(g["zeros"])
        t = Fraction(2 * delta)
    else:
        n, delta, t = int(g.get("n", 2)), 2, Fraction(8)
    return (cfg.target if cfg.target is not None else t), delta, n


def _pair(g: dict[str, Any]) -> BinaryFormPair:
    return BinaryFormPair(tuple(map(tuple, g["zeros"])), tuple(map(tuple, g["poles"])))


def family_points(cfg: CampaignConfig) -> list[StreamPoint]:
    """The generator's deterministic point stream, height-zero points removed."""
    g = cfg.generator
    prec = cfg.precision
    try:
        if g["type"] == "exinf":
            c = exinf_config(int(g.get("n", 2)), int(g.get("delta", 1)))
            return list(exinf_points(c, cfg.S, cfg.max_exp, prec, record_defect=False))
        if g["type"] == "excon":
            return list(excon_points(excon_config(), cfg.S, cfg.max_exp, prec, record_defect=False))
        if g["type"] == "unit_fibers":
            stream = unit_fibers(_pair(g), cfg.S, cfg.max_exp, prec, record_defect=False)
            return [sp for sp in stream if not has_zero_height(sp.point)]
        rng = random.Random(int(g.get("seed", 0)))
        n = int(g.get("n", 2))
        radicands = g.get("radicands", [-1, 2, -3, 5])
        count, bound = int(g.get("count", 200)), int(g.get("bound", 50))
        points: list[StreamPoint] = []
        while len(points) < count:
            P = random_point(rng, n, bound, rng.choice(radicands))
            if not has_zero_height(P):
                points.append(StreamPoint(P, Fraction(0), len(points)))
        return points
    except (KeyError, TypeError) as e:
        raise ConfigError(f"field 'generator': {e}") from e


@dataclass
class CampaignRecord:
    index: int
    family: str
    u: Fraction | None
    point: ProjPoint
    h: mpmath.mpf
    m: mpmath.mpf
    ratio: mpmath.mpf
    defect: mpmath.mpf

    def row(self) -> dict[str, str]:
        return {
            "family": self.family,
            "u": "" if self.u is None else str(self.u),
            "d": str(1 if self.point.field is None else self.point.field.d),
            "coords": format_coords(self.point),
            "h": fmt(self.h),
            "m": fmt(self.m),
            "ratio": fmt(self.ratio),
            "defect_vs_target": fmt(self.defect),
        }


def evaluate(arr: Arrangement, S: PlaceSet, P: ProjPoint, target: Fraction,
             prec: int) -> tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf, mpmath.mpf]:
    """(h, m, m/h, m - target*h) at extended precision."""
    if has_zero_height(P):
        raise ZeroHeight(f"{P} has height 0")
    with mpmath.workprec(prec + GUARD_BITS):
        h = height(P, prec)
        m = proximity(arr, S, P, prec)
        t = mpmath.mpf(target.numerator) / target.denominator
        return h, m, m / h, m - t * h


def _evaluate_job(args):
    idx, family, sp, arr, S, target, prec = args
    try:
        h, m, r, dfc = evaluate(arr, S, sp.point, target, prec)
    except (ArithmeticError, ValueError) as e:
        return idx, None, f"{type(e).__name__}: {e}"
    u = sp.u if family != "random" else None
    return idx, CampaignRecord(idx, family, u, sp.point, h, m, r, dfc), None


def run_family(cfg: CampaignConfig) -> tuple[list[CampaignRecord], list[dict[str, str]], Arrangement, Fraction, int, int]:
    arr = family_arrangement(cfg)
    target, delta, n = family_target(cfg)
    points = family_points(cfg)
    family = cfg.family
    gen_name = cfg.generator["type"]
    jobs = [(i, gen_name if gen_name == "random" else family, sp, arr, cfg.S, target, cfg.precision)
            for i, sp in enumerate(points)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            results = list(ex.map(_evaluate_job, jobs, chunksize=16))
    else:
        results = [_evaluate_job(j) for j in jobs]
    records, errors = [], []
    for idx, rec, err in sorted(results, key=lambda r: r[0]):
        if err is not None:
            log.warning("point %d (%s): %s", idx, points[idx].point, err)
            errors.append({"index": idx, "point": repr(points[idx].point), "error": err})
        else:
            rec.family = family
            records.append(rec)
    return records, errors, arr, target, delta, n


def summarize(cfg: CampaignConfig, records: Sequence[CampaignRecord], errors: Sequence[dict],
              target: Fraction, delta: int, n: int) -> dict[str, Any]:
    eps = mpmath.mpf(cfg.epsilon)
    t = mpmath.mpf(target.numerator) / target.denominator
    summary: dict[str, Any] = {
        "family": cfg.family,
        "generator": cfg.generator,
        "S": str(cfg.S),
        "max_exp": cfg.max_exp,
        "precision": cfg.precision,
        "target": str(target),
        "epsilon": cfg.epsilon,
        "points": len(records),
        "errors": list(errors),
        "bounds": bound_table(delta, n).as_strings(),
    }
    if records:
        with mpmath.workprec(cfg.precision + GUARD_BITS):
            summary.update(_stats(records, t, eps))
    summary["checks"] = run_checks(cfg.checks, records, cfg.precision)
    return summary


def _stats(records: Sequence[CampaignRecord], t: mpmath.mpf, eps: mpmath.mpf) -> dict[str, Any]:
    return {
        "max_ratio": fmt(max(r.ratio for r in records)),
        "min_ratio": fmt(min(r.ratio for r in records)),
        "min_defect": fmt(min(r.defect for r in records)),
        "max_defect": fmt(max(r.defect for r in records)),
        "fitted_constant": fmt(max(abs(r.defect) for r in records)),
        "max_height": fmt(max(r.h for r in records)),
        "ratio_above_target_minus_eps": sum(1 for r in records if r.ratio > t - eps),
    }


def run_checks(checks: dict[str, Any], records: Sequence[CampaignRecord],
               prec: int = DEFAULT_PREC) -> dict[str, Any]:
    """Optional assertions carried by a config.

    ``max_abs_defect``: every |m - c h| is at most this value.
    ``min_ratio``: {"h_min": H, "ratio": r}: m/h >= r whenever h >= H.
    ``min_points``: at least this many evaluated points.
    """
    with mpmath.workprec(prec + GUARD_BITS):
        return _run_checks(checks, records)


def _run_checks(checks: dict[str, Any], records: Sequence[CampaignRecord]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if "max_abs_defect" in checks:
        bound = mpmath.mpf(str(checks["max_abs_defect"]))
        worst = max((abs(r.defect) for r in records), default=mpmath.mpf(0))
        out["max_abs_defect"] = {"bound": str(checks["max_abs_defect"]),
                                 "observed": fmt(worst), "passed": bool(worst <= bound)}
    if "min_ratio" in checks:
        h_min = mpmath.mpf(str(checks["min_ratio"]["h_min"]))
        rmin = mpmath.mpf(str(checks["min_ratio"]["ratio"]))
        tall = [r for r in records if r.h >= h_min]
        worst = min((r.ratio for r in tall), default=None)
        out["min_ratio"] = {"h_min": str(h_min), "ratio": str(checks["min_ratio"]["ratio"]),
                            "points": len(tall),
                            "observed": None if worst is None else fmt(worst),
                            "passed": bool(tall) and bool(worst >= rmin)}
    if "min_points" in checks:
        out["min_points"] = {"bound": checks["min_points"], "observed": len(records),
                             "passed": len(records) >= int(checks["min_points"])}
    return out


def write_csv(records: Sequence[CampaignRecord], path: str | Path | None = None,
              timestamp: str | None = None) -> str:
    """CSV text (and file, when ``path`` is given); the first line is a
    ``# generated`` comment carrying the only nondeterministic content."""
    buf = io.StringIO()
    stamp = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    buf.write(f"# generated {stamp}\n")
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_csv(path: str | Path) -> list[dict[str, str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    return list(csv.DictReader(body))


def recompute_csv(path: str | Path, cfg: CampaignConfig) -> list[tuple[mpmath.mpf, mpmath.mpf]]:
    """(h, m) recomputed at full precision from the exact points stored in a CSV."""
    arr = family_arrangement(cfg)
    target, _, _ = family_target(cfg)
    out = []
    for row in read_csv(path):
        P = parse_coords(row["coords"], int(row["d"]))
        h, m, _, _ = evaluate(arr, cfg.S, P, target, cfg.precision)
        out.append((h, m))
    return out


def recheck_csv(path: str | Path, cfg: CampaignConfig) -> mpmath.mpf:
    """Worst relative discrepancy between recomputed (h, m) and the stored
    decimals; bounded by the 30-digit rounding of the CSV."""
    worst = mpmath.mpf(0)
    with mpmath.workprec(cfg.precision + GUARD_BITS):
        for row, (h, m) in zip(read_csv(path), recompute_csv(path, cfg)):
            for exact, text in ((h, row["h"]), (m, row["m"])):
                err = abs(exact - mpmath.mpf(text))
                worst = max(worst, err / abs(exact) if exact else err)
    return worst


def run_campaign(cfg: CampaignConfig, csv_path: str | Path | None = None,
                 json_path: str | Path | None = None,
                 timestamp: str | None = None) -> tuple[dict[str, Any], str]:
    """Evaluate every stream point; return (summary, csv_text) and write files."""
    records, errors, _, target, delta, n = run_family(cfg)
    text = write_csv(records, csv_path, timestamp)
    summary = summarize(cfg, records, errors, target, delta, n)
    if json_path is not None:
        Path(json_path).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary, text


def checks_passed(summary: dict[str, Any]) -> bool:
    return all(c["passed"] for c in summary.get("checks", {}).values())
