"""Config-driven numerical studies with CSV artifacts and PASS/FAIL verdicts.

The five study kinds exercise the library end to end:

- ``approximation``: metric distances and resolvent gaps along a
  truncation or shift sequence of a potential, with the top eigenvalue
  of each discretized step.
- ``gap-vs-box``: top eigenvalue of a compactly supported well as the
  Dirichlet box grows, closed by a flagged, never-computed limit row.
- ``exponent-table``: measured scaling and orbit-decay exponents versus
  their closed forms for profile and power-law measures.
- ``gdelta-witness``: a lacunary measure probed for slow-vs-fast orbit
  oscillation; the witness measure itself is emitted next to the report.
- ``section3-bounds``: randomized sweeps of the orbit-norm decay bounds
  plus the single-atom equality witness.

A study is described by an INI config (one ``[study]`` section plus
kind-specific sections), runs deterministically from its seed, and
writes a directory of CSV tables, a normalized config echo, and a
plain-text summary with one PASS/FAIL line per verdict.  All random
inputs are drawn up front in config order, so re-runs -- serial or
parallel -- produce byte-identical CSVs.  ``spot_check`` re-derives
randomly chosen report cells straight from the library operations.
"""

from __future__ import annotations

import configparser
import datetime
import math
import os
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy

from .errors import DomainError, InvariantViolation, PreconditionError
from .measures import (
    AtomicMeasure,
    lacunary_measure,
    measure_to_text,
    monomial_profile_measure,
    power_law_measure,
    scaling_exponents,
)
from .operators import (
    Potential,
    discretize,
    metric_d,
    potential_from_text,
    potential_to_text,
    resolvent_gap,
    shift_potential,
    truncate_potential,
)
from .semigroup import (
    BetaDescriptor,
    classify_stability,
    decay_exponents,
    evolve_norms,
    gdelta_probe,
    range_bound_check,
    shifted_range_bound_check,
)

__all__ = [
    "STUDY_KINDS",
    "OUTPUT_DIR_ENV",
    "StudyConfig",
    "ReportTable",
    "VerdictLine",
    "StudyReport",
    "SpotCheck",
    "parse_scale_token",
    "parse_study_config",
    "load_study_config",
    "resolve_output_dir",
    "run_study",
    "write_report",
    "spot_check",
    "approximation_study",
    "gap_vs_box",
    "exponent_table",
    "gdelta_witness",
    "decay_bound_study",
]

STUDY_KINDS = (
    "approximation",
    "gap-vs-box",
    "exponent-table",
    "gdelta-witness",
    "section3-bounds",
)

#: Environment variable naming the default output directory for reports.
OUTPUT_DIR_ENV = "SEMISTAB_OUTDIR"

_RESOLVENT_SLACK = 1e-9
_GAP_MONOTONE_SLACK = 1e-12


# ---------------------------------------------------------------------------
# scale tokens
# ---------------------------------------------------------------------------


def parse_scale_token(token: str) -> float:
    """Natural log of the positive scale a config token denotes.

    Plain decimals ("1e-6", "0.25") cover the double-precision range;
    power forms ("2^-2048", "10^-700") reach the log-domain scales the
    measure types support far below it.
    """
    tok = str(token).strip()
    if not tok:
        raise DomainError("empty scale token")
    if "^" in tok:
        base_s, _, exp_s = tok.partition("^")
        try:
            base = float(base_s)
            exponent = float(exp_s)
        except ValueError:
            raise DomainError(f"cannot parse scale token {tok!r}") from None
        if not (base > 0.0 and math.isfinite(base) and math.isfinite(exponent)):
            raise DomainError(f"scale token {tok!r} needs a positive finite base and exponent")
        return exponent * math.log(base)
    try:
        val = float(tok)
    except ValueError:
        raise DomainError(f"cannot parse scale token {tok!r}") from None
    if not (val > 0.0 and math.isfinite(val)):
        raise DomainError(f"scale {tok!r} must be positive and finite")
    return math.log(val)


# ---------------------------------------------------------------------------
# study configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StudyConfig:
    """Parsed study description: kind, seed, and raw key-value sections."""

    kind: str
    seed: int
    output_dir: str | None
    sections: dict

    def __post_init__(self) -> None:
        if self.kind not in STUDY_KINDS:
            raise DomainError(
                f"unknown study kind {self.kind!r}; expected one of {', '.join(STUDY_KINDS)}"
            )
        if int(self.seed) != self.seed or self.seed < 0:
            raise DomainError("seed must be an integer >= 0")

    def echo_text(self) -> str:
        """Normalized INI text: the config as parsed, one key per line."""
        lines = []
        for name, opts in self.sections.items():
            lines.append(f"[{name}]")
            for key, val in opts.items():
                lines.append(f"{key} = {val}")
            lines.append("")
        return "\n".join(lines)


def parse_study_config(text: str) -> StudyConfig:
    """Parse INI text into a StudyConfig; malformed input raises DomainError."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise DomainError(f"malformed study config: {exc}") from None
    sections = {name: dict(cp[name]) for name in cp.sections()}
    if "study" not in sections:
        raise DomainError("study config needs a [study] section")
    study = sections["study"]
    if "kind" not in study:
        raise DomainError("[study] section needs a kind")
    seed_raw = study.get("seed", "0")
    try:
        seed = int(seed_raw)
    except ValueError:
        raise DomainError(f"[study] seed must be an integer, got {seed_raw!r}") from None
    return StudyConfig(
        kind=study["kind"].strip(),
        seed=seed,
        output_dir=study.get("output_dir"),
        sections=sections,
    )


def load_study_config(path) -> StudyConfig:
    with open(path, "r", encoding="ascii") as fh:
        return parse_study_config(fh.read())


def resolve_output_dir(config: StudyConfig) -> str:
    """Report directory: config value, else $SEMISTAB_OUTDIR, else study-out."""
    if config.output_dir:
        return config.output_dir
    return os.environ.get(OUTPUT_DIR_ENV) or "study-out"


# -- typed getters over raw sections ----------------------------------------


def _section(config: StudyConfig, name: str) -> dict:
    return config.sections.get(name, {})


def _require_section(config: StudyConfig, name: str) -> dict:
    if name not in config.sections:
        raise DomainError(f"{config.kind} study needs a [{name}] section")
    return config.sections[name]


def _get_str(sec: dict, secname: str, key: str, default=None) -> str:
    if key in sec:
        return sec[key].strip()
    if default is None:
        raise DomainError(f"[{secname}] needs a value for {key}")
    return default


def _get_int(sec: dict, secname: str, key: str, default=None, minimum=None) -> int:
    raw = sec.get(key)
    if raw is None:
        if default is None:
            raise DomainError(f"[{secname}] needs a value for {key}")
        val = default
    else:
        try:
            val = int(raw.strip())
        except ValueError:
            raise DomainError(f"[{secname}] {key} must be an integer, got {raw!r}") from None
    if minimum is not None and val < minimum:
        raise DomainError(f"[{secname}] {key} must be >= {minimum}")
    return val


def _get_float(sec: dict, secname: str, key: str, default=None) -> float:
    raw = sec.get(key)
    if raw is None:
        if default is None:
            raise DomainError(f"[{secname}] needs a value for {key}")
        return float(default)
    try:
        val = float(raw.strip())
    except ValueError:
        raise DomainError(f"[{secname}] {key} must be a number, got {raw!r}") from None
    if not math.isfinite(val):
        raise DomainError(f"[{secname}] {key} must be finite")
    return val


def _get_pos_float(sec: dict, secname: str, key: str, default=None) -> float:
    val = _get_float(sec, secname, key, default)
    if not val > 0.0:
        raise DomainError(f"[{secname}] {key} must be positive")
    return val


def _get_bool(sec: dict, secname: str, key: str, default: bool) -> bool:
    raw = sec.get(key)
    if raw is None:
        return default
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise DomainError(f"[{secname}] {key} must be a boolean, got {raw!r}")


def _get_float_list(sec: dict, secname: str, key: str, default=None) -> list:
    raw = sec.get(key)
    if raw is None:
        if default is None:
            raise DomainError(f"[{secname}] needs a value for {key}")
        return list(default)
    toks = [tok.strip() for tok in raw.split(",")]
    toks = [tok for tok in toks if tok]
    try:
        return [float(tok) for tok in toks]
    except ValueError:
        raise DomainError(f"[{secname}] {key} must be a comma-separated number list") from None


def _get_pair(sec: dict, secname: str, key: str, default=None) -> tuple:
    vals = _get_float_list(sec, secname, key, default)
    if len(vals) != 2:
        raise DomainError(f"[{secname}] {key} must hold exactly two numbers")
    return float(vals[0]), float(vals[1])


def _get_log_window(sec: dict, secname: str, key: str, default: tuple) -> tuple:
    raw = sec.get(key)
    if raw is None:
        toks = default
    else:
        toks = [tok.strip() for tok in raw.split(",") if tok.strip()]
        if len(toks) != 2:
            raise DomainError(f"[{secname}] {key} must hold exactly two scale tokens")
    return parse_scale_token(toks[0]), parse_scale_token(toks[1])


def _parse_indices(raw: str, secname: str) -> list:
    s = raw.strip()
    if not s:
        raise DomainError(f"[{secname}] indices must be nonempty")
    if ".." in s:
        lo_s, _, hi_s = s.partition("..")
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise DomainError(f"[{secname}] cannot parse index range {s!r}") from None
        if lo < 1 or hi < lo:
            raise DomainError(f"[{secname}] index range must satisfy 1 <= lo <= hi")
        return list(range(lo, hi + 1))
    try:
        vals = [int(tok) for tok in s.split(",") if tok.strip()]
    except ValueError:
        raise DomainError(f"[{secname}] cannot parse index list {s!r}") from None
    if not vals:
        raise DomainError(f"[{secname}] indices must be nonempty")
    if any(v < 1 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
        raise DomainError(f"[{secname}] indices must be strictly increasing integers >= 1")
    return vals


# -- potential <-> config section --------------------------------------------


def _potential_from_section(sec: dict, secname: str = "potential") -> Potential:
    if "kind" not in sec:
        raise DomainError(f"[{secname}] needs a kind")
    if "a_bound" not in sec:
        raise DomainError(f"[{secname}] needs a_bound")
    head = f"potential kind={sec['kind']} nu={sec.get('nu', '1')} a_bound={sec['a_bound']}"
    body = [f"{key}={val}" for key, val in sec.items() if key not in ("kind", "nu", "a_bound")]
    return potential_from_text("\n".join([head] + body))


def _potential_section_dict(V: Potential) -> dict:
    lines = potential_to_text(V).strip().splitlines()
    head = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    sec = {"kind": head["kind"], "nu": head["nu"], "a_bound": head["a_bound"]}
    for ln in lines[1:]:
        key, val = ln.split("=", 1)
        sec[key] = val
    return sec


# ---------------------------------------------------------------------------
# report model
# ---------------------------------------------------------------------------


def _format_cell(cell) -> str:
    if isinstance(cell, str):
        if "," in cell or "\n" in cell:
            raise InvariantViolation(f"table cell {cell!r} would break the CSV shape")
        return cell
    if isinstance(cell, (bool, np.bool_)):
        raise InvariantViolation("boolean table cells are not part of the format")
    if isinstance(cell, (int, np.integer)):
        return str(int(cell))
    if isinstance(cell, (float, np.floating)):
        val = float(cell)
        if math.isnan(val):
            raise InvariantViolation("NaN cell in a report table; failures must be tagged strings")
        return repr(val)
    raise InvariantViolation(f"unsupported table cell type {type(cell).__name__}")


@dataclass(frozen=True)
class ReportTable:
    """One CSV artifact: a name, a fixed header, and homogeneous rows."""

    name: str
    header: tuple
    rows: list

    def to_csv_text(self) -> str:
        lines = [",".join(self.header)]
        for row in self.rows:
            if len(row) != len(self.header):
                raise InvariantViolation(
                    f"table {self.name!r} row with {len(row)} cells under "
                    f"{len(self.header)} columns"
                )
            lines.append(",".join(_format_cell(cell) for cell in row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class VerdictLine:
    """One summary assertion: PASS/FAIL plus a short evidence string."""

    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}" + (f" {self.detail}" if self.detail else "")


@dataclass
class StudyReport:
    """In-memory study result: tables, verdicts, notes, and provenance."""

    kind: str
    tables: list
    verdicts: list
    notes: list
    config: StudyConfig
    provenance: dict
    artifacts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def table(self, name: str) -> ReportTable:
        for tab in self.tables:
            if tab.name == name:
                return tab
        raise DomainError(f"report has no table named {name!r}")

    def summary_text(self) -> str:
        lines = [
            f"study: {self.kind}",
            f"seed: {self.config.seed}",
        ]
        for key in ("semistab", "python", "numpy", "scipy", "generated"):
            lines.append(f"{key}: {self.provenance[key]}")
        lines.append("tables: " + ", ".join(f"{t.name}.csv" for t in self.tables))
        if self.artifacts:
            lines.append("artifacts: " + ", ".join(sorted(self.artifacts)))
        for note in self.notes:
            lines.append(f"note: {note}")
        for verdict in self.verdicts:
            lines.append(verdict.line())
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _provenance() -> dict:
    from . import __version__

    return {
        "semistab": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "generated": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def write_report(report: StudyReport, out_dir=None) -> dict:
    """Write config echo, CSV tables, artifacts, and summary; return paths."""
    target = out_dir if out_dir is not None else resolve_output_dir(report.config)
    os.makedirs(target, exist_ok=True)
    paths = {}

    def _emit(name: str, text: str) -> None:
        path = os.path.join(target, name)
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        paths[name] = path

    _emit("config.echo.ini", report.config.echo_text())
    for tab in report.tables:
        _emit(f"{tab.name}.csv", tab.to_csv_text())
    for name in sorted(report.artifacts):
        _emit(name, report.artifacts[name])
    _emit("summary.txt", report.summary_text())
    return paths


def _parallel_map(fn, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# approximation study
# ---------------------------------------------------------------------------


def _plan_approximation(config: StudyConfig) -> dict:
    V = _potential_from_section(_require_section(config, "potential"))
    sec = _require_section(config, "approximation")
    seq_kind = _get_str(sec, "approximation", "seq_kind")
    if seq_kind not in ("truncation", "shift"):
        raise DomainError(f"[approximation] seq_kind must be truncation or shift, got {seq_kind!r}")
    return {
        "V": V,
        "seq_kind": seq_kind,
        "indices": _parse_indices(_get_str(sec, "approximation", "indices"), "approximation"),
        "L": _get_pos_float(sec, "approximation", "L"),
        "h": _get_pos_float(sec, "approximation", "h"),
        "n_probes": _get_int(sec, "approximation", "n_probes", default=3, minimum=1),
        "metric_J": _get_int(sec, "approximation", "metric_J", default=20, minimum=4),
        "metric_tol": _get_pos_float(sec, "approximation", "metric_tol", default=1e-3),
    }


def _approximation_shared(plan: dict, seed: int) -> dict:
    H = discretize(plan["V"], plan["L"], plan["h"])
    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(plan["n_probes"]):
        u = rng.uniform(-1.0, 1.0, H.N)
        u /= np.linalg.norm(u)
        probes.append(u)
    return {"H": H, "probes": probes}


def _approximation_row(plan: dict, shared: dict, index: int) -> tuple:
    V = plan["V"]
    if plan["seq_kind"] == "truncation":
        Vk = truncate_potential(V, index)
    else:
        Vk = shift_potential(V, index)
    dist = float(metric_d(Vk, V, J=plan["metric_J"]))
    Hk = discretize(Vk, plan["L"], plan["h"])
    row = [index, dist, float(Hk.lambda_max)]
    if plan["seq_kind"] == "shift":
        row.append(-float(V.a_bound) / (index + 1.0))
    for u in shared["probes"]:
        lhs, rhs = resolvent_gap(Hk, shared["H"], u)
        row.extend([float(lhs), float(rhs)])
    return tuple(row)


def _approximation_header(plan: dict) -> tuple:
    head = ["index", "metric_d", "lambda_max"]
    if plan["seq_kind"] == "shift":
        head.append("shift_cap")
    for p in range(1, plan["n_probes"] + 1):
        head.extend([f"lhs_{p}", f"rhs_{p}"])
    return tuple(head)


def _run_approximation(config: StudyConfig, jobs: int):
    plan = _plan_approximation(config)
    shared = _approximation_shared(plan, config.seed)
    rows = _parallel_map(lambda k: _approximation_row(plan, shared, k), plan["indices"], jobs)
    header = _approximation_header(plan)
    table = ReportTable("approximation", header, rows)

    metric_col = [row[1] for row in rows]
    lam_col = [row[2] for row in rows]
    probe_start = 4 if plan["seq_kind"] == "shift" else 3
    worst_gap = max(
        row[i] - row[i + 1]
        for row in rows
        for i in range(probe_start, len(row), 2)
    )
    verdicts = [
        VerdictLine(
            "resolvent-domination",
            worst_gap <= _RESOLVENT_SLACK,
            f"max lhs-rhs {_format_cell(float(worst_gap))}",
        ),
        VerdictLine(
            "metric-nonincreasing",
            all(b <= a for a, b in zip(metric_col, metric_col[1:])),
            f"first {_format_cell(metric_col[0])} last {_format_cell(metric_col[-1])}",
        ),
    ]
    if plan["seq_kind"] == "truncation":
        verdicts.append(
            VerdictLine(
                "metric-threshold",
                metric_col[-1] < plan["metric_tol"],
                f"metric {_format_cell(metric_col[-1])} at index {plan['indices'][-1]} "
                f"(tol {_format_cell(plan['metric_tol'])})",
            )
        )
    else:
        caps = [row[3] for row in rows]
        worst = max(lam - cap for lam, cap in zip(lam_col, caps))
        verdicts.append(
            VerdictLine(
                "shift-gap-bound",
                worst <= 0.0,
                f"max lambda_max excess over -a/(l+1) {_format_cell(float(worst))}",
            )
        )
    return [table], verdicts, [], {}


# ---------------------------------------------------------------------------
# gap-vs-box study
# ---------------------------------------------------------------------------


def _check_compact_support(V: Potential, radius: float) -> None:
    rng = np.random.default_rng(202020)
    n = 512
    r = rng.uniform(radius, 2.0 * radius, n)
    if V.nu == 1:
        pts = np.where(rng.uniform(size=n) < 0.5, -r, r)
    else:
        theta = rng.uniform(0.0, 2.0 * math.pi, n)
        pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    worst = float(np.max(np.abs(V.eval(pts))))
    if worst > 1e-12:
        raise PreconditionError(
            "gap-vs-box needs a potential vanishing outside a bounded set; "
            f"found |V| = {worst!r} beyond |x| = {radius!r}"
        )


def _plan_gap_vs_box(config: StudyConfig) -> dict:
    V = _potential_from_section(_require_section(config, "potential"))
    sec = _require_section(config, "box")
    L_list = _get_float_list(sec, "box", "L_list")
    if len(L_list) < 2:
        raise DomainError("[box] L_list needs at least two box sizes")
    if any(not b > a for a, b in zip(L_list, L_list[1:])):
        raise DomainError("[box] L_list must be strictly increasing")
    if any(not L > 0.0 for L in L_list):
        raise DomainError("[box] box sizes must be positive")
    h = _get_pos_float(sec, "box", "h")
    _check_compact_support(V, max(L_list))
    return {"V": V, "L_list": L_list, "h": h}


def _gap_vs_box_row(plan: dict, L: float) -> tuple:
    H = discretize(plan["V"], L, plan["h"])
    lam = float(H.lambda_max)
    return (float(L), lam, max(0.0, -lam))


def _run_gap_vs_box(config: StudyConfig, jobs: int):
    plan = _plan_gap_vs_box(config)
    rows = _parallel_map(lambda L: _gap_vs_box_row(plan, L), plan["L_list"], jobs)
    abs_lam = [abs(row[1]) for row in rows]
    verdicts = [
        VerdictLine(
            "gap-nonincreasing",
            all(b <= a + _GAP_MONOTONE_SLACK for a, b in zip(abs_lam, abs_lam[1:])),
            f"|lambda_max| from {_format_cell(abs_lam[0])} to {_format_cell(abs_lam[-1])}",
        )
    ]
    all_rows = list(rows) + [("inf", "extrapolated", "extrapolated")]
    table = ReportTable("gap-vs-box", ("L", "lambda_max", "gap"), all_rows)
    return [table], verdicts, ["the final row is extrapolated, never computed"], {}


# ---------------------------------------------------------------------------
# exponent-table study
# ---------------------------------------------------------------------------


def _plan_exponent_table(config: StudyConfig) -> dict:
    sec = _require_section(config, "exponents")
    deltas = _get_float_list(sec, "exponents", "delta_list", default=())
    gammas = _get_float_list(sec, "exponents", "gamma_list", default=())
    for d in deltas:
        if not 0.5 < d < 1.0:
            raise DomainError(f"[exponents] profile exponent delta={d!r} must lie in (1/2, 1)")
    for g in gammas:
        if not g > 0.0:
            raise DomainError(f"[exponents] power-law exponent gamma={g!r} must be positive")
    if not deltas and not gammas:
        raise DomainError("[exponents] needs at least one delta or gamma value")
    log_lo, log_hi = _get_log_window(sec, "exponents", "scale_window", ("1e-6", "1e-1"))
    t_min, t_max = _get_pair(sec, "exponents", "time_window", (10.0, 1e6))
    return {
        "items": [("delta", d) for d in deltas] + [("gamma", g) for g in gammas],
        "log_window": (log_lo, log_hi),
        "time_window": (t_min, t_max),
        "n_scales": _get_int(sec, "exponents", "n_scales", default=200, minimum=2),
        "n_times": _get_int(sec, "exponents", "n_times", default=400, minimum=2),
        "scaling_tol": _get_pos_float(sec, "exponents", "scaling_tol", default=1e-3),
        "decay_tol": _get_pos_float(sec, "exponents", "decay_tol", default=0.05),
        "tail_fraction": _get_pos_float(sec, "exponents", "tail_fraction", default=0.8),
    }


def _exponent_table_row(plan: dict, item: tuple) -> tuple:
    family, value = item
    if family == "delta":
        mu = monomial_profile_measure(value)
        analytic = 2.0 * value + 1.0
    else:
        mu = power_law_measure(value)
        analytic = float(value)
    est = scaling_exponents(mu, log_window=plan["log_window"], n_scales=plan["n_scales"])
    trace = evolve_norms(mu, plan["time_window"][0], plan["time_window"][1], plan["n_times"])
    dec = decay_exponents(trace, tail_fraction=plan["tail_fraction"])
    return (
        family,
        float(value),
        analytic,
        est.d_minus,
        est.d_plus,
        dec.liminf_est,
        dec.limsup_est,
        abs(est.d_minus - analytic),
        abs(est.d_plus - analytic),
        abs(dec.liminf_est + analytic),
        abs(dec.limsup_est + analytic),
    )


_EXPONENT_HEADER = (
    "family",
    "parameter",
    "analytic",
    "d_minus",
    "d_plus",
    "decay_liminf",
    "decay_limsup",
    "err_d_minus",
    "err_d_plus",
    "err_decay_liminf",
    "err_decay_limsup",
)


def _run_exponent_table(config: StudyConfig, jobs: int):
    plan = _plan_exponent_table(config)
    rows = _parallel_map(lambda item: _exponent_table_row(plan, item), plan["items"], jobs)
    table = ReportTable("exponent-table", _EXPONENT_HEADER, rows)
    worst_scaling = max(max(row[7], row[8]) for row in rows)
    worst_decay = max(max(row[9], row[10]) for row in rows)
    verdicts = [
        VerdictLine(
            "scaling-accuracy",
            worst_scaling <= plan["scaling_tol"],
            f"max |d - analytic| {_format_cell(float(worst_scaling))} "
            f"(tol {_format_cell(plan['scaling_tol'])})",
        ),
        VerdictLine(
            "decay-accuracy",
            worst_decay <= plan["decay_tol"],
            f"max |decay + analytic| {_format_cell(float(worst_decay))} "
            f"(tol {_format_cell(plan['decay_tol'])})",
        ),
    ]
    return [table], verdicts, [], {}


# ---------------------------------------------------------------------------
# gdelta-witness study
# ---------------------------------------------------------------------------


def _plan_gdelta_witness(config: StudyConfig) -> dict:
    lac = _section(config, "lacunary")
    wit = _section(config, "witness")
    return {
        "scale_base": _get_pos_float(lac, "lacunary", "scale_base", default=0.5),
        "exponents": _get_float_list(lac, "lacunary", "exponents", default=(0.5, 4.0)),
        "n_atoms": _get_int(lac, "lacunary", "n_atoms", default=12, minimum=1),
        "alpha_exponent": _get_pos_float(wit, "witness", "alpha_exponent", default=0.7),
        "beta": BetaDescriptor(
            p=_get_pos_float(wit, "witness", "beta_p", default=0.1),
            poly_degree=_get_int(wit, "witness", "beta_poly_degree", default=0, minimum=0),
        ),
        "horizon": _get_pair(wit, "witness", "horizon", (10.0, 1e12)),
        "n_t": _get_int(wit, "witness", "n_t", default=4001, minimum=2),
        "log_window": _get_log_window(wit, "witness", "scale_window", ("2^-2048", "2^-1")),
        "n_scales": _get_int(wit, "witness", "n_scales", default=240, minimum=2),
        "d_minus_max": _get_pos_float(wit, "witness", "d_minus_max", default=0.7),
        "d_plus_min": _get_pos_float(wit, "witness", "d_plus_min", default=3.0),
        "alpha_min_log": _get_float(wit, "witness", "alpha_min_log", default=6.9),
        "beta_max_log": _get_float(wit, "witness", "beta_max_log", default=-6.9),
        "expect_witness": _get_bool(wit, "witness", "expect_witness", default=True),
    }


def _gdelta_compute(plan: dict) -> dict:
    mu = lacunary_measure(plan["scale_base"], plan["exponents"], plan["n_atoms"])
    verdict = classify_stability(mu)
    est = scaling_exponents(mu, log_window=plan["log_window"], n_scales=plan["n_scales"])
    probe = gdelta_probe(
        mu,
        plan["alpha_exponent"],
        beta=plan["beta"],
        horizon=plan["horizon"],
        n_t=plan["n_t"],
    )
    established = (
        verdict.classification == "StableNotExponential"
        and est.d_minus <= plan["d_minus_max"]
        and est.d_plus >= plan["d_plus_min"]
        and probe.log_max_alpha_weighted >= plan["alpha_min_log"]
        and probe.log_min_beta_weighted <= plan["beta_max_log"]
    )
    row = (
        plan["scale_base"],
        ";".join(repr(float(e)) for e in plan["exponents"]),
        plan["n_atoms"],
        verdict.classification,
        est.d_minus,
        est.d_plus,
        float(np.min(est.ratios)),
        float(np.max(est.ratios)),
        probe.log_max_alpha_weighted,
        probe.argmax_t,
        probe.log_min_beta_weighted,
        probe.argmin_t,
        plan["alpha_exponent"],
        plan["beta"].describe(),
        plan["horizon"][0],
        plan["horizon"][1],
        plan["n_t"],
        "established" if established else "none",
    )
    return {"mu": mu, "verdict": verdict, "established": established, "row": row}


_GDELTA_HEADER = (
    "scale_base",
    "exponents",
    "n_atoms",
    "classification",
    "d_minus",
    "d_plus",
    "ratio_min",
    "ratio_max",
    "log_max_alpha_weighted",
    "argmax_t",
    "log_min_beta_weighted",
    "argmin_t",
    "alpha_exponent",
    "beta",
    "horizon_min",
    "horizon_max",
    "n_t",
    "witness",
)


def _run_gdelta_witness(config: StudyConfig, jobs: int):
    plan = _plan_gdelta_witness(config)
    out = _gdelta_compute(plan)
    table = ReportTable("gdelta-witness", _GDELTA_HEADER, [out["row"]])
    established = out["established"]
    verdicts = [
        VerdictLine(
            "classification",
            out["verdict"].classification == "StableNotExponential",
            out["verdict"].classification,
        ),
        VerdictLine(
            "witness-expectation",
            established == plan["expect_witness"],
            f"established={established} expected={plan['expect_witness']}",
        ),
    ]
    notes = [
        "witness: oscillation witness established"
        if established
        else "witness: no oscillation witness"
    ]
    artifacts = {"witness.measure": measure_to_text(out["mu"])}
    return [table], verdicts, notes, artifacts


# ---------------------------------------------------------------------------
# section3-bounds study (orbit-norm decay bound sweep)
# ---------------------------------------------------------------------------


def _plan_section3_bounds(config: StudyConfig) -> dict:
    sec = _section(config, "bounds")
    hooks = _section(config, "hooks")
    plan = {
        "n_measures": _get_int(sec, "bounds", "n_measures", default=100, minimum=1),
        "n_atoms": _get_int(sec, "bounds", "n_atoms", default=20, minimum=1),
        "position_lo": _get_float(sec, "bounds", "position_lo", default=-10.0),
        "position_hi": _get_float(sec, "bounds", "position_hi", default=0.0),
        "t_window": _get_pair(sec, "bounds", "t_window", (1e-2, 1e3)),
        "n_t": _get_int(sec, "bounds", "n_t", default=200, minimum=1),
        "shifts": _get_float_list(sec, "bounds", "shifts", default=(0.5, 1.0, 2.0)),
        "n_shifted": _get_int(sec, "bounds", "n_shifted", default=50, minimum=0),
        "equality_position": _get_float(sec, "bounds", "equality_position", default=-2.7),
        "bound_scale": _get_pos_float(hooks, "hooks", "bound_scale", default=1.0),
    }
    if not plan["position_lo"] < plan["position_hi"] <= 0.0:
        raise DomainError("[bounds] positions must satisfy position_lo < position_hi <= 0")
    if not plan["equality_position"] < 0.0:
        raise DomainError("[bounds] equality_position must be negative")
    for a in plan["shifts"]:
        if not a >= 0.0:
            raise DomainError("[bounds] shift levels must be >= 0")
        if not plan["position_lo"] < -a:
            raise DomainError(
                f"[bounds] position_lo must lie below -a for every shift level; "
                f"a={a!r} conflicts with position_lo={plan['position_lo']!r}"
            )
    return plan


def _section3_instances(plan: dict, seed: int) -> list:
    rng = np.random.default_rng(seed)
    instances = []
    for i in range(plan["n_measures"]):
        pos = rng.uniform(plan["position_lo"], plan["position_hi"], plan["n_atoms"])
        wts = rng.uniform(0.05, 1.0, plan["n_atoms"])
        instances.append(("plain", i, 0.0, pos, wts))
    for a in plan["shifts"]:
        for i in range(plan["n_shifted"]):
            pos = rng.uniform(plan["position_lo"], -a, plan["n_atoms"])
            wts = rng.uniform(0.05, 1.0, plan["n_atoms"])
            instances.append(("shifted", i, float(a), pos, wts))
    return instances


def _section3_row(plan: dict, instance: tuple) -> tuple:
    family, index, a, pos, wts = instance
    mu = AtomicMeasure.from_points(pos, wts)
    t_min, t_max = plan["t_window"]
    if family == "plain":
        val = range_bound_check(
            mu, t_min=t_min, t_max=t_max, n_t=plan["n_t"], bound_scale=plan["bound_scale"]
        )
    else:
        val = shifted_range_bound_check(
            mu, a, t_min=t_min, t_max=t_max, n_t=plan["n_t"], bound_scale=plan["bound_scale"]
        )
    return (
        family,
        index,
        float(a),
        float(val),
        val.worst_t,
        val.norm_x,
        val.tol,
        "ok" if val.passed else "violated",
    )


def _section3_equality_row(plan: dict) -> tuple:
    pos = plan["equality_position"]
    mu = AtomicMeasure.from_points([pos], [1.0])
    t_star = 1.0 / abs(pos)
    val = range_bound_check(mu, t_grid=np.array([t_star]), bound_scale=plan["bound_scale"])
    gap = abs(float(val))
    return (
        float(pos),
        float(t_star),
        gap,
        val.norm_x,
        val.tol,
        "ok" if gap <= val.tol else "violated",
    )


def _run_section3_bounds(config: StudyConfig, jobs: int):
    plan = _plan_section3_bounds(config)
    instances = _section3_instances(plan, config.seed)
    rows = _parallel_map(lambda inst: _section3_row(plan, inst), instances, jobs)
    eq_row = _section3_equality_row(plan)
    main = ReportTable(
        "section3-bounds",
        ("family", "index", "shift", "max_violation", "worst_t", "norm_x", "tol", "status"),
        rows,
    )
    equality = ReportTable(
        "equality-witness",
        ("position", "t_star", "gap", "norm_x", "tol", "status"),
        [eq_row],
    )

    def _family_verdict(name: str, family: str) -> VerdictLine:
        fam = [row for row in rows if row[0] == family]
        excess = max((row[3] - row[6] for row in fam), default=-math.inf)
        bad = sum(1 for row in fam if row[7] == "violated")
        return VerdictLine(
            name,
            bad == 0,
            f"{bad} of {len(fam)} instances violated; worst excess "
            f"{_format_cell(float(excess))}",
        )

    verdicts = [
        _family_verdict("plain-bound", "plain"),
        _family_verdict("shifted-bound", "shifted"),
        VerdictLine(
            "equality-witness",
            eq_row[5] == "ok",
            f"gap {_format_cell(eq_row[2])} at t {_format_cell(eq_row[1])}",
        ),
    ]
    return [main, equality], verdicts, [], {}


# ---------------------------------------------------------------------------
# dispatch, wrappers, spot checks
# ---------------------------------------------------------------------------


_RUNNERS = {
    "approximation": _run_approximation,
    "gap-vs-box": _run_gap_vs_box,
    "exponent-table": _run_exponent_table,
    "gdelta-witness": _run_gdelta_witness,
    "section3-bounds": _run_section3_bounds,
}


def run_study(config: StudyConfig, jobs: int = 1) -> StudyReport:
    """Run a configured study; instances may run in parallel via ``jobs``."""
    if int(jobs) != jobs or jobs < 1:
        raise DomainError("jobs must be an integer >= 1")
    tables, verdicts, notes, artifacts = _RUNNERS[config.kind](config, int(jobs))
    return StudyReport(
        kind=config.kind,
        tables=tables,
        verdicts=verdicts,
        notes=notes,
        config=config,
        provenance=_provenance(),
        artifacts=artifacts,
    )


def _wrap_config(kind: str, seed: int, sections: dict) -> StudyConfig:
    full = {"study": {"kind": kind, "seed": str(int(seed))}}
    full.update(sections)
    return StudyConfig(kind=kind, seed=int(seed), output_dir=None, sections=full)


def _scale_token(value) -> str:
    return value if isinstance(value, str) else repr(float(value))


def approximation_study(
    V: Potential,
    seq_kind: str,
    indices,
    probe_vectors: int = 3,
    *,
    L: float,
    h: float,
    seed: int = 0,
    metric_J: int = 20,
    metric_tol: float = 1e-3,
    jobs: int = 1,
) -> StudyReport:
    """Metric/resolvent/eigenvalue table along a truncation or shift sequence."""
    sections = {
        "potential": _potential_section_dict(V),
        "approximation": {
            "seq_kind": seq_kind,
            "indices": ", ".join(str(int(i)) for i in indices),
            "L": repr(float(L)),
            "h": repr(float(h)),
            "n_probes": str(int(probe_vectors)),
            "metric_J": str(int(metric_J)),
            "metric_tol": repr(float(metric_tol)),
        },
    }
    return run_study(_wrap_config("approximation", seed, sections), jobs=jobs)


def gap_vs_box(V: Potential, L_list, h: float, *, seed: int = 0, jobs: int = 1) -> StudyReport:
    """Top-eigenvalue-vs-box-size table for a compactly supported potential."""
    sections = {
        "potential": _potential_section_dict(V),
        "box": {
            "L_list": ", ".join(repr(float(L)) for L in L_list),
            "h": repr(float(h)),
        },
    }
    return run_study(_wrap_config("gap-vs-box", seed, sections), jobs=jobs)


def exponent_table(
    delta_list,
    gamma_list,
    *,
    scale_window=("1e-6", "1e-1"),
    time_window=(10.0, 1e6),
    n_scales: int = 200,
    n_times: int = 400,
    scaling_tol: float = 1e-3,
    decay_tol: float = 0.05,
    tail_fraction: float = 0.8,
    seed: int = 0,
    jobs: int = 1,
) -> StudyReport:
    """Measured-vs-analytic exponents for profile and power-law measures."""
    sections = {
        "exponents": {
            "delta_list": ", ".join(repr(float(d)) for d in delta_list),
            "gamma_list": ", ".join(repr(float(g)) for g in gamma_list),
            "scale_window": ", ".join(_scale_token(v) for v in scale_window),
            "time_window": ", ".join(repr(float(t)) for t in time_window),
            "n_scales": str(int(n_scales)),
            "n_times": str(int(n_times)),
            "scaling_tol": repr(float(scaling_tol)),
            "decay_tol": repr(float(decay_tol)),
            "tail_fraction": repr(float(tail_fraction)),
        },
    }
    return run_study(_wrap_config("exponent-table", seed, sections), jobs=jobs)


def gdelta_witness(
    scale_base: float = 0.5,
    exponents=(0.5, 4.0),
    n_atoms: int = 12,
    *,
    alpha_exponent: float = 0.7,
    beta: BetaDescriptor = BetaDescriptor(0.1),
    horizon=(10.0, 1e12),
    n_t: int = 4001,
    scale_window=("2^-2048", "2^-1"),
    n_scales: int = 240,
    d_minus_max: float = 0.7,
    d_plus_min: float = 3.0,
    alpha_min_log: float = 6.9,
    beta_max_log: float = -6.9,
    expect_witness: bool = True,
    seed: int = 0,
    jobs: int = 1,
) -> StudyReport:
    """Lacunary witness report: classification, exponent split, probe extremes."""
    sections = {
        "lacunary": {
            "scale_base": repr(float(scale_base)),
            "exponents": ", ".join(repr(float(e)) for e in exponents),
            "n_atoms": str(int(n_atoms)),
        },
        "witness": {
            "alpha_exponent": repr(float(alpha_exponent)),
            "beta_p": repr(float(beta.p)),
            "beta_poly_degree": str(int(beta.poly_degree)),
            "horizon": ", ".join(repr(float(t)) for t in horizon),
            "n_t": str(int(n_t)),
            "scale_window": ", ".join(_scale_token(v) for v in scale_window),
            "n_scales": str(int(n_scales)),
            "d_minus_max": repr(float(d_minus_max)),
            "d_plus_min": repr(float(d_plus_min)),
            "alpha_min_log": repr(float(alpha_min_log)),
            "beta_max_log": repr(float(beta_max_log)),
            "expect_witness": "true" if expect_witness else "false",
        },
    }
    return run_study(_wrap_config("gdelta-witness", seed, sections), jobs=jobs)


def decay_bound_study(
    n_measures: int = 100,
    n_atoms: int = 20,
    *,
    position_lo: float = -10.0,
    position_hi: float = 0.0,
    t_window=(1e-2, 1e3),
    n_t: int = 200,
    shifts=(0.5, 1.0, 2.0),
    n_shifted: int = 50,
    equality_position: float = -2.7,
    bound_scale: float = 1.0,
    seed: int = 0,
    jobs: int = 1,
) -> StudyReport:
    """Randomized sweep of the plain and shifted orbit-norm decay bounds."""
    sections = {
        "bounds": {
            "n_measures": str(int(n_measures)),
            "n_atoms": str(int(n_atoms)),
            "position_lo": repr(float(position_lo)),
            "position_hi": repr(float(position_hi)),
            "t_window": ", ".join(repr(float(t)) for t in t_window),
            "n_t": str(int(n_t)),
            "shifts": ", ".join(repr(float(a)) for a in shifts),
            "n_shifted": str(int(n_shifted)),
            "equality_position": repr(float(equality_position)),
        },
    }
    if bound_scale != 1.0:
        sections["hooks"] = {"bound_scale": repr(float(bound_scale))}
    return run_study(_wrap_config("section3-bounds", seed, sections), jobs=jobs)


# -- spot checks --------------------------------------------------------------


@dataclass(frozen=True)
class SpotCheck:
    """One re-derived report cell: reported vs recomputed value."""

    table: str
    row: int
    column: str
    reported: float
    recomputed: float
    matches: bool


def _rebuild_row(config: StudyConfig, table_name: str, row_index: int) -> tuple:
    """Recompute a single table row from the config via the module operations."""
    kind = config.kind
    if kind == "approximation":
        plan = _plan_approximation(config)
        shared = _approximation_shared(plan, config.seed)
        return _approximation_row(plan, shared, plan["indices"][row_index])
    if kind == "gap-vs-box":
        plan = _plan_gap_vs_box(config)
        if row_index >= len(plan["L_list"]):
            raise DomainError("the extrapolated row is a reporting rule, never computed")
        return _gap_vs_box_row(plan, plan["L_list"][row_index])
    if kind == "exponent-table":
        plan = _plan_exponent_table(config)
        return _exponent_table_row(plan, plan["items"][row_index])
    if kind == "gdelta-witness":
        plan = _plan_gdelta_witness(config)
        return _gdelta_compute(plan)["row"]
    if kind == "section3-bounds":
        plan = _plan_section3_bounds(config)
        if table_name == "equality-witness":
            return _section3_equality_row(plan)
        instances = _section3_instances(plan, config.seed)
        return _section3_row(plan, instances[row_index])
    raise DomainError(f"unknown study kind {kind!r}")


def spot_check(report: StudyReport, n_cells: int = 5, seed: int = 0) -> list:
    """Re-derive ``n_cells`` random numeric report cells from the config.

    Every cell must reproduce bit-for-bit; a mismatch means the report
    and the library operations disagree.
    """
    cells = []
    for tab in report.tables:
        for ri, row in enumerate(tab.rows):
            for ci, cell in enumerate(row):
                if isinstance(cell, float) and not isinstance(cell, bool):
                    cells.append((tab.name, ri, ci))
    if not cells:
        return []
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(cells), size=min(n_cells, len(cells)), replace=False)
    fresh_rows = {}
    results = []
    for flat in sorted(int(i) for i in chosen):
        name, ri, ci = cells[flat]
        key = (name, ri)
        if key not in fresh_rows:
            fresh_rows[key] = _rebuild_row(report.config, name, ri)
        tab = report.table(name)
        reported = tab.rows[ri][ci]
        recomputed = fresh_rows[key][ci]
        results.append(
            SpotCheck(
                table=name,
                row=ri,
                column=tab.header[ci],
                reported=float(reported),
                recomputed=float(recomputed),
                matches=_format_cell(reported) == _format_cell(recomputed),
            )
        )
    return results
