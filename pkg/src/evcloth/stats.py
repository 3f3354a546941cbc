"""Aligned-rank nonparametric factorial analysis for the two-factor
within-subject design.

For each term (factor A, factor B, their interaction) the data is aligned by
stripping every other estimated effect, midranked, and fed through a
repeated-measures two-way ANOVA on the ranks. Each run contributes only its
own term's row, so the full analysis yields three rows.

The error term for each effect is its interaction with subject
(F = MS_effect / MS_effect_x_subject), the standard partitioning for a fully
within-subject design. P-values come from a continued-fraction evaluation of
the regularized incomplete beta function.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np


class StatsError(ValueError):
    """Invalid analysis input."""


class Term(enum.Enum):
    A = "A"
    B = "B"
    AxB = "AxB"


@dataclass(frozen=True)
class FactorialObservation:
    """One response from one subject in one (level_a, level_b) cell."""

    subject: str
    level_a: str
    level_b: str
    response: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.response):
            raise StatsError(f"response must be finite, got {self.response}")


@dataclass(frozen=True)
class AnovaRow:
    term: Term
    df_num: int
    df_den: int
    f_stat: float
    p_value: float


@dataclass(frozen=True)
class AlignedSet:
    target_term: Term
    aligned: tuple[float, ...]
    ranks: tuple[float, ...]


def midrank(values: Sequence[float]) -> list[float]:
    """Average ranks (1-based); ties share the mean of their rank positions."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise StatsError("cannot rank an empty sequence")
    if not np.all(np.isfinite(arr)):
        raise StatsError("values must be finite")
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size, dtype=float)
    i = 0
    while i < arr.size:
        j = i
        while j + 1 < arr.size and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks.tolist()


def _index(data: Sequence[FactorialObservation]):
    """Arrange observations into a (subject, a, b) cube; enforce balance."""
    subjects = sorted({o.subject for o in data})
    a_levels = sorted({o.level_a for o in data})
    b_levels = sorted({o.level_b for o in data})
    cube = np.full((len(subjects), len(a_levels), len(b_levels)), np.nan)
    s_idx = {s: i for i, s in enumerate(subjects)}
    a_idx = {a: i for i, a in enumerate(a_levels)}
    b_idx = {b: i for i, b in enumerate(b_levels)}
    for o in data:
        i, j, k = s_idx[o.subject], a_idx[o.level_a], b_idx[o.level_b]
        if not np.isnan(cube[i, j, k]):
            raise StatsError(
                f"duplicate cell: subject={o.subject} a={o.level_a} b={o.level_b}"
            )
        cube[i, j, k] = o.response
    if np.isnan(cube).any():
        missing = [
            f"subject={subjects[i]} a={a_levels[j]} b={b_levels[k]}"
            for i, j, k in zip(*np.nonzero(np.isnan(cube)))
        ]
        raise StatsError("unbalanced design, missing cells: " + "; ".join(missing))
    return cube, subjects, a_levels, b_levels


def align_for_effect(
    data: Sequence[FactorialObservation], term: Term
) -> AlignedSet:
    """Strip everything but the target term's effect estimate, then midrank.

    Aligned value = (observation - its a x b cell mean) + estimated target
    effect, where the estimates are the usual centered marginal/cell
    contrasts. Observation order is preserved in the output.
    """
    cube, subjects, a_levels, b_levels = _index(data)
    grand = cube.mean()
    cell = cube.mean(axis=0)           # (a, b)
    a_marg = cube.mean(axis=(0, 2))    # (a,)
    b_marg = cube.mean(axis=(0, 1))    # (b,)

    if term == Term.A:
        effect = np.broadcast_to((a_marg - grand)[:, None], cell.shape)
    elif term == Term.B:
        effect = np.broadcast_to((b_marg - grand)[None, :], cell.shape)
    else:
        effect = cell - a_marg[:, None] - b_marg[None, :] + grand

    a_idx = {a: i for i, a in enumerate(a_levels)}
    b_idx = {b: i for i, b in enumerate(b_levels)}
    aligned = [
        o.response
        - cell[a_idx[o.level_a], b_idx[o.level_b]]
        + effect[a_idx[o.level_a], b_idx[o.level_b]]
        for o in data
    ]
    return AlignedSet(
        target_term=term,
        aligned=tuple(aligned),
        ranks=tuple(midrank(aligned)),
    )


def _f_ratio(ss_num: float, df_num: int, ss_den: float, df_den: int) -> tuple[float, float]:
    """F and p with the degenerate 0/0 convention (F=0, p=1)."""
    ms_num = ss_num / df_num
    ms_den = ss_den / df_den
    if ms_den <= 0:
        if ms_num <= 1e-30:
            return 0.0, 1.0
        return math.inf, 0.0
    f = ms_num / ms_den
    return f, 1.0 - f_cdf(f, df_num, df_den)


def rm_anova(data: Sequence[FactorialObservation]) -> list[AnovaRow]:
    """Two-way fully within-subject ANOVA.

    Each effect is tested against its own interaction with subject:
    F_T = MS_T / MS_{T x subject}, df_den = df_T * (n_subjects - 1).
    """
    cube, subjects, a_levels, b_levels = _index(data)
    ns, na, nb = cube.shape
    if ns < 2:
        raise StatsError("need at least 2 subjects")
    if na < 2 or nb < 2:
        raise StatsError("need at least 2 levels per factor")

    grand = cube.mean()
    m_s = cube.mean(axis=(1, 2))   # subject means
    m_a = cube.mean(axis=(0, 2))
    m_b = cube.mean(axis=(0, 1))
    m_sa = cube.mean(axis=2)       # (s, a)
    m_sb = cube.mean(axis=1)       # (s, b)
    m_ab = cube.mean(axis=0)       # (a, b)

    ss_a = ns * nb * float(((m_a - grand) ** 2).sum())
    ss_b = ns * na * float(((m_b - grand) ** 2).sum())
    ss_ab = ns * float(
        ((m_ab - m_a[:, None] - m_b[None, :] + grand) ** 2).sum()
    )
    ss_as = nb * float(
        ((m_sa - m_a[None, :] - m_s[:, None] + grand) ** 2).sum()
    )
    ss_bs = na * float(
        ((m_sb - m_b[None, :] - m_s[:, None] + grand) ** 2).sum()
    )
    resid = (
        cube
        - m_sa[:, :, None]
        - m_sb[:, None, :]
        - m_ab[None, :, :]
        + m_s[:, None, None]
        + m_a[None, :, None]
        + m_b[None, None, :]
        - grand
    )
    ss_abs = float((resid**2).sum())

    df_a, df_b = na - 1, nb - 1
    df_ab = df_a * df_b
    rows = []
    for term, ss_num, df_num, ss_den in (
        (Term.A, ss_a, df_a, ss_as),
        (Term.B, ss_b, df_b, ss_bs),
        (Term.AxB, ss_ab, df_ab, ss_abs),
    ):
        df_den = df_num * (ns - 1)
        f, p = _f_ratio(ss_num, df_num, ss_den, df_den)
        rows.append(AnovaRow(term, df_num, df_den, f, p))
    return rows


def art_anova(data: Sequence[FactorialObservation]) -> list[AnovaRow]:
    """Aligned-rank analysis: per term, align -> midrank -> rm_anova on ranks."""
    rows = []
    for term in (Term.A, Term.B, Term.AxB):
        aligned = align_for_effect(data, term)
        ranked = [
            FactorialObservation(o.subject, o.level_a, o.level_b, r)
            for o, r in zip(data, aligned.ranks)
        ]
        term_rows = {row.term: row for row in rm_anova(ranked)}
        rows.append(term_rows[term])
    return rows


# ---------------------------------------------------------------------------
# F distribution via the regularized incomplete beta function.

def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 500):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise StatsError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), absolute error well under 1e-10 for moderate a, b."""
    if a <= 0 or b <= 0:
        raise StatsError("beta parameters must be > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Use the symmetry relation to keep the continued fraction convergent.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_cdf(x: float, df1: int, df2: int) -> float:
    """CDF of the F distribution with df1, df2 degrees of freedom."""
    if df1 < 1 or df2 < 1:
        raise StatsError(f"degrees of freedom must be >= 1, got ({df1}, {df2})")
    if x < 0:
        raise StatsError(f"F statistic must be >= 0, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    t = df1 * x / (df1 * x + df2)
    return regularized_incomplete_beta(df1 / 2.0, df2 / 2.0, t)


# ---------------------------------------------------------------------------
# CSV interface: long-format observations in, one row per (property, term) out.

def observations_from_csv(
    text: str,
) -> dict[str, list[FactorialObservation]]:
    """Parse `subject,voltage,frequency,property,score` rows, one dataset per property.

    Baseline rows (voltage 0) are rejected: the factorial analysis covers the
    nine energized states only.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise StatsError("empty CSV input")
    header = [h.strip() for h in lines[0].split(",")]
    expected = ["subject", "voltage", "frequency", "property", "score"]
    if header != expected:
        raise StatsError(f"CSV header must be {','.join(expected)!r}, got {lines[0]!r}")
    by_property: dict[str, list[FactorialObservation]] = {}
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != 5:
            raise StatsError(f"line {lineno}: expected 5 fields, got {len(parts)}")
        subject, voltage, frequency, prop, score = parts
        if float(voltage) == 0:
            raise StatsError(
                f"line {lineno}: baseline rows (voltage 0) are not part of the "
                "factorial analysis; remove them before analyzing"
            )
        by_property.setdefault(prop, []).append(
            FactorialObservation(
                subject=subject,
                level_a=f"{float(voltage):g}",
                level_b=f"{float(frequency):g}",
                response=float(score),
            )
        )
    return by_property


def anova_report_csv(results: Mapping[str, Iterable[AnovaRow]]) -> str:
    lines = ["property,term,df1,df2,F,p"]
    for prop in sorted(results):
        for row in results[prop]:
            lines.append(
                f"{prop},{row.term.value},{row.df_num},{row.df_den},"
                f"{row.f_stat:.9g},{row.p_value:.9g}"
            )
    return "\n".join(lines) + "\n"
