"""Corpus statistics and protocol-conformance measurement.

All statistics are pure folds over an immutable corpus. Ratios are kept
as exact rationals internally and formatted to three decimals at the
reporting boundary, so grouped tables always sum exactly to ungrouped
ones before any rounding happens.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .codes import BOUNDARY_CODES, CODES_BY_NAME, code_names
from .corpus import Corpus, Dialog, DIALOG_TYPES
from .errors import CorpusError
from .mapping import to_trace
from .moves import MoveKind
from .protocol import DialogState, ProtocolDefinition
from .engine import VerdictStatus, validate_trace

ENDING_CATEGORIES = ("EXPLANATION", "EXPLAINEE_AFFIRMATION", "EXPLAINER_AFFIRMATION", "OTHER")

#: Traces longer than this get their edit distance flagged as a lower
#: bound rather than an exact value.
EDIT_DISTANCE_EXACT_LIMIT = 20


def format_ratio(value: Fraction) -> str:
    """Fixed three-decimal rendering of an exact rational."""
    return str(
        (Decimal(value.numerator) / Decimal(value.denominator)).quantize(Decimal("0.001"))
    )


@dataclass(frozen=True)
class FrequencyTable:
    rows: dict[str, int]
    by_type: dict[int, dict[str, int]] | None = None


@dataclass(frozen=True)
class MeanTable:
    rows: dict[str, Fraction]
    by_type: dict[int, dict[str, Fraction]] | None = None


@dataclass(frozen=True)
class OccurrenceHistogram:
    code: str
    dialog_type: int | str
    buckets: dict[int, int]
    mode: int


@dataclass(frozen=True)
class EndingDistribution:
    """Final-code ending categories, plus how often each named category
    appears anywhere in the trailing affirmation/explanation run."""

    rows: dict[str, int]
    suffix_rows: dict[str, int]
    by_type: dict[int, dict[str, int]] | None = None
    suffix_by_type: dict[int, dict[str, int]] | None = None


@dataclass(frozen=True)
class TransitionMatrix:
    counts: dict[tuple[str, str], int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class DialogVerdict:
    key: str
    status: VerdictStatus
    index: int | None
    reason: str | None
    edit_distance: int
    exact: bool


@dataclass(frozen=True)
class ConformanceReport:
    verdicts: tuple[DialogVerdict, ...]
    accepted: int
    total: int
    acceptance_rate: Fraction
    mean_edit_distance: Fraction


def _count_codes(dialogs: list[Dialog]) -> dict[str, int]:
    rows = {name: 0 for name in code_names()}
    for dialog in dialogs:
        for event in dialog.code_events:
            rows[event.code] += 1
    return rows


def code_frequency(corpus: Corpus, by_type: bool = False) -> FrequencyTable:
    """Exact occurrence counts of every code across all dialogs."""
    rows = _count_codes(list(corpus.dialogs))
    groups = None
    if by_type:
        groups = {t: _count_codes(corpus.dialogs_of_type(t)) for t in DIALOG_TYPES}
    return FrequencyTable(rows=rows, by_type=groups)


def _mean_rows(dialogs: list[Dialog]) -> dict[str, Fraction]:
    counts = _count_codes(dialogs)
    n = len(dialogs)
    if n == 0:
        return {name: Fraction(0) for name in code_names()}
    return {name: Fraction(counts[name], n) for name in code_names()}


def mean_occurrence(corpus: Corpus, by_type: bool = False) -> MeanTable:
    """Mean occurrences per dialog, as exact rationals."""
    rows = _mean_rows(list(corpus.dialogs))
    groups = None
    if by_type:
        groups = {t: _mean_rows(corpus.dialogs_of_type(t)) for t in DIALOG_TYPES}
    return MeanTable(rows=rows, by_type=groups)


def occurrence_histogram(
    corpus: Corpus, code: str, dialog_type: int | None = None
) -> OccurrenceHistogram:
    """Distribution of per-dialog occurrence counts of one code.

    Ties for the most common count break toward the smaller count.
    """
    if code not in CODES_BY_NAME:
        raise CorpusError("UNKNOWN_CODE", f"unknown code {code!r}")
    dialogs = (
        list(corpus.dialogs) if dialog_type is None else corpus.dialogs_of_type(dialog_type)
    )
    buckets: dict[int, int] = {}
    for dialog in dialogs:
        n = sum(1 for event in dialog.code_events if event.code == code)
        buckets[n] = buckets.get(n, 0) + 1
    buckets = dict(sorted(buckets.items()))
    mode = min(
        (count for count in buckets),
        key=lambda count: (-buckets[count], count),
        default=0,
    )
    return OccurrenceHistogram(
        code=code,
        dialog_type=dialog_type if dialog_type is not None else "ALL",
        buckets=buckets,
        mode=mode,
    )


def _ending_code(dialog: Dialog) -> str | None:
    inner = dialog.inner_codes()
    return inner[-1].code if inner else None


def _ending_rows(dialogs: list[Dialog]) -> tuple[dict[str, int], dict[str, int]]:
    final = {cat: 0 for cat in ENDING_CATEGORIES}
    suffix = {cat: 0 for cat in ENDING_CATEGORIES}
    named = set(ENDING_CATEGORIES[:3])
    for dialog in dialogs:
        last = _ending_code(dialog)
        final[last if last in named else "OTHER"] += 1
        run: set[str] = set()
        for event in reversed(dialog.inner_codes()):
            if event.code in named:
                run.add(event.code)
            else:
                break
        if run:
            for cat in run:
                suffix[cat] += 1
        else:
            suffix["OTHER"] += 1
    return final, suffix


def ending_distribution(corpus: Corpus, by_type: bool = False) -> EndingDistribution:
    """How dialogs end: the last coded act before QE_END, bucketed into
    the three named ending codes or OTHER."""
    rows, suffix_rows = _ending_rows(list(corpus.dialogs))
    groups = suffix_groups = None
    if by_type:
        groups, suffix_groups = {}, {}
        for t in DIALOG_TYPES:
            groups[t], suffix_groups[t] = _ending_rows(corpus.dialogs_of_type(t))
    return EndingDistribution(
        rows=rows, suffix_rows=suffix_rows, by_type=groups, suffix_by_type=suffix_groups
    )


def transition_matrix(
    corpus: Corpus, protocol: ProtocolDefinition | None = None
) -> TransitionMatrix:
    """Counts of consecutive move-kind pairs within each dialog's trace."""
    counts: dict[tuple[str, str], int] = {}
    for dialog in corpus.dialogs:
        trace = to_trace(dialog, protocol)
        for a, b in zip(trace, trace[1:]):
            key = (a.kind.value, b.kind.value)
            counts[key] = counts.get(key, 0) + 1
    order = {kind.value: i for i, kind in enumerate(MoveKind)}
    return TransitionMatrix(
        counts=dict(sorted(counts.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]])))
    )


def edit_distance_to_protocol(
    protocol: ProtocolDefinition, kinds: list[MoveKind]
) -> tuple[int, bool]:
    """Minimum insert/delete/substitute count (over move kinds, actors
    ignored) turning ``kinds`` into some accepted complete trace.

    Exact for traces up to EDIT_DISTANCE_EXACT_LIMIT moves; longer traces
    get the same dynamic-programming value flagged as a lower bound.
    """
    states = sorted(protocol.states, key=lambda s: s.value)
    kind_edges: dict[DialogState, set[tuple[MoveKind, DialogState]]] = {
        s: set() for s in states
    }
    for t in protocol.transitions:
        kind_edges[t.src].add((t.move, t.dst))

    inf = float("inf")

    def relax_inserts(level: dict) -> None:
        # one inserted symbol per edge; iterate to closure (graph is tiny)
        changed = True
        while changed:
            changed = False
            for src in states:
                base = level[src]
                if base is inf:
                    continue
                for _, dst in kind_edges[src]:
                    if base + 1 < level[dst]:
                        level[dst] = base + 1
                        changed = True

    level = {s: inf for s in states}
    level[protocol.initial] = 0
    relax_inserts(level)
    for kind in kinds:
        nxt = {s: inf for s in states}
        for src in states:
            base = level[src]
            if base is inf:
                continue
            # deletion of this symbol
            if base + 1 < nxt[src]:
                nxt[src] = base + 1
            for move, dst in kind_edges[src]:
                cost = base if move is kind else base + 1  # match or substitute
                if cost < nxt[dst]:
                    nxt[dst] = cost
        relax_inserts(nxt)
        level = nxt
    best = min(level[t] for t in protocol.terminals)
    return int(best), len(kinds) <= EDIT_DISTANCE_EXACT_LIMIT


def conformance(corpus: Corpus, protocol: ProtocolDefinition) -> ConformanceReport:
    """Validate every dialog against the protocol and measure how far the
    rejected ones are from the nearest accepted trace."""
    verdicts: list[DialogVerdict] = []
    accepted = 0
    total_distance = Fraction(0)
    for dialog in corpus.dialogs:
        trace = to_trace(dialog, protocol)
        verdict = validate_trace(protocol, trace)
        if verdict.status is VerdictStatus.ACCEPTED:
            accepted += 1
            distance, exact = 0, True
        else:
            distance, exact = edit_distance_to_protocol(protocol, [m.kind for m in trace])
        total_distance += distance
        verdicts.append(
            DialogVerdict(
                key=dialog.key,
                status=verdict.status,
                index=verdict.index,
                reason=verdict.reason,
                edit_distance=distance,
                exact=exact,
            )
        )
    total = len(corpus.dialogs)
    return ConformanceReport(
        verdicts=tuple(verdicts),
        accepted=accepted,
        total=total,
        acceptance_rate=Fraction(accepted, total) if total else Fraction(0),
        mean_edit_distance=total_distance / total if total else Fraction(0),
    )


def _mean_rows_json(rows: dict[str, Fraction]) -> dict[str, str]:
    return {name: format_ratio(rows[name]) for name in code_names()}


def build_report(
    corpus: Corpus,
    protocol: ProtocolDefinition | None = None,
    by_type: bool = True,
) -> dict:
    """Assemble the full machine-readable report with stable key order."""
    freq = code_frequency(corpus, by_type=by_type)
    means = mean_occurrence(corpus, by_type=by_type)
    endings = ending_distribution(corpus, by_type=by_type)
    matrix = transition_matrix(corpus, protocol)

    report: dict = {}
    freq_section: dict = {"ALL": {name: freq.rows[name] for name in code_names()}}
    mean_section: dict = {"ALL": _mean_rows_json(means.rows)}
    if by_type:
        freq_section["by_type"] = {
            str(t): {name: freq.by_type[t][name] for name in code_names()} for t in DIALOG_TYPES
        }
        mean_section["by_type"] = {
            str(t): _mean_rows_json(means.by_type[t]) for t in DIALOG_TYPES
        }
    report["code_frequency"] = freq_section
    report["mean_occurrence"] = mean_section

    histograms: dict = {}
    for name in code_names():
        entry: dict = {}
        hist = occurrence_histogram(corpus, name)
        entry["ALL"] = {
            "buckets": {str(k): v for k, v in hist.buckets.items()},
            "mode": hist.mode,
        }
        if by_type:
            for t in DIALOG_TYPES:
                hist_t = occurrence_histogram(corpus, name, t)
                entry[str(t)] = {
                    "buckets": {str(k): v for k, v in hist_t.buckets.items()},
                    "mode": hist_t.mode,
                }
        histograms[name] = entry
    report["histograms"] = histograms

    endings_section: dict = {
        "ALL": {
            "final": {cat: endings.rows[cat] for cat in ENDING_CATEGORIES},
            "suffix": {cat: endings.suffix_rows[cat] for cat in ENDING_CATEGORIES},
        }
    }
    if by_type:
        endings_section["by_type"] = {
            str(t): {
                "final": {cat: endings.by_type[t][cat] for cat in ENDING_CATEGORIES},
                "suffix": {cat: endings.suffix_by_type[t][cat] for cat in ENDING_CATEGORIES},
            }
            for t in DIALOG_TYPES
        }
    report["endings"] = endings_section

    report["transition_matrix"] = {
        f"{a}->{b}": n for (a, b), n in matrix.counts.items()
    }

    if protocol is not None:
        conf = conformance(corpus, protocol)
        report["conformance"] = {
            "accepted": conf.accepted,
            "total": conf.total,
            "acceptance_rate": format_ratio(conf.acceptance_rate),
            "mean_edit_distance": format_ratio(conf.mean_edit_distance),
            "dialogs": [
                {
                    "key": v.key,
                    "status": v.status.value,
                    "index": v.index,
                    "reason": v.reason,
                    "edit_distance": v.edit_distance,
                    "exact": v.exact,
                }
                for v in conf.verdicts
            ],
        }
    return report
