"""Corpus evaluation: DST/RG/end-to-end metrics with oracle-substitution modes."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .codec import ParseOutcome, parse_linearized_state, parse_structured_state
from .database import DomainDatabase, MatchConfig, entry_matches, query_domain
from .metrics import corpus_bleu, joint_goal_accuracy, meteor, rouge_l, slot_prf
from .model import Corpus, DialogueState, Goal, Ontology, extract_placeholders
from .realization import pick_active_domain
from .replay import ReplayScript, script_key

MODES = ("e2e", "oracle_dst", "oracle_rg", "gold_gold")

VENUE_DOMAINS = frozenset({"restaurant", "hotel", "attraction", "train"})
VENUE_SLOTS = ("name", "id")


class EvaluationError(ValueError):
    pass


class CoverageError(EvaluationError):
    """The prediction source does not cover the corpus."""

    def __init__(self, missing: list[str]):
        preview = ", ".join(missing[:10]) + (" ..." if len(missing) > 10 else "")
        super().__init__(f"prediction file is missing {len(missing)} keys: {preview}")
        self.missing = missing


@dataclass(frozen=True)
class EvalConfig:
    match: MatchConfig = field(default_factory=MatchConfig)
    venue_domains: frozenset[str] = VENUE_DOMAINS
    venue_slots: tuple[str, ...] = VENUE_SLOTS
    requestable_aliases: dict[str, str] = field(default_factory=lambda: {"trainid": "id"})
    booking_implies_reference: bool = True
    name_in_goal_auto_informs: bool = True
    state_format: str = "auto"  # how DST prediction text is parsed


@dataclass(frozen=True)
class DialogueRun:
    """One dialogue as the end-to-end metrics see it."""

    dialogue_id: str
    goal: Goal
    responses: tuple[str, ...]  # delexicalized system responses, one per turn
    states: tuple[DialogueState, ...]  # accumulated state after each turn


@dataclass
class EvalReport:
    language: str
    mode: str
    n_dialogues: int
    n_turns: int
    jga: float
    slot_precision: float
    slot_recall: float
    slot_f1: float
    bleu: float
    rouge_l: float
    meteor: float
    inform_rate: float
    success_rate: float
    format_non_adherence: float
    placeholder_recall: float
    skipped_dialogues: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "mode": self.mode,
            "counts": {"dialogues": self.n_dialogues, "turns": self.n_turns},
            "dst": {
                "jga": self.jga,
                "slot_f1": self.slot_f1,
                "slot_precision": self.slot_precision,
                "slot_recall": self.slot_recall,
            },
            "rg": {"bleu": self.bleu, "rouge_l": self.rouge_l, "meteor": self.meteor},
            "e2e": {
                "inform_rate": self.inform_rate,
                "success_rate": self.success_rate,
                "bleu": self.bleu,
            },
            "analysis": {
                "format_non_adherence": self.format_non_adherence,
                "placeholder_recall": self.placeholder_recall,
            },
            "skipped_dialogues": self.skipped_dialogues,
        }


def render_report(report: EvalReport) -> str:
    """Plain-text table with the usual column layout."""
    header = (
        f"{'Language':<10}{'JGA':>7}{'Slot F1':>9}{'Slot P':>8}{'Slot R':>8}"
        f"{'BLEU':>8}{'ROUGE':>8}{'METEOR':>8}{'Inform':>9}{'Success':>9}{'BLEU':>7}"
    )
    row = (
        f"{report.language.upper():<10}{report.jga:>7.1f}{report.slot_f1:>9.1f}"
        f"{report.slot_precision:>8.1f}{report.slot_recall:>8.1f}"
        f"{report.bleu:>8.1f}{report.rouge_l:>8.1f}{report.meteor:>8.1f}"
        f"{report.inform_rate:>9.1f}{report.success_rate:>9.1f}{report.bleu:>7.1f}"
    )
    extras = (
        f"mode={report.mode}  dialogues={report.n_dialogues}  turns={report.n_turns}  "
        f"non-adherence={report.format_non_adherence:.1f}%  placeholder-recall={report.placeholder_recall:.1f}%"
    )
    return "\n".join([header, row, extras])


def parse_prediction(text: str, ontology: Ontology, state_format: str = "auto") -> ParseOutcome:
    """Parse one DST prediction; `auto` accepts the flattened grammar or embedded JSON."""
    if state_format == "linear":
        return parse_linearized_state(text, ontology)
    if state_format == "json":
        return parse_structured_state(text, ontology)
    linear = parse_linearized_state(text, ontology)
    if linear.compliant:
        return linear
    structured = parse_structured_state(text, ontology)
    return structured if structured.compliant else linear


def accumulate_states(outcomes: list[ParseOutcome]) -> list[DialogueState]:
    """Overwrite-merge per turn; parse failures carry the previous state forward."""
    accumulated = []
    state = DialogueState()
    for outcome in outcomes:
        if outcome.compliant or outcome.state:
            state = state.merge(outcome.state)
        accumulated.append(state)
    return accumulated


def _changed_domains(before: DialogueState, after: DialogueState) -> set[str]:
    before_map, after_map = before.by_domain(), after.by_domain()
    return {d for d in set(before_map) | set(after_map) if before_map.get(d) != after_map.get(d)}


def _active_domains(
    states, databases: dict[str, DomainDatabase], ontology: Ontology, config: EvalConfig
) -> list[str | None]:
    actives: list[str | None] = []
    previous = DialogueState()
    fallback: str | None = None
    for state in states:
        changed = _changed_domains(previous, state)
        entries = {}
        for domain in changed:
            db = databases.get(domain)
            if db is not None and ontology.has_domain(domain):
                entries[domain] = query_domain(
                    db, state, domain, ontology, config.match.threshold, config.match
                )
        fallback = pick_active_domain(changed, entries, fallback=fallback)
        actives.append(fallback)
        previous = state
    return actives


def evaluate_dialogue_run(
    run: DialogueRun,
    databases: dict[str, DomainDatabase],
    ontology: Ontology,
    config: EvalConfig | None = None,
) -> tuple[bool, bool] | None:
    """(informed, successful) for one dialogue, or None when it has no goal.

    A venue-requiring goal domain is informed when some system response in
    its domain context mentions a venue placeholder while the accumulated
    state retrieves a non-empty entry set that entirely satisfies the goal's
    informable constraints. Success additionally requires every requested
    slot to surface as a placeholder in that domain context.
    """
    config = config or EvalConfig()
    goal_domains = {d: g for d, g in run.goal.domains.items() if not g.empty()}
    if not goal_domains:
        return None

    actives = _active_domains(run.states, databases, ontology, config)
    venue_tokens = tuple(f"[value_{slot}]" for slot in config.venue_slots)

    informed = {}
    for domain, goal in goal_domains.items():
        if domain not in config.venue_domains:
            informed[domain] = True
        elif config.name_in_goal_auto_informs and "name" in goal.inform:
            informed[domain] = True
        else:
            informed[domain] = False

    for t, response in enumerate(run.responses):
        domain = actives[t]
        if domain not in informed or informed[domain]:
            continue
        if not any(token in response for token in venue_tokens):
            continue
        db = databases.get(domain)
        if db is None or not ontology.has_domain(domain):
            continue
        found = query_domain(db, run.states[t], domain, ontology, config.match.threshold, config.match)
        if found and all(
            entry_matches(e, goal_domains[domain].inform, domain, ontology, config.match.threshold, config.match)
            for e in found
        ):
            informed[domain] = True

    inform_ok = all(informed.values())

    requested = {}
    for domain, goal in goal_domains.items():
        slots = {config.requestable_aliases.get(s, s) for s in goal.request}
        if config.booking_implies_reference and goal.book:
            slots.add("reference")
        requested[domain] = slots
    provided: dict[str, set[str]] = {d: set() for d in goal_domains}
    for t, response in enumerate(run.responses):
        domain = actives[t]
        if domain in provided:
            for slot in requested[domain]:
                if f"[value_{slot}]" in response:
                    provided[domain].add(slot)
    success_ok = inform_ok and all(requested[d] <= provided[d] for d in goal_domains)
    return inform_ok, success_ok


def inform_success(
    runs: list[DialogueRun],
    databases: dict[str, DomainDatabase],
    ontology: Ontology,
    config: EvalConfig | None = None,
) -> tuple[float, float, list[str]]:
    """Dialogue-level Inform and Success rates in percent, plus skipped dialogue ids."""
    informed = succeeded = evaluated = 0
    skipped = []
    for run in runs:
        verdict = evaluate_dialogue_run(run, databases, ontology, config)
        if verdict is None:
            skipped.append(run.dialogue_id)
            continue
        evaluated += 1
        informed += verdict[0]
        succeeded += verdict[1]
    if evaluated == 0:
        return 0.0, 0.0, skipped
    return 100.0 * informed / evaluated, 100.0 * succeeded / evaluated, skipped


def _check_coverage(corpus: Corpus, predictions: ReplayScript | None, tasks: list[str]) -> None:
    if not tasks:
        return
    if predictions is None:
        raise CoverageError(
            [script_key(d.id, t, task) for d in corpus for t in range(len(d.turns)) for task in tasks]
        )
    available = predictions.keys()
    missing = [
        key
        for dialogue in corpus
        for t in range(len(dialogue.turns))
        for task in tasks
        if (key := script_key(dialogue.id, t, task)) not in available
    ]
    if missing:
        raise CoverageError(missing)


def _placeholder_recall(predicted: list[str], gold: list[str]) -> float:
    total = matched = 0
    for pred_text, gold_text in zip(predicted, gold):
        gold_counts = Counter(p.token for p in extract_placeholders(gold_text))
        pred_counts = Counter(p.token for p in extract_placeholders(pred_text))
        total += sum(gold_counts.values())
        matched += sum((gold_counts & pred_counts).values())
    return 100.0 * matched / total if total else 100.0


def evaluate_run(
    corpus: Corpus,
    predictions: ReplayScript | None,
    mode: str,
    databases: dict[str, DomainDatabase],
    ontology: Ontology,
    config: EvalConfig | None = None,
) -> EvalReport:
    """Evaluate a prediction source against a corpus in one substitution mode.

    e2e uses predicted states and predicted responses; oracle_dst substitutes
    gold states; oracle_rg substitutes gold responses; gold_gold uses both and
    ignores the prediction source entirely.
    """
    mode = mode.replace("-", "_")
    if mode not in MODES:
        raise EvaluationError(f"mode must be one of {MODES}, got {mode!r}")
    config = config or EvalConfig()

    needs_dst = mode in ("e2e", "oracle_rg")
    needs_rg = mode in ("e2e", "oracle_dst")
    _check_coverage(corpus, predictions, [t for t, needed in (("dst", needs_dst), ("rg", needs_rg)) if needed])

    pred_turn_states: list[DialogueState] = []
    gold_turn_states: list[DialogueState] = []
    pred_responses_flat: list[str] = []
    gold_responses_flat: list[str] = []
    runs: list[DialogueRun] = []
    non_compliant = 0
    parsed_total = 0

    for dialogue in corpus:
        gold_states = [turn.gold_state for turn in dialogue.turns]
        gold_delex = [turn.gold_delex.text for turn in dialogue.turns]

        if needs_dst:
            outcomes = [
                parse_prediction(
                    predictions.lookup(dialogue.id, t, "dst"), ontology, config.state_format
                )
                for t in range(len(dialogue.turns))
            ]
            turn_states = [o.state for o in outcomes]
            accumulated = accumulate_states(outcomes)
            non_compliant += sum(not o.compliant for o in outcomes)
            parsed_total += len(outcomes)
        else:
            turn_states = gold_states
            accumulated = gold_states  # gold annotations are already accumulated

        responses = (
            [predictions.lookup(dialogue.id, t, "rg") for t in range(len(dialogue.turns))]
            if needs_rg
            else gold_delex
        )

        pred_turn_states.extend(turn_states)
        gold_turn_states.extend(gold_states)
        pred_responses_flat.extend(responses)
        gold_responses_flat.extend(gold_delex)
        runs.append(
            DialogueRun(
                dialogue_id=dialogue.id,
                goal=dialogue.goal,
                responses=tuple(responses),
                states=tuple(accumulated),
            )
        )

    jga = joint_goal_accuracy(pred_turn_states, gold_turn_states)
    precision, recall, f1 = slot_prf(pred_turn_states, gold_turn_states)
    bleu = corpus_bleu(pred_responses_flat, gold_responses_flat) if pred_responses_flat else 0.0
    rouge = (
        100.0 * sum(rouge_l(h, r) for h, r in zip(pred_responses_flat, gold_responses_flat)) / len(gold_responses_flat)
        if gold_responses_flat
        else 0.0
    )
    meteor_score = (
        100.0 * sum(meteor(h, r) for h, r in zip(pred_responses_flat, gold_responses_flat)) / len(gold_responses_flat)
        if gold_responses_flat
        else 0.0
    )
    inform, success, skipped = inform_success(runs, databases, ontology, config)

    return EvalReport(
        language=corpus.language,
        mode=mode,
        n_dialogues=len(corpus),
        n_turns=corpus.turn_count(),
        jga=jga,
        slot_precision=precision,
        slot_recall=recall,
        slot_f1=f1,
        bleu=bleu,
        rouge_l=rouge,
        meteor=meteor_score,
        inform_rate=inform,
        success_rate=success,
        format_non_adherence=100.0 * non_compliant / parsed_total if parsed_total else 0.0,
        placeholder_recall=_placeholder_recall(pred_responses_flat, gold_responses_flat),
        skipped_dialogues=skipped,
    )
