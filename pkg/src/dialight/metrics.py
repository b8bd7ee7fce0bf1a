"""Automatic metrics: JGA, slot precision/recall/F1, corpus BLEU-4, ROUGE-L, exact-match METEOR.

All text metrics share one language-agnostic tokenizer (Unicode word
characters, punctuation split off as single tokens); none of them apply
language-specific normalization.
"""

from __future__ import annotations

import math
import re
from collections import Counter

from .model import DialogueState, normalize_name, normalize_value

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)

METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5

# Beyond this many search nodes the chunk minimization falls back to a
# greedy alignment; reached only by pathological repetition.
_CHUNK_SEARCH_BUDGET = 200_000


class MetricInputError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def _normalized_triples(state: DialogueState) -> frozenset[tuple[str, str, str]]:
    return frozenset(
        (normalize_name(d), normalize_name(s), normalize_value(v)) for d, s, v in state.triples
    )


def _check_lengths(predicted, gold):
    if len(predicted) != len(gold):
        raise MetricInputError(f"{len(predicted)} predicted turns vs {len(gold)} gold turns")


def joint_goal_accuracy(predicted: list[DialogueState], gold: list[DialogueState]) -> float:
    """Percentage of turns whose predicted state set-equals the gold state."""
    _check_lengths(predicted, gold)
    if not gold:
        return 0.0
    hits = sum(_normalized_triples(p) == _normalized_triples(g) for p, g in zip(predicted, gold))
    return 100.0 * hits / len(gold)


def slot_prf(predicted: list[DialogueState], gold: list[DialogueState]) -> tuple[float, float, float]:
    """Micro-averaged precision/recall/F1 over (domain, slot, value) triples, in percent."""
    _check_lengths(predicted, gold)
    tp = fp = fn = 0
    for p, g in zip(predicted, gold):
        p_triples, g_triples = _normalized_triples(p), _normalized_triples(g)
        tp += len(p_triples & g_triples)
        fp += len(p_triples - g_triples)
        fn += len(g_triples - p_triples)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return 100.0 * precision, 100.0 * recall, 100.0 * f1


def _as_reference_lists(references) -> list[list[str]]:
    out = []
    for ref in references:
        out.append([ref] if isinstance(ref, str) else list(ref))
    return out


def corpus_bleu(hypotheses: list[str], references) -> float:
    """Corpus-level BLEU-4 in [0, 100]: uniform weights, brevity penalty, no smoothing."""
    if not hypotheses:
        raise MetricInputError("empty corpus")
    reference_lists = _as_reference_lists(references)
    if len(hypotheses) != len(reference_lists):
        raise MetricInputError(f"{len(hypotheses)} hypotheses vs {len(reference_lists)} references")
    if any(not refs for refs in reference_lists):
        raise MetricInputError("every hypothesis needs at least one reference")

    clipped = [0, 0, 0, 0]
    totals = [0, 0, 0, 0]
    hyp_length = 0
    ref_length = 0
    for hypothesis, refs in zip(hypotheses, reference_lists):
        hyp_tokens = tokenize(hypothesis)
        ref_token_lists = [tokenize(r) for r in refs]
        hyp_length += len(hyp_tokens)
        # closest reference length; ties go to the shorter reference
        ref_length += min((abs(len(r) - len(hyp_tokens)), len(r)) for r in ref_token_lists)[1]
        for n in range(1, 5):
            hyp_counts = Counter(
                tuple(hyp_tokens[i : i + n]) for i in range(len(hyp_tokens) - n + 1)
            )
            max_ref_counts: Counter = Counter()
            for ref_tokens in ref_token_lists:
                ref_counts = Counter(
                    tuple(ref_tokens[i : i + n]) for i in range(len(ref_tokens) - n + 1)
                )
                for ngram, count in ref_counts.items():
                    max_ref_counts[ngram] = max(max_ref_counts[ngram], count)
            totals[n - 1] += sum(hyp_counts.values())
            clipped[n - 1] += sum(min(c, max_ref_counts[g]) for g, c in hyp_counts.items())

    if hyp_length == 0 or any(t == 0 for t in totals) or any(c == 0 for c in clipped):
        return 0.0
    log_precision = sum(0.25 * math.log(c / t) for c, t in zip(clipped, totals))
    brevity = 1.0 if hyp_length > ref_length else math.exp(1.0 - ref_length / hyp_length)
    return 100.0 * brevity * math.exp(log_precision)


def _lcs_length(a: list[str], b: list[str]) -> int:
    previous = [0] * (len(b) + 1)
    for token_a in a:
        current = [0]
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(hypothesis: str, reference: str) -> float:
    """LCS-based F1 over tokens, in [0, 1]."""
    hyp_tokens, ref_tokens = tokenize(hypothesis), tokenize(reference)
    if not hyp_tokens or not ref_tokens:
        return 0.0
    lcs = _lcs_length(hyp_tokens, ref_tokens)
    if lcs == 0:
        return 0.0
    # F1 of P = lcs/|hyp| and R = lcs/|ref| simplifies to one exact division
    return 2 * lcs / (len(hyp_tokens) + len(ref_tokens))


def _greedy_alignment_chunks(hyp_tokens, ref_tokens, need: Counter) -> int:
    """Chunk count of a first-available alignment; upper bound for the exact search."""
    remaining = dict(need)
    used: set[int] = set()
    ref_positions: dict[str, list[int]] = {}
    for j, token in enumerate(ref_tokens):
        ref_positions.setdefault(token, []).append(j)
    chunks = 0
    prev = (-2, -2)
    for i, token in enumerate(hyp_tokens):
        if remaining.get(token, 0) <= 0:
            continue
        candidates = [j for j in ref_positions[token] if j not in used]
        if not candidates:
            continue
        # prefer continuing the current chunk
        j = prev[1] + 1 if (prev[0] == i - 1 and prev[1] + 1 in candidates) else candidates[0]
        used.add(j)
        remaining[token] -= 1
        if not (prev[0] == i - 1 and prev[1] == j - 1):
            chunks += 1
        prev = (i, j)
    return chunks


def _min_chunks(hyp_tokens: list[str], ref_tokens: list[str]) -> tuple[int, int]:
    """(matches, chunks) of a maximum 1-1 exact alignment with the fewest chunks.

    Exhaustive branch-and-bound with memoization; falls back to the greedy
    alignment if the search budget is exhausted.
    """
    hyp_counts, ref_counts = Counter(hyp_tokens), Counter(ref_tokens)
    need = Counter({t: min(c, ref_counts[t]) for t, c in hyp_counts.items() if t in ref_counts})
    matches = sum(need.values())
    if matches == 0:
        return 0, 0

    ref_positions: dict[str, tuple[int, ...]] = {}
    for j, token in enumerate(ref_tokens):
        if need.get(token):
            ref_positions.setdefault(token, ())
            ref_positions[token] += (j,)
    hyp_remaining_after: list[Counter] = [Counter() for _ in range(len(hyp_tokens) + 1)]
    for i in range(len(hyp_tokens) - 1, -1, -1):
        hyp_remaining_after[i] = hyp_remaining_after[i + 1].copy()
        hyp_remaining_after[i][hyp_tokens[i]] += 1

    best = _greedy_alignment_chunks(hyp_tokens, ref_tokens, need)
    memo: dict = {}
    nodes = 0
    exhausted = False

    def search(i: int, used: frozenset, remaining: tuple, prev_i: int, prev_j: int, chunks: int) -> None:
        nonlocal best, nodes, exhausted
        if chunks >= best:
            return
        remaining_matches = sum(r for _, r in remaining)
        if remaining_matches == 0:
            best = chunks
            return
        if i >= len(hyp_tokens):
            return
        nodes += 1
        if nodes > _CHUNK_SEARCH_BUDGET:
            exhausted = True
            return
        key = (i, used, remaining, prev_j if prev_i == i - 1 else -2)
        if memo.get(key, best + 1) <= chunks:
            return
        memo[key] = chunks

        token = hyp_tokens[i]
        rem = dict(remaining)
        if rem.get(token, 0) > 0:
            candidates = [j for j in ref_positions[token] if j not in used]
            # continuation candidate first: it is the only chunk-free move
            continuation = prev_j + 1 if prev_i == i - 1 else None
            candidates.sort(key=lambda j: (j != continuation, j))
            for j in candidates:
                new_chunks = chunks + (0 if j == continuation else 1)
                rem[token] -= 1
                search(
                    i + 1,
                    used | {j},
                    tuple(sorted((t, r) for t, r in rem.items() if r > 0)),
                    i,
                    j,
                    new_chunks,
                )
                rem[token] += 1
                if exhausted:
                    return
        # skipping is allowed only if enough later occurrences remain
        needed = rem.get(token, 0)
        if needed == 0 or hyp_remaining_after[i + 1][token] >= needed:
            search(i + 1, used, remaining, prev_i, prev_j, chunks)

    search(0, frozenset(), tuple(sorted(need.items())), -2, -2, 0)
    if exhausted:
        best = min(best, _greedy_alignment_chunks(hyp_tokens, ref_tokens, need))
    return matches, best


def meteor(hypothesis: str, reference: str) -> float:
    """Exact-unigram-match METEOR in [0, 1] (no stemming or synonymy)."""
    hyp_tokens, ref_tokens = tokenize(hypothesis), tokenize(reference)
    if not hyp_tokens or not ref_tokens:
        return 0.0
    matches, chunks = _min_chunks(hyp_tokens, ref_tokens)
    if matches == 0:
        return 0.0
    precision = matches / len(hyp_tokens)
    recall = matches / len(ref_tokens)
    f_mean = precision * recall / (METEOR_ALPHA * precision + (1 - METEOR_ALPHA) * recall)
    penalty = METEOR_GAMMA * (chunks / matches) ** METEOR_BETA
    return f_mean * (1.0 - penalty)
