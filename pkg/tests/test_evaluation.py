from __future__ import annotations

import json

import pytest

from dialight.cli import eval_main
from dialight.database import MatchConfig
from dialight.evaluation import (
    CoverageError,
    DialogueRun,
    EvalConfig,
    evaluate_dialogue_run,
    evaluate_run,
    inform_success,
    render_report,
)
from dialight.model import DialogueState, DomainGoal, Goal
from dialight.replay import ReplayScript

# Hand-derived gold-annotation rates for the fixture corpus: dialogues 1-3 and 5
# are informed (4 is offered nothing); 2 misses its requested postcode and 4
# fails inform, so 1, 3 and 5 succeed.
GOLD_INFORM = 80.0
GOLD_SUCCESS = 60.0


def degraded_rg_script(corpus) -> dict:
    outputs = ReplayScript.from_corpus(corpus).outputs.copy()
    outputs["fixture0001.json:0:rg"] = "there is a nice restaurant in the north ."
    outputs["fixture0001.json:1:rg"] = "i cannot help with that ."
    outputs["fixture0003.json:0:rg"] = "there is a cheap hotel ."
    outputs["fixture0003.json:1:rg"] = "there is a park ."
    outputs["fixture0005.json:1:rg"] = "i do not know the postcode ."
    return outputs


def degraded_predictions(corpus) -> ReplayScript:
    outputs = degraded_rg_script(corpus)
    outputs["fixture0002.json:0:dst"] = "garbage that parses to nothing"
    return ReplayScript(outputs)


def simple_run(response: str) -> DialogueRun:
    goal = Goal(
        domains={
            "restaurant": DomainGoal(
                inform={"pricerange": "cheap", "area": "north"}, request=frozenset({"phone"})
            )
        }
    )
    state = DialogueState.from_triples(
        [("restaurant", "pricerange", "cheap"), ("restaurant", "area", "north")]
    )
    return DialogueRun(dialogue_id="synth", goal=goal, responses=(response,), states=(state,))


class TestInformSuccess:
    def test_synthetic_inform_and_success(self, databases, ontology):
        run = simple_run("[value_name] is a nice place . their phone is [value_phone] .")
        inform, success, skipped = inform_success([run], databases, ontology)
        assert (inform, success) == (100.0, 100.0)
        assert skipped == []

    def test_synthetic_inform_without_requested_slot(self, databases, ontology):
        run = simple_run("[value_name] is a nice place .")
        inform, success, _ = inform_success([run], databases, ontology)
        assert (inform, success) == (100.0, 0.0)

    def test_goalless_dialogue_skipped(self, databases, ontology):
        run = DialogueRun(dialogue_id="empty", goal=Goal(), responses=("hi .",), states=(DialogueState(),))
        inform, success, skipped = inform_success([run], databases, ontology)
        assert skipped == ["empty"]
        assert (inform, success) == (0.0, 0.0)

    def test_gold_fixture_per_dialogue_verdicts(self, corpus, databases, ontology):
        verdicts = {}
        for dialogue in corpus:
            run = DialogueRun(
                dialogue_id=dialogue.id,
                goal=dialogue.goal,
                responses=tuple(t.gold_delex.text for t in dialogue.turns),
                states=tuple(t.gold_state for t in dialogue.turns),
            )
            verdicts[dialogue.id] = evaluate_dialogue_run(run, databases, ontology)
        assert verdicts == {
            "fixture0001.json": (True, True),
            "fixture0002.json": (True, False),  # postcode never offered
            "fixture0003.json": (True, True),
            "fixture0004.json": (False, False),  # no venue ever offered
            "fixture0005.json": (True, True),  # police needs no venue
        }

    def test_venue_mention_outside_domain_context_does_not_inform(self, databases, ontology):
        goal = Goal(domains={"restaurant": DomainGoal(inform={"pricerange": "cheap"})})
        # state never mentions the restaurant domain, so the mention is unattributed
        run = DialogueRun(
            dialogue_id="ctx",
            goal=goal,
            responses=("[value_name] is great .",),
            states=(DialogueState(),),
        )
        inform, _, _ = inform_success([run], databases, ontology)
        assert inform == 0.0

    def test_failing_entry_blocks_inform(self, databases, ontology):
        # state retrieves a moderate venue but the goal wants cheap
        goal = Goal(domains={"restaurant": DomainGoal(inform={"pricerange": "cheap"})})
        state = DialogueState.from_triples([("restaurant", "pricerange", "moderate")])
        run = DialogueRun(dialogue_id="bad", goal=goal, responses=("[value_name] !",), states=(state,))
        inform, _, _ = inform_success([run], databases, ontology)
        assert inform == 0.0

    def test_name_in_goal_auto_informs(self, databases, ontology):
        goal = Goal(domains={"restaurant": DomainGoal(inform={"name": "golden wok"})})
        run = DialogueRun(dialogue_id="named", goal=goal, responses=("sure .",), states=(DialogueState(),))
        inform, _, _ = inform_success([run], databases, ontology)
        assert inform == 100.0

    def test_booking_goal_requires_reference(self, databases, ontology):
        goal = Goal(
            domains={
                "restaurant": DomainGoal(
                    inform={"name": "golden wok"}, book={"book people": "2", "book day": "monday"}
                )
            }
        )
        state = DialogueState.from_triples([("restaurant", "name", "golden wok")])
        without = DialogueRun(dialogue_id="b1", goal=goal, responses=("booked !",), states=(state,))
        with_ref = DialogueRun(
            dialogue_id="b2", goal=goal, responses=("booked , reference [value_reference] .",), states=(state,)
        )
        _, success_without, _ = inform_success([without], databases, ontology)
        _, success_with, _ = inform_success([with_ref], databases, ontology)
        assert (success_without, success_with) == (0.0, 100.0)


class TestEvaluateRun:
    def test_gold_gold_fixture_rates(self, corpus, databases, ontology):
        report = evaluate_run(corpus, None, "gold-gold", databases, ontology)
        assert report.inform_rate == GOLD_INFORM
        assert report.success_rate == GOLD_SUCCESS
        assert report.jga == 100.0
        assert report.slot_f1 == 100.0
        assert report.bleu == 100.0
        assert report.format_non_adherence == 0.0
        assert report.placeholder_recall == 100.0
        assert report.n_dialogues == 5 and report.n_turns == 10

    def test_gold_gold_ignores_predictions(self, corpus, databases, ontology):
        junk = ReplayScript({"fixture0001.json:0:dst": "junk", "fixture0001.json:0:rg": "junk"})
        a = evaluate_run(corpus, None, "gold_gold", databases, ontology)
        b = evaluate_run(corpus, junk, "gold_gold", databases, ontology)
        assert a == b

    def test_e2e_with_gold_script_matches_gold_gold(self, corpus, databases, ontology, gold_script):
        gold = evaluate_run(corpus, None, "gold_gold", databases, ontology)
        e2e = evaluate_run(corpus, gold_script, "e2e", databases, ontology)
        assert e2e.inform_rate == gold.inform_rate
        assert e2e.success_rate == gold.success_rate
        assert e2e.jga == 100.0

    def test_oracle_substitution_ordering(self, corpus, databases, ontology):
        predictions = degraded_predictions(corpus)
        oracle_rg = evaluate_run(corpus, predictions, "oracle-rg", databases, ontology)
        oracle_dst = evaluate_run(corpus, predictions, "oracle-dst", databases, ontology)
        # hand-derived: degraded RG costs dialogues 1/3/5, degraded DST costs dialogue 2
        assert oracle_rg.inform_rate == 60.0 and oracle_rg.success_rate == 60.0
        assert oracle_dst.inform_rate == 40.0 and oracle_dst.success_rate == 0.0
        assert oracle_rg.inform_rate >= oracle_dst.inform_rate
        assert oracle_rg.success_rate >= oracle_dst.success_rate

    def test_e2e_with_both_degradations(self, corpus, databases, ontology):
        report = evaluate_run(corpus, degraded_predictions(corpus), "e2e", databases, ontology)
        assert report.inform_rate == 20.0  # only the police dialogue survives
        assert report.success_rate == 0.0

    def test_dst_metrics_for_degraded_predictions(self, corpus, databases, ontology):
        report = evaluate_run(corpus, degraded_predictions(corpus), "oracle-rg", databases, ontology)
        assert report.jga == 90.0  # 9 of 10 turns parse to the gold state
        assert report.slot_precision == 100.0
        assert report.slot_recall == 90.0
        assert report.slot_f1 == pytest.approx(2 * 100 * 90 / 190, abs=1e-9)
        assert report.format_non_adherence == 10.0

    def test_placeholder_recall_hand_computed(self, corpus, databases, ontology):
        report = evaluate_run(corpus, degraded_predictions(corpus), "oracle-dst", databases, ontology)
        # 23 gold placeholder occurrences, 9 recalled by the degraded responses
        assert report.placeholder_recall == pytest.approx(100 * 9 / 23, abs=1e-9)

    def test_non_adherence_equals_direct_count(self, corpus, databases, ontology):
        predictions = degraded_predictions(corpus)
        report = evaluate_run(corpus, predictions, "e2e", databases, ontology)
        from dialight.evaluation import parse_prediction

        outcomes = [
            parse_prediction(predictions.lookup(d.id, t, "dst"), ontology)
            for d in corpus
            for t in range(len(d.turns))
        ]
        direct = 100.0 * sum(not o.compliant for o in outcomes) / len(outcomes)
        assert report.format_non_adherence == direct

    def test_coverage_gap_lists_missing_keys(self, corpus, databases, ontology, gold_script):
        partial = ReplayScript({k: v for k, v in gold_script.outputs.items() if "fixture0005" not in k})
        with pytest.raises(CoverageError) as excinfo:
            evaluate_run(corpus, partial, "e2e", databases, ontology)
        assert any("fixture0005.json:0:dst" in key for key in excinfo.value.missing)

    def test_missing_predictions_for_e2e(self, corpus, databases, ontology):
        with pytest.raises(CoverageError):
            evaluate_run(corpus, None, "e2e", databases, ontology)

    def test_inform_monotone_in_threshold_on_fixture(self, corpus, databases, ontology):
        previous = -1.0
        for threshold in (0, 1, 2, 4, 8):
            config = EvalConfig(match=MatchConfig(threshold=threshold))
            report = evaluate_run(corpus, None, "gold_gold", databases, ontology, config)
            assert report.inform_rate >= previous
            previous = report.inform_rate

    def test_invalid_mode(self, corpus, databases, ontology):
        with pytest.raises(Exception):
            evaluate_run(corpus, None, "foo", databases, ontology)

    def test_render_report_mirrors_table_columns(self, corpus, databases, ontology):
        report = evaluate_run(corpus, None, "gold_gold", databases, ontology)
        table = render_report(report)
        for column in ("JGA", "Slot F1", "Slot P", "Slot R", "BLEU", "ROUGE", "METEOR", "Inform", "Success"):
            assert column in table
        assert "ENG" in table


class TestCli:
    def run_cli(self, data_dir, tmp_path, *extra):
        args = [
            "--corpus", str(data_dir / "corpus.json"),
            "--ontology", str(data_dir / "ontology.json"),
            "--db-dir", str(data_dir / "db"),
            *extra,
        ]
        return eval_main(args)

    def test_gold_gold_writes_report(self, data_dir, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = self.run_cli(data_dir, tmp_path, "--mode", "gold-gold", "--out", str(out))
        assert code == 0
        report = json.loads(out.read_text())
        assert report["e2e"]["inform_rate"] == GOLD_INFORM
        assert report["e2e"]["success_rate"] == GOLD_SUCCESS
        assert "Inform" in capsys.readouterr().out

    def test_e2e_with_gold_predictions(self, data_dir, tmp_path, gold_script):
        script_path = tmp_path / "preds.json"
        gold_script.to_file(script_path)
        code = self.run_cli(
            data_dir, tmp_path, "--mode", "e2e", "--predictions", str(script_path)
        )
        assert code == 0

    def test_coverage_gap_exit_code(self, data_dir, tmp_path, gold_script):
        partial = {k: v for k, v in gold_script.outputs.items() if "fixture0001" not in k}
        script_path = tmp_path / "partial.json"
        script_path.write_text(json.dumps(partial))
        code = self.run_cli(
            data_dir, tmp_path, "--mode", "e2e", "--predictions", str(script_path)
        )
        assert code == 2

    def test_missing_file_is_error(self, data_dir, tmp_path):
        code = eval_main(
            [
                "--corpus", str(tmp_path / "missing.json"),
                "--ontology", str(data_dir / "ontology.json"),
                "--db-dir", str(data_dir / "db"),
                "--mode", "gold-gold",
            ]
        )
        assert code == 1
