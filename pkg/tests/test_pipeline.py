import hashlib
import json

import numpy as np
import pytest

from scanforge.corpus import SyntheticSpec, generate_synthetic_scene
from scanforge.errors import UnassignedScene
from scanforge.llm import Gateway, MockBackend, category_marker
from scanforge.pipeline import (
    AnnotationRecord,
    FilterConfig,
    JobStore,
    PipelineConfig,
    Question,
    annotate_scene,
    apply_filters,
    compute_stats,
    conservation_counts,
    consistency_check,
    export_records,
    length_stats,
    load_exported,
    mask_category,
    normalize_for_match,
    run_object,
    split_dataset,
)


def scene_with_wall(tmp_path, seed=42):
    return generate_synthetic_scene(seed, SyntheticSpec(include_wall=True), tmp_path / "corpus")


def final_record(scene_id="s", instance_id=0, category="chair", questions=2, passing=2):
    qs = [
        Question(text=f"q{i} {category}", verify_status="llm_pass" if i < passing else "llm_fail")
        for i in range(questions)
    ]
    return AnnotationRecord(
        scene_id=scene_id,
        instance_id=instance_id,
        category=category,
        status="final",
        dense_referring_expression=f"the {category} by the window",
        scenario_questions=qs,
    )


class TestRunObject:
    def test_mock_closure_reaches_final(self, demo_scene, pipeline_env):
        scene, _ = demo_scene
        cfg, store, gateway = pipeline_env
        rec = run_object(scene, scene.instances[0], cfg, store, gateway)
        assert rec.status == "final"
        assert rec.object_caption and rec.frame_caption and rec.scene_caption
        assert rec.dense_referring_expression
        assert rec.category in rec.object_caption
        assert any(q.verify_status == "llm_pass" for q in rec.scenario_questions)
        for key in ("s1", "s2", "s3", "s3b", "s4", "s5"):
            assert rec.provenance[key]

    def test_invisible_object_eliminated_without_backend_calls(self, tmp_path, pipeline_env):
        cfg, store, gateway = pipeline_env
        scene, _ = scene_with_wall(tmp_path)
        # make the object unreachable: absurd min_area
        from dataclasses import replace

        cfg.staging = replace(cfg.staging, min_area=10**9)
        rec = run_object(scene, scene.instances[0], cfg, store, gateway)
        assert rec.status == "eliminated"
        assert rec.eliminated_reason == "unannotatable"
        assert gateway.network_calls == 0

    def test_zero_questions_requested(self, demo_scene, pipeline_env):
        scene, _ = demo_scene
        cfg, store, gateway = pipeline_env
        cfg.questions_per_object = 0
        rec = run_object(scene, scene.instances[1], cfg, store, gateway)
        assert rec.status == "final"
        assert rec.scenario_questions == []
        assert rec.zero_question_survivors is False

    def test_resume_after_kill_matches_uninterrupted(self, tmp_path):
        spec = SyntheticSpec(include_wall=True)

        def build(base):
            scene, _ = generate_synthetic_scene(42, spec, base / "corpus")
            gw = Gateway({"mock": MockBackend(seed=1)}, cache_dir=base / "cache")
            cfg = PipelineConfig(embed_category_hint=True, images_root=str(base / "staged"))
            return scene, cfg, JobStore(base / "store"), gw

        # uninterrupted reference
        scene, cfg, store, gw = build(tmp_path / "ref")
        annotate_scene(scene, cfg, store, gw)
        export_records(store.all_records(), tmp_path / "ref.jsonl")
        ref_bytes = (tmp_path / "ref.jsonl").read_bytes()

        for kill_stage in ("staged", "s1_done", "s2_done", "s3_done", "s4_done", "s5_done"):
            base = tmp_path / f"kill_{kill_stage}"
            scene, cfg, store, gw = build(base)

            class Kill(Exception):
                pass

            def hook(stage, rec):
                if stage == kill_stage and rec.instance_id == 1:
                    raise Kill()

            with pytest.raises(Kill):
                annotate_scene(scene, cfg, store, gw, stage_hook=hook)
            # resume with a fresh process-equivalent: new store/gateway objects
            scene2, cfg2, _, _ = build(base)
            store2 = JobStore(base / "store")
            gw2 = Gateway({"mock": MockBackend(seed=1)}, cache_dir=base / "cache")
            annotate_scene(scene2, cfg2, store2, gw2)
            export_records(store2.all_records(), base / "out.jsonl")
            assert (base / "out.jsonl").read_bytes() == ref_bytes, kill_stage

    def test_completed_rerun_makes_zero_calls(self, demo_scene, pipeline_env):
        scene, _ = demo_scene
        cfg, store, gateway = pipeline_env
        annotate_scene(scene, cfg, store, gateway)
        before = gateway.network_calls
        annotate_scene(scene, cfg, store, gateway)
        assert gateway.network_calls == before


class TestConsistency:
    def test_matching_expression_passes(self, pipeline_env):
        cfg, _, gateway = pipeline_env
        rec = final_record(category="chair")
        rec.dense_referring_expression = f"a comfy seat {category_marker('chair')}"
        assert consistency_check(rec, cfg, gateway) is True

    def test_mismatch_eliminates(self, pipeline_env):
        cfg, _, gateway = pipeline_env
        rec = final_record(category="chair")
        rec.dense_referring_expression = f"a flat surface {category_marker('table')}"
        assert consistency_check(rec, cfg, gateway) is False

    def test_plural_ground_truth_matches_singular_prediction(self, pipeline_env):
        cfg, _, gateway = pipeline_env
        rec = final_record(category="chairs")
        rec.dense_referring_expression = f"a comfy seat {category_marker('chair')}"
        assert consistency_check(rec, cfg, gateway) is True

    def test_category_word_is_masked_from_prompt(self):
        masked = mask_category("The chair near the chairs and armchair", "chair")
        assert "chair " not in masked.lower().replace("armchair", "")
        assert masked == "The object near the object and armchair"

    def test_synonyms_apply(self):
        syn = {"couch": "sofa"}
        assert normalize_for_match("Couch", syn) == "sofa"
        assert normalize_for_match("sofas", syn) == "sofa"
        assert normalize_for_match("couch", syn) == normalize_for_match("SOFA", syn)


class TestFilters:
    def test_blocklisted_category_eliminated(self):
        recs = [final_record(category="wall", instance_id=0)] + [
            final_record(category="chair", instance_id=i) for i in range(1, 7)
        ]
        apply_filters(recs, FilterConfig(min_instances_per_category=1))
        assert recs[0].status == "eliminated"
        assert recs[0].eliminated_reason == "category_filtered"
        assert all(r.status == "final" for r in recs[1:])

    def test_undersampled_category_eliminated(self):
        recs = [final_record(category="stick", instance_id=i) for i in range(3)]
        recs += [final_record(category="chair", instance_id=10 + i) for i in range(5)]
        apply_filters(recs, FilterConfig(blocked_categories=frozenset(), min_instances_per_category=5))
        assert all(r.status == "eliminated" for r in recs[:3])
        assert all(r.status == "final" for r in recs[3:])

    def test_empty_config_is_identity(self):
        recs = [final_record(category="wall")]
        apply_filters(recs, FilterConfig(blocked_categories=frozenset(), min_instances_per_category=0))
        assert recs[0].status == "final"

    def test_no_final_record_blocklisted_after_filtering(self):
        recs = [final_record(category=c, instance_id=i) for i, c in
                enumerate(["wall", "ceiling", "floor", "chair", "chair", "chair", "chair", "chair"])]
        apply_filters(recs, FilterConfig(min_instances_per_category=1))
        exported = [r for r in recs if r.status == "final"]
        assert all(r.category not in ("wall", "ceiling", "floor") for r in exported)


class TestSplit:
    def test_partition(self, tmp_path):
        recs = [final_record(scene_id=s, instance_id=i) for i, s in
                enumerate(["a", "a", "b", "c", "d", "e"])]
        (tmp_path / "train.txt").write_text("a\nb\nc\n")
        (tmp_path / "val.txt").write_text("d\ne\n")
        train, val = split_dataset(recs, tmp_path / "train.txt", tmp_path / "val.txt")
        assert {r.scene_id for r in train} == {"a", "b", "c"}
        assert {r.scene_id for r in val} == {"d", "e"}
        assert len(train) + len(val) == len(recs)

    def test_unassigned_scene(self, tmp_path):
        recs = [final_record(scene_id="zzz")]
        (tmp_path / "train.txt").write_text("a\n")
        (tmp_path / "val.txt").write_text("b\n")
        with pytest.raises(UnassignedScene, match="zzz"):
            split_dataset(recs, tmp_path / "train.txt", tmp_path / "val.txt")

    def test_official_scale_sizes(self, tmp_path):
        # lists shaped like the official release: 1201 train + 312 val scans
        train_ids = [f"scene{i:04d}_00" for i in range(1201)]
        val_ids = [f"scene{i:04d}_00" for i in range(1201, 1513)]
        (tmp_path / "train.txt").write_text("\n".join(train_ids) + "\n")
        (tmp_path / "val.txt").write_text("\n".join(val_ids) + "\n")
        recs = [final_record(scene_id=s, instance_id=i)
                for i, s in enumerate(train_ids + val_ids)]
        train, val = split_dataset(recs, tmp_path / "train.txt", tmp_path / "val.txt")
        assert len({r.scene_id for r in train}) == 1201
        assert len({r.scene_id for r in val}) == 312


class TestStats:
    def test_interpolated_median(self):
        st = length_stats([1, 2, 3, 4])
        assert st.median == 2.5

    def test_constant_sample_quartiles_equal(self):
        st = length_stats([5, 5, 5, 5])
        assert st.q1 == st.median == st.q3 == 5.0

    def test_histogram_uniform_in_log10(self):
        st = length_stats([1, 10, 100, 1000])
        edges = np.array(st.hist_edges_log10)
        widths = np.diff(edges)
        assert len(edges) == 31
        assert np.allclose(widths, widths[0])
        assert edges[0] == 0.0 and edges[-1] == 3.0
        assert sum(st.hist_counts) == 4

    def test_count_identity(self):
        recs = [final_record(instance_id=0, questions=2, passing=2),
                final_record(instance_id=1, questions=2, passing=1),
                final_record(instance_id=2, questions=3, passing=1)]
        st = compute_stats(recs)
        assert st.dense_expression_count == 3
        assert st.question_count == 4
        assert st.total_description_count == 7

    def test_only_passing_questions_counted(self):
        recs = [final_record(instance_id=0, questions=3, passing=0)]
        st = compute_stats(recs)
        assert st.question_count == 0


class TestExport:
    def test_failed_questions_never_export(self, tmp_path):
        rec = final_record(questions=3, passing=1)
        export_records([rec], tmp_path / "out.jsonl")
        doc = load_exported(tmp_path / "out.jsonl")[0]
        assert len(doc["scenario_questions"]) == 1

    def test_eliminated_records_never_export(self, tmp_path):
        rec = final_record()
        gone = final_record(instance_id=1)
        gone.eliminate("category_filtered")
        n = export_records([rec, gone], tmp_path / "out.jsonl")
        assert n == 1

    def test_sorted_and_stable(self, tmp_path):
        recs = [final_record(scene_id="b"), final_record(scene_id="a")]
        export_records(recs, tmp_path / "one.jsonl")
        export_records(list(reversed(recs)), tmp_path / "two.jsonl")
        assert (tmp_path / "one.jsonl").read_bytes() == (tmp_path / "two.jsonl").read_bytes()
        docs = load_exported(tmp_path / "one.jsonl")
        assert [d["scene_id"] for d in docs] == ["a", "b"]


class TestConservation:
    def test_every_staged_object_terminal(self, tmp_path):
        scene, _ = scene_with_wall(tmp_path)
        gw = Gateway({"mock": MockBackend(seed=1)}, cache_dir=tmp_path / "cache")
        cfg = PipelineConfig(embed_category_hint=True, images_root=str(tmp_path / "staged"))
        store = JobStore(tmp_path / "store")
        records = annotate_scene(scene, cfg, store, gw)
        apply_filters(records, FilterConfig(min_instances_per_category=1))
        counts = conservation_counts(records)
        assert counts["in_flight"] == 0
        assert counts["final"] + counts["eliminated"] == counts["total"] == len(scene.instances)


class TestJobStore:
    def test_journal_replay(self, tmp_path):
        store = JobStore(tmp_path)
        rec = final_record()
        store.persist(rec)
        again = JobStore(tmp_path)
        assert again.get("s", 0).status == "final"

    def test_torn_tail_ignored(self, tmp_path):
        store = JobStore(tmp_path)
        store.persist(final_record())
        journal = tmp_path / "journal" / "s.jsonl"
        with journal.open("a") as fh:
            fh.write('{"scene_id": "s", "instance_id": 1, "cat')  # crash mid-line
        again = JobStore(tmp_path)
        assert again.get("s", 0) is not None
        assert again.get("s", 1) is None

    def test_compact_then_replay(self, tmp_path):
        store = JobStore(tmp_path)
        rec = final_record()
        store.persist(rec)
        store.compact("s")
        assert not (tmp_path / "journal" / "s.jsonl").exists()
        again = JobStore(tmp_path)
        got = again.get("s", 0)
        assert got is not None and got.to_dict() == rec.to_dict()

    def test_last_write_wins(self, tmp_path):
        store = JobStore(tmp_path)
        rec = AnnotationRecord(scene_id="s", instance_id=0, category="chair")
        store.persist(rec)
        rec.advance("staged")
        store.persist(rec)
        again = JobStore(tmp_path)
        assert again.get("s", 0).status == "staged"
