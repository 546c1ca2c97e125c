import io
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from evqa.container import read_container
from evqa.errors import DegeneratePoolingError, EmptySideError, EmptyVideoError
from evqa.sampling import SamplerConfig
from evqa.scoring import (
    coarse_score,
    combined_score,
    fine_score,
    read_records,
    score_container,
    score_item,
    write_records,
)
from evqa.synthetic import unit_rows


def basis(i, dim=4):
    v = np.zeros(dim, dtype=np.float32)
    v[i] = 1.0
    return v


def oracle_coarse(frames, text):
    """Direct vector arithmetic: per-component mean, explicit norm, dot."""
    dim = len(frames[0])
    mean = [math.fsum(f[c] for f in frames) / len(frames) for c in range(dim)]
    norm = math.sqrt(math.fsum(m * m for m in mean))
    return math.fsum(mean[c] / norm * text[c] for c in range(dim))


def oracle_fine(patches, keywords):
    """Literal-definition double loop over every (patch, keyword) pair."""
    dot = lambda a, b: math.fsum(x * y for x, y in zip(a, b))
    per_kw = [max(dot(o, k) for o in patches) for k in keywords]
    per_patch = [max(dot(o, k) for k in keywords) for o in patches]
    p = math.fsum(per_kw) / len(keywords)
    r = math.fsum(per_patch) / len(patches)
    f1 = 0.0 if p + r <= 0 else 2 * p * r / (p + r)
    return p, r, f1


class TestCoarseScore:
    def test_identical_frames_and_text(self):
        u = basis(0)
        assert coarse_score(np.stack([u, u, u]), u) == 1.0

    def test_orthogonal_text(self):
        u = basis(0)
        assert coarse_score(np.stack([u, u]), basis(1)) == 0.0

    def test_two_basis_frames_pool_to_diagonal(self):
        frames = np.stack([basis(0), basis(1)])
        got = coarse_score(frames, basis(0))
        assert got == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert got == pytest.approx(oracle_coarse(frames.tolist(), basis(0).tolist()), abs=1e-12)

    def test_empty_frames(self):
        with pytest.raises(EmptyVideoError):
            coarse_score(np.zeros((0, 4), dtype=np.float32), basis(0))

    def test_antipodal_frames_degenerate(self):
        u = basis(0)
        with pytest.raises(DegeneratePoolingError):
            coarse_score(np.stack([u, -u]), u)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="dim mismatch"):
            coarse_score(np.stack([basis(0)]), basis(0, dim=5))

    @settings(max_examples=100)
    @given(seed=st.integers(0, 10**6), rows=st.integers(1, 6), dim=st.integers(1, 12))
    def test_matches_direct_arithmetic(self, seed, rows, dim):
        rng = np.random.default_rng(seed)
        frames = unit_rows(rng, rows, dim)
        text = unit_rows(rng, 1, dim)[0]
        assume(float(np.linalg.norm(frames.astype(np.float64).mean(axis=0))) > 1e-6)
        got = coarse_score(frames, text)
        assert got == pytest.approx(oracle_coarse(frames.tolist(), text.tolist()), abs=1e-12)


class TestFineScore:
    def test_subset_keywords(self):
        patches = np.stack([basis(0), basis(1)])
        keywords = np.stack([basis(0)])
        p, r, f1 = fine_score(patches, keywords)
        assert (p, r) == (1.0, 0.5)
        assert f1 == pytest.approx(2 / 3, abs=1e-15)

    def test_fully_orthogonal_sides(self):
        patches = np.stack([basis(0), basis(1)])
        keywords = np.stack([basis(2), basis(3)])
        assert fine_score(patches, keywords) == (0.0, 0.0, 0.0)

    def test_empty_side(self):
        with pytest.raises(EmptySideError):
            fine_score(np.zeros((0, 4), dtype=np.float32), np.stack([basis(0)]))
        with pytest.raises(EmptySideError):
            fine_score(np.stack([basis(0)]), np.zeros((0, 4), dtype=np.float32))

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="dim mismatch"):
            fine_score(np.stack([basis(0)]), np.stack([basis(0, dim=6)]))

    @settings(max_examples=150)
    @given(
        seed=st.integers(0, 10**6),
        n_o=st.integers(1, 8),
        n_k=st.integers(1, 8),
        dim=st.integers(1, 16),
    )
    def test_matches_brute_force(self, seed, n_o, n_k, dim):
        rng = np.random.default_rng(seed)
        patches, keywords = unit_rows(rng, n_o, dim), unit_rows(rng, n_k, dim)
        got = fine_score(patches, keywords)
        want = oracle_fine(patches.tolist(), keywords.tolist())
        assert got == pytest.approx(want, abs=1e-12)

    @given(seed=st.integers(0, 10**6))
    def test_swapping_sides_swaps_p_and_r_exactly(self, seed):
        rng = np.random.default_rng(seed)
        patches, keywords = unit_rows(rng, 4, 8), unit_rows(rng, 3, 8)
        p, r, f1 = fine_score(patches, keywords)
        p2, r2, f2 = fine_score(keywords, patches)
        assert (p2, r2, f2) == (r, p, f1)

    @given(seed=st.integers(0, 10**6), perm_seed=st.integers(0, 10**6))
    def test_row_permutation_invariance_exact(self, seed, perm_seed):
        rng = np.random.default_rng(seed)
        patches, keywords = unit_rows(rng, 5, 8), unit_rows(rng, 4, 8)
        perm = np.random.default_rng(perm_seed)
        shuffled = fine_score(
            patches[perm.permutation(5)], keywords[perm.permutation(4)]
        )
        assert shuffled == fine_score(patches, keywords)

    @given(seed=st.integers(0, 10**6))
    def test_bounds(self, seed):
        rng = np.random.default_rng(seed)
        p, r, f1 = fine_score(unit_rows(rng, 4, 6), unit_rows(rng, 3, 6))
        eps = 1e-9
        assert -1 - eps <= p <= 1 + eps and -1 - eps <= r <= 1 + eps
        if p >= 0 and r >= 0:
            assert 0 <= f1 <= 1 + eps


class TestCombinedScore:
    def test_arithmetic_mean(self):
        assert combined_score(1.0, 2 / 3) == pytest.approx(5 / 6, abs=1e-15)
        assert combined_score(0.0, 0.0) == 0.0

    @given(c=st.floats(-1, 1, allow_nan=False))
    def test_equal_inputs_are_fixed_points(self, c):
        assert combined_score(c, c) == c


class TestScoreItem:
    def perfect_container(self, tmp_path):
        from evqa.container import Manifest, write_container
        from evqa.synthetic import make_item

        u = basis(0)
        items = [
            make_item("hit", "src", 1, [1], [1], ["kw"], kind="caption"),
            make_item("miss", "src", 1, [1], [1], ["kw"], kind="caption"),
        ]
        blocks = {
            "hit.frames": u.reshape(1, -1),
            "hit.patches": u.reshape(1, -1),
            "hit.keywords": u.reshape(1, -1),
            "hit.fulltext": u.reshape(1, -1),
            "miss.frames": u.reshape(1, -1),
            "miss.patches": basis(1).reshape(1, -1),
            "miss.keywords": basis(2).reshape(1, -1),
            "miss.fulltext": basis(3).reshape(1, -1),
        }
        path = tmp_path / "perfect"
        write_container(Manifest(items=items), blocks, path)
        return path

    def test_perfect_and_orthogonal_items(self, tmp_path):
        reader = read_container(self.perfect_container(tmp_path))
        hit, miss = score_container(reader, SamplerConfig(30))
        assert (hit.coarse, hit.fine, hit.combined) == (1.0, 1.0, 1.0)
        assert not hit.degenerate
        assert (miss.coarse, miss.fine, miss.combined) == (0.0, 0.0, 0.0)

    def test_composition_matches_hand_pipeline(self, random_container):
        path, manifest = random_container(seed=42, n_items=3)
        reader = read_container(path)
        cfg = SamplerConfig(2)
        for item in manifest.items:
            sampled = set(range(1, item.video.frame_count + 1, 2))
            frames = [
                reader.block(item.video.frame_block)[i].tolist()
                for i, fi in enumerate(item.video.frame_indices)
                if fi in sampled
            ]
            patch_rows = sorted(
                (pm.frame_index, i) for i, pm in enumerate(item.video.patches)
                if pm.frame_index in sampled
            )
            patches = [reader.block(item.video.patch_block)[i].tolist() for _, i in patch_rows]
            text = reader.block(item.text.full_text_block)[0].tolist()
            keywords = reader.block(item.text.keyword_block).tolist()

            want_coarse = oracle_coarse(frames, text)
            if patches and keywords:
                _, _, want_fine = oracle_fine(patches, keywords)
                want_degenerate = False
            else:
                want_fine = 0.0
                want_degenerate = True
            rec = score_item(reader, item, cfg)
            assert rec.coarse == pytest.approx(want_coarse, abs=1e-12)
            assert rec.fine == pytest.approx(want_fine, abs=1e-12)
            assert rec.combined == pytest.approx((want_coarse + want_fine) / 2, abs=1e-12)
            assert rec.degenerate == want_degenerate
            assert rec.interval_used == 2 and rec.item_id == item.id

    def test_empty_side_flags_degenerate_with_zero_fine(self, random_container):
        # seeds chosen so at least one item has no keywords or no patches
        for seed in range(20):
            path, manifest = random_container(seed=seed, n_items=2)
            reader = read_container(path)
            for item in manifest.items:
                if item.text.keywords and item.video.patches:
                    continue
                rec = score_item(reader, item, SamplerConfig(1))
                assert rec.degenerate
                assert rec.fine == 0.0 and rec.precision == 0.0 and rec.recall == 0.0
                assert rec.combined == rec.coarse / 2
                return
        pytest.fail("no degenerate item generated")

    def test_mode_comes_from_text_kind(self, random_container):
        path, manifest = random_container(seed=9, n_items=4)
        reader = read_container(path)
        for item, rec in zip(manifest.items, score_container(reader, SamplerConfig(1))):
            assert rec.mode == item.text.kind


class TestScoreContainer:
    def test_parallel_equals_serial(self, random_container):
        path, _ = random_container(seed=3, n_items=6)
        reader = read_container(path)
        serial = score_container(reader, SamplerConfig(1), jobs=1)
        parallel = score_container(read_container(path), SamplerConfig(1), jobs=8)
        assert serial == parallel

    def test_mode_filter(self, random_container):
        path, manifest = random_container(seed=8, n_items=6)
        reader = read_container(path)
        qa_only = score_container(reader, SamplerConfig(1), mode="qa")
        assert [r.item_id for r in qa_only] == [
            it.id for it in manifest.items if it.text.kind == "qa"
        ]

    def test_jsonl_roundtrip(self, random_container):
        path, _ = random_container(seed=4, n_items=3)
        records = score_container(read_container(path), SamplerConfig(1))
        buf = io.StringIO()
        write_records(records, buf)
        buf.seek(0)
        assert read_records(buf) == records

    def test_record_invariants_hold(self, random_container):
        for seed in range(6):
            path, _ = random_container(seed=seed, n_items=4)
            for rec in score_container(read_container(path), SamplerConfig(1)):
                if rec.precision + rec.recall > 0:
                    expect = 2 * rec.precision * rec.recall / (rec.precision + rec.recall)
                    assert rec.fine == pytest.approx(expect, abs=1e-15)
                else:
                    assert rec.fine == 0.0
                assert rec.combined == (rec.coarse + rec.fine) / 2
