"""Adversarial stream generator, counting certificates, harness, baseline."""

from fractions import Fraction as F

import pytest

from cubepack.geometry import Bin, CubeClass, PlacedCube, find_free_position, verify_bin
from cubepack.languages import warmup_family
from cubepack.online import (
    AdversaryResult,
    ClassHarmonicBaseline,
    Decision,
    HarnessViolation,
    Instance,
    InvalidScaleError,
    RatioReport,
    Segment,
    adversarial_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    lower_bound_certificate,
    minimal_scale,
    offline_certificate,
    paper_scale,
    ratio_report,
    run_bounded_space,
    save_instance,
    validate_scale,
)
from cubepack.packing import build_homogeneous, build_packing


def remark_packing(d: int = 3):
    # classes {2, 3}, nu = {2: 1, 3: 4} at d = 3, weight 3/2
    return build_packing(warmup_family(d), F(1, d * d))


# ---------------------------------------------------------------------------
# instances


def test_instance_validation():
    seg = (Segment(2, 3), Segment(3, 5))
    inst = Instance(2, F(1, 9), seg)
    assert inst.total_items == 8
    assert inst.classes() == (2, 3)
    assert list(inst.item_classes()) == [2, 2, 2, 3, 3, 3, 3, 3]
    with pytest.raises(ValueError):
        Instance(2, F(0), seg)
    with pytest.raises(ValueError):
        Segment(1, 3)
    with pytest.raises(ValueError):
        Segment(2, -1)


def test_instance_json_round_trip(tmp_path):
    inst = Instance(3, F(1, 9), (Segment(2, 16), Segment(3, 64)))
    path = tmp_path / "instance.json"
    save_instance(inst, path, extra={"lower_bound": 12, "offline_upper_bound": 16})
    raw = path.read_text()
    assert '"epsilon": "1/9"' in raw
    assert instance_from_dict({"d": 3, "epsilon": "1/9", "segments": [
        {"k": 2, "count": 16}, {"k": 3, "count": 64}], "lower_bound": 12}) == inst
    assert load_instance(path) == inst


def test_instance_extra_key_collision():
    inst = Instance(2, F(1, 9), (Segment(2, 1),))
    with pytest.raises(ValueError):
        instance_to_dict(inst, extra={"d": 5})


# ---------------------------------------------------------------------------
# adversary and certificates


def test_paper_scale_remark_values():
    pack = remark_packing()
    # N = 1^3 * 2^3 = 8
    assert paper_scale(pack, 1) == 16
    assert paper_scale(pack, 2) == 32


def test_adversarial_instance_paper_faithful():
    pack = remark_packing()
    result = adversarial_instance(pack, 1)
    assert result.scale == 16
    assert result.instance.segments == (Segment(2, 16), Segment(3, 64))
    assert result.instance.epsilon == F(1, 9)
    assert result.lower_bound == 12
    assert result.offline_bin_count == 16
    assert result.per_segment_lower_bounds == (8, 4)


def test_lower_bound_scales_with_m():
    pack = remark_packing()
    assert lower_bound_certificate(pack, 1) == 12
    assert lower_bound_certificate(pack, 2) == 24
    res = adversarial_instance(pack, 2)
    assert res.lower_bound == 24
    assert res.instance.total_items == 32 * 5


def test_minimal_scale_and_validation():
    pack = remark_packing()
    c = minimal_scale(pack, 1)
    assert c == 4
    validate_scale(pack, 1, c)
    assert lower_bound_certificate(pack, 1, c) == 3  # (C/2) * 3/2
    with pytest.raises(InvalidScaleError):
        validate_scale(pack, 1, 2)  # (C/2)*nu_3 = 4 not divisible by 8
    with pytest.raises(InvalidScaleError):
        validate_scale(pack, 1, 5)  # odd
    with pytest.raises(InvalidScaleError):
        validate_scale(pack, 3, 4)  # class 3 contributes 1 bin < M
    with pytest.raises(InvalidScaleError):
        adversarial_instance(pack, 1, scale=6)


def test_minimal_scale_respects_budget():
    pack = remark_packing()
    for m in (1, 2, 3, 7):
        c = minimal_scale(pack, m)
        validate_scale(pack, m, c)
        # the next smaller admissible-looking even value must fail
        with pytest.raises(InvalidScaleError):
            validate_scale(pack, m, c - 2)


def test_segment_order_options():
    pack = remark_packing()
    asc = adversarial_instance(pack, 1).instance
    desc = adversarial_instance(pack, 1, order="descending").instance
    explicit = adversarial_instance(pack, 1, order=[3, 2]).instance
    assert [s.k for s in asc.segments] == [2, 3]
    assert [s.k for s in desc.segments] == [3, 2]
    assert desc == explicit
    with pytest.raises(ValueError):
        adversarial_instance(pack, 1, order=[2, 2])


def test_offline_certificate_bins_verify_and_cover_instance():
    pack = remark_packing()
    result = adversarial_instance(pack, 1)
    bins = offline_certificate(pack, result.scale)
    assert len(bins) == 16
    assert all(verify_bin(b) for b in bins)
    counts: dict[int, int] = {}
    for b in bins:
        for cube in b.cubes:
            counts[cube.cls.k] = counts.get(cube.cls.k, 0) + 1
    assert counts == {seg.k: seg.count for seg in result.instance.segments}


def test_offline_certificate_guards():
    pack = remark_packing()
    with pytest.raises(ValueError):
        offline_certificate(pack, 0)
    with pytest.raises(ValueError):
        offline_certificate(pack, 200_000)


# ---------------------------------------------------------------------------
# harness runs with the baseline


def test_empty_instance_uses_no_bins():
    inst = Instance(2, F(1, 9), ())
    result = run_bounded_space(ClassHarmonicBaseline(1), inst, 1)
    assert result.bins_used == 0
    assert result.placements == ()


def test_single_item_uses_one_bin():
    inst = Instance(2, F(1, 9), (Segment(3, 1),))
    result = run_bounded_space(ClassHarmonicBaseline(1), inst, 1)
    assert result.bins_used == 1
    assert result.placements[0].bin_id == 0


def test_homogeneous_stream_grid_capacity():
    # cap (k-1)^d = 4 at k=3, d=2: ceil(10/4) = 3 bins
    inst = Instance(2, F(1, 9), (Segment(3, 10),))
    result = run_bounded_space(ClassHarmonicBaseline(1), inst, 1)
    assert result.bins_used == 3
    assert all(verify_bin(b) for b in result.bins.values())
    sizes = sorted(len(b) for b in result.bins.values())
    assert sizes == [2, 4, 4]


def test_alternating_classes_thrash_at_m1():
    segs = tuple(Segment(k, 1) for k in (2, 3, 2, 3, 2, 3, 2, 3))
    inst = Instance(2, F(1, 9), segs)
    result = run_bounded_space(ClassHarmonicBaseline(1), inst, 1)
    assert result.bins_used == 8


def test_baseline_on_remark_instance():
    pack = remark_packing()
    adv = adversarial_instance(pack, 1)
    result = run_bounded_space(
        ClassHarmonicBaseline(1),
        adv.instance,
        1,
        opt_upper_bound=adv.offline_bin_count,
        certified_lower_bound=adv.lower_bound,
    )
    assert result.bins_used == 24  # 16 singleton bins + 64/8 grid bins
    assert result.per_segment_new_bins == (16, 8)
    for new, floor in zip(result.per_segment_new_bins, adv.per_segment_lower_bounds):
        assert new >= floor
    assert result.bins_used >= adv.lower_bound
    assert result.report == RatioReport(24, 16, 12, F(3, 2))
    assert result.open_bin_ids == ()
    assert len(result.closed_bin_ids) == 24
    assert all(verify_bin(b) for b in result.bins.values())


def test_baseline_respects_budget_m2():
    pack = remark_packing()
    adv = adversarial_instance(pack, 2, scale=minimal_scale(pack, 2))
    result = run_bounded_space(ClassHarmonicBaseline(2), adv.instance, 2)
    assert result.bins_used >= adv.lower_bound


def test_baseline_grid_needs_small_epsilon():
    # side (1+2/3)/3 fits the bin but not a (k-1)-cube grid row
    inst = Instance(2, F(2, 3), (Segment(3, 1),))
    with pytest.raises(ValueError):
        run_bounded_space(ClassHarmonicBaseline(1), inst, 1)


# ---------------------------------------------------------------------------
# harness contract enforcement


class _ScriptedAlgorithm:
    """Replays a fixed list of decisions."""

    def __init__(self, decisions):
        self._decisions = list(decisions)

    def decide(self, cls, open_bins):
        return self._decisions.pop(0)


def test_harness_rejects_unknown_bin():
    inst = Instance(1, F(1, 9), (Segment(2, 1),))
    alg = _ScriptedAlgorithm([Decision(7, (F(0),))])
    with pytest.raises(HarnessViolation, match="not open"):
        run_bounded_space(alg, inst, 1)


def test_harness_rejects_overlap():
    inst = Instance(1, F(1, 9), (Segment(3, 2),))
    alg = _ScriptedAlgorithm([Decision(None, (F(0),)), Decision(0, (F(0),))])
    with pytest.raises(HarnessViolation, match="invalid placement"):
        run_bounded_space(alg, inst, 1)


def test_harness_rejects_containment_breach():
    inst = Instance(1, F(1, 9), (Segment(2, 1),))
    alg = _ScriptedAlgorithm([Decision(None, (F(1, 2),))])
    with pytest.raises(HarnessViolation, match="invalid placement"):
        run_bounded_space(alg, inst, 1)


def test_harness_enforces_open_bin_budget():
    inst = Instance(1, F(1, 9), (Segment(3, 2),))
    alg = _ScriptedAlgorithm(
        [Decision(None, (F(0),)), Decision(None, (F(0),))]
    )
    with pytest.raises(HarnessViolation, match="left open"):
        run_bounded_space(alg, inst, 1)


def test_harness_seals_closed_bins():
    inst = Instance(1, F(1, 9), (Segment(3, 3),))
    alg = _ScriptedAlgorithm(
        [
            Decision(None, (F(0),), close_target=True),
            Decision(None, (F(0),)),
            Decision(0, (F(1, 2),)),  # bin 0 was closed at step 0
        ]
    )
    with pytest.raises(HarnessViolation, match="not open"):
        run_bounded_space(alg, inst, 1)


def test_harness_rejects_closing_unknown_bin():
    inst = Instance(1, F(1, 9), (Segment(3, 1),))
    alg = _ScriptedAlgorithm([Decision(None, (F(0),), close=frozenset({5}))])
    with pytest.raises(HarnessViolation, match="not open"):
        run_bounded_space(alg, inst, 1)


def test_harness_rejects_float_coordinates():
    inst = Instance(1, F(1, 9), (Segment(3, 1),))
    alg = _ScriptedAlgorithm([Decision(None, (0.0,))])
    with pytest.raises(TypeError):
        run_bounded_space(alg, inst, 1)


# ---------------------------------------------------------------------------
# per-bin capacity and report validation


@pytest.mark.parametrize("k,d", [(2, 1), (2, 2), (3, 1), (3, 2), (4, 2)])
def test_grid_capacity_is_tight(k, d):
    # (k-1)^d cubes tile the admissible region; one more has no free base
    eps = F(1, (k - 1) * 2) if k > 2 else F(1, 4)
    hom = build_homogeneous(k, d, eps)
    assert len(hom.bin) == (k - 1) ** d
    cls = CubeClass(k, eps, d)
    assert find_free_position(hom.bin.cubes, cls.side, d) is None
    origin = PlacedCube(cls, (F(0),) * d)
    assert not verify_bin(hom.bin.with_cube(origin))


def test_ratio_report_validation():
    assert ratio_report(24, 16, 12).ratio == F(3, 2)
    with pytest.raises(ValueError):
        RatioReport(10, 16, 12, F(10, 16))  # bound exceeds observed bins
    with pytest.raises(ValueError):
        RatioReport(24, 16, 12, F(1))  # ratio field inconsistent
