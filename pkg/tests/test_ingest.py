import numpy as np
import pytest

from heartfade.color import LabColor, LabOffset, delta_e, srgb_to_lab, SrgbColor
from heartfade.ingest import (
    Observation,
    ObservationError,
    PixelGrid,
    PpmError,
    Region,
    RegionError,
    build_series,
    encode_p3,
    encode_p6,
    load_observations,
    mean_lab_of_region,
    parse_ppm,
)

ZERO = LabOffset(0, 0, 0)
BASELINE = LabColor(49.3, 46.3, 20.5)


def uniform_grid(w, h, rgb):
    pixels = np.tile(np.array(rgb, dtype=np.uint8), (h, w, 1))
    return PixelGrid(w, h, pixels)


class TestParsePpm:
    def test_p3_single_pixel(self):
        grid = parse_ppm(b"P3 1 1 255 194 80 85")
        assert (grid.width, grid.height) == (1, 1)
        assert grid.pixel(0, 0) == SrgbColor(194, 80, 85)

    def test_p6_matches_p3(self):
        p3 = b"P3\n2 2\n255\n1 2 3 4 5 6 7 8 9 10 11 12\n"
        p6 = b"P6\n2 2\n255\n" + bytes(range(1, 13))
        assert parse_ppm(p3) == parse_ppm(p6)

    def test_comments_in_header(self):
        data = b"P3 # ascii\n# size follows\n1 1\n255\n10 20 30\n"
        assert parse_ppm(data).pixel(0, 0) == SrgbColor(10, 20, 30)

    def test_greyscale_magic_rejected(self):
        with pytest.raises(PpmError, match="unsupported format"):
            parse_ppm(b"P5 1 1 255 0")

    def test_bad_maxval(self):
        with pytest.raises(PpmError, match="maxval"):
            parse_ppm(b"P3 1 1 65535 0 0 0")

    def test_truncated_binary_reports_offset(self):
        data = b"P6\n2 1\n255\nABC"
        with pytest.raises(PpmError, match="truncated") as exc:
            parse_ppm(data)
        assert exc.value.offset == len(data)

    def test_truncated_ascii(self):
        with pytest.raises(PpmError, match="truncated"):
            parse_ppm(b"P3 2 1 255 1 2 3")

    def test_roundtrip_random_grids(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            w, h = rng.integers(1, 9, size=2)
            pixels = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
            grid = PixelGrid(int(w), int(h), pixels)
            assert parse_ppm(encode_p3(grid)) == grid
            assert parse_ppm(encode_p6(grid)) == grid


class TestRegionMean:
    def test_uniform_fresh_paint(self):
        grid = uniform_grid(4, 4, (194, 80, 85))
        lab = mean_lab_of_region(grid, Region(0, 0, 4, 4), ZERO)
        assert delta_e(lab, BASELINE) < 2.0

    def test_zero_area_region(self):
        grid = uniform_grid(4, 4, (10, 10, 10))
        with pytest.raises(RegionError, match="zero area"):
            mean_lab_of_region(grid, Region(0, 0, 0, 2), ZERO)

    def test_out_of_bounds_region(self):
        grid = uniform_grid(4, 4, (10, 10, 10))
        with pytest.raises(RegionError, match="outside"):
            mean_lab_of_region(grid, Region(2, 2, 4, 4), ZERO)

    def test_half_and_half_mean(self):
        pixels = np.zeros((2, 2, 3), dtype=np.uint8)
        pixels[:, 0] = (200, 40, 40)
        pixels[:, 1] = (90, 120, 200)
        grid = PixelGrid(2, 2, pixels)
        got = mean_lab_of_region(grid, Region(0, 0, 2, 2), ZERO)
        a = srgb_to_lab(SrgbColor(200, 40, 40))
        b = srgb_to_lab(SrgbColor(90, 120, 200))
        expected = LabColor((a.L + b.L) / 2, (a.a + b.a) / 2, (a.b + b.b) / 2)
        assert delta_e(got, expected) < 1e-9

    def test_single_pixel_equals_conversion_plus_offset(self):
        grid = uniform_grid(3, 3, (120, 30, 60))
        off = LabOffset(1.5, -2.0, 0.5)
        got = mean_lab_of_region(grid, Region(1, 1, 1, 1), off)
        base = srgb_to_lab(SrgbColor(120, 30, 60))
        assert got.L == pytest.approx(base.L + 1.5)
        assert got.a == pytest.approx(base.a - 2.0)
        assert got.b == pytest.approx(base.b + 0.5)


class TestLoadObservations:
    def test_single_row(self):
        obs = load_observations(
            "heart_id,date,L,a,b,source\nh1,2021-09-02,49.3,46.3,20.5,instagram\n"
        )
        assert len(obs) == 1
        assert obs[0].heart_id == "h1"
        assert obs[0].date.isoformat() == "2021-09-02"
        assert obs[0].source == "instagram"

    def test_month_only_date_rejected(self):
        with pytest.raises(ObservationError, match="row 2"):
            load_observations("heart_id,date,L,a,b,source\nh1,2021-09,49,46,20,x\n")

    def test_header_only(self):
        assert load_observations("heart_id,date,L,a,b,source\n") == []

    def test_missing_column(self):
        with pytest.raises(ObservationError, match="missing column"):
            load_observations("heart_id,date,L,a,b\nh1,2021-09-02,49,46,20\n")

    def test_non_numeric_lab(self):
        with pytest.raises(ObservationError, match="non-numeric"):
            load_observations("heart_id,date,L,a,b,source\nh1,2021-09-02,x,46,20,s\n")


def obs(heart, date, L, a=46.3, b=20.5):
    import datetime

    return Observation(heart, datetime.date.fromisoformat(date), LabColor(L, a, b))


class TestBuildSeries:
    def test_single_observation_at_baseline(self):
        series = build_series([obs("h1", "2021-05-01", 49.3)], BASELINE)
        assert len(series) == 1
        assert series[0].points == ((0, 0.0),)

    def test_lightness_shift_is_delta_e(self):
        series = build_series([obs("h1", "2021-05-01", 59.3)], BASELINE)
        assert series[0].points[0] == (0, pytest.approx(10.0))

    def test_interleaved_hearts_sorted(self):
        rows = [
            obs("h1", "2021-06-01", 50.0),
            obs("h2", "2021-05-01", 51.0),
            obs("h1", "2021-05-10", 49.5),
            obs("h2", "2021-07-01", 52.0),
        ]
        series = build_series(rows, BASELINE)
        assert [s.heart_id for s in series] == ["h1", "h2"]
        for s in series:
            days = [d for d, _ in s.points]
            assert days[0] == 0
            assert days == sorted(days)

    def test_same_date_merged_in_lab(self):
        rows = [obs("h1", "2021-05-01", 49.3), obs("h1", "2021-05-01", 59.3)]
        series = build_series(rows, BASELINE)
        # LAB mean is L=54.3 -> delta E 5, not the mean of the delta Es
        assert series[0].points == ((0, pytest.approx(5.0)),)

    def test_point_count_never_exceeds_input(self):
        rng = np.random.default_rng(5)
        rows = []
        for _ in range(60):
            day = int(rng.integers(0, 10))
            rows.append(obs("h1", f"2021-05-{day + 1:02d}", float(rng.uniform(45, 60))))
        series = build_series(rows, BASELINE)
        assert sum(len(s.points) for s in series) <= len(rows)

    def test_empty_input(self):
        assert build_series([], BASELINE) == []
