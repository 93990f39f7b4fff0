import math

import pytest

from heartfade.acceptability import (
    AcceptabilityCurve,
    FitError,
    SurveyPoint,
    fit_acceptability,
    fit_objective,
    load_survey,
    predict_agreement,
    threshold_for_agreement,
)


def logistic_points(m, s, des, n=100):
    return [
        SurveyPoint(de, 1.0 / (1.0 + math.exp(-(de - m) / s)), n) for de in des
    ]


class TestFit:
    def test_recovers_known_curve(self):
        points = logistic_points(25.0, 4.0, range(5, 50, 5))
        curve = fit_acceptability(points)
        assert curve.m == pytest.approx(25.0, rel=0.01)
        assert curve.s == pytest.approx(4.0, rel=0.01)

    def test_refit_own_samples(self):
        curve = AcceptabilityCurve(31.7, 6.2)
        dense = [
            SurveyPoint(de, predict_agreement(curve, de), 50)
            for de in range(0, 80, 2)
        ]
        refit = fit_acceptability(dense)
        assert refit.m == pytest.approx(curve.m, rel=0.001)
        assert refit.s == pytest.approx(curve.s, rel=0.001)

    def test_too_few_points(self):
        with pytest.raises(FitError):
            fit_acceptability(logistic_points(25, 4, [10, 30]))

    def test_degenerate_points(self):
        with pytest.raises(FitError):
            fit_acceptability([SurveyPoint(10, 0.5), SurveyPoint(10, 0.6), SurveyPoint(10, 0.7)])
        with pytest.raises(FitError):
            fit_acceptability(
                [SurveyPoint(10, 0.5), SurveyPoint(20, 0.5), SurveyPoint(30, 0.5)]
            )

    def test_weight_duplication_invariance(self):
        base = logistic_points(25.0, 4.0, range(5, 50, 5), n=100)
        # perturb so the fit is not exact, making weights actually matter
        perturbed = [
            SurveyPoint(p.delta_e, min(1.0, p.frac_agree + 0.02 * (-1) ** i), 100)
            for i, p in enumerate(base)
        ]
        split = []
        for p in perturbed:
            split.append(SurveyPoint(p.delta_e, p.frac_agree, 60))
            split.append(SurveyPoint(p.delta_e, p.frac_agree, 40))
        a = fit_acceptability(perturbed)
        b = fit_acceptability(split)
        assert a.m == pytest.approx(b.m, rel=1e-6)
        assert a.s == pytest.approx(b.s, rel=1e-6)

    def test_anchor_set_hits_20pct_at_30(self):
        from importlib import resources

        data = (
            resources.files("heartfade").joinpath("data/acceptability_anchors.csv")
        ).read_bytes()
        points = load_survey(data)
        curve = fit_acceptability(points)
        residual = math.sqrt(fit_objective(curve, points) / sum(p.n_respondents for p in points))
        assert abs(predict_agreement(curve, 30.0) - 0.20) <= max(residual, 0.01)
        assert threshold_for_agreement(curve, 0.2) == pytest.approx(30.0, abs=1.0)
        # near-zero agreement while fading is below the perceptible band
        assert predict_agreement(curve, 10.0) < 0.02
        assert predict_agreement(curve, 20.0) < 0.06


class TestPredictAndInvert:
    curve = AcceptabilityCurve(25.0, 4.0)

    def test_midpoint(self):
        assert predict_agreement(self.curve, 25.0) == pytest.approx(0.5)

    def test_saturation(self):
        assert predict_agreement(self.curve, 25.0 + 20 * 4.0) > 0.999

    def test_strictly_increasing_in_unit_interval(self):
        values = [predict_agreement(self.curve, x) for x in range(0, 120, 3)]
        assert all(0.0 < v < 1.0 for v in values)
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_inverse_pair(self):
        for x in (1.0, 10.0, 25.0, 42.0, 77.0):
            frac = predict_agreement(self.curve, x)
            assert threshold_for_agreement(self.curve, frac) == pytest.approx(
                x, abs=1e-9
            )

    def test_threshold_at_half_is_midpoint(self):
        assert threshold_for_agreement(self.curve, 0.5) == pytest.approx(25.0)

    def test_threshold_domain(self):
        with pytest.raises(ValueError):
            threshold_for_agreement(self.curve, 0.0)
        with pytest.raises(ValueError):
            threshold_for_agreement(self.curve, 1.0)


class TestLoadSurvey:
    def test_valid(self):
        pts = load_survey("delta_e,frac_agree,n_respondents\n10,0.05,150\n")
        assert pts == [SurveyPoint(10.0, 0.05, 150)]

    def test_missing_column(self):
        with pytest.raises(FitError, match="missing column"):
            load_survey("delta_e,frac_agree\n10,0.05\n")

    def test_bad_row(self):
        with pytest.raises(FitError, match="row 2"):
            load_survey("delta_e,frac_agree,n_respondents\n10,high,150\n")
