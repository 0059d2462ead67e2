from fractions import Fraction as F

import pytest

from renewal_lab.conjecture import (
    build_perturbation,
    dominance_search,
    exact_recheck,
    no_largest_demo,
    recheck_certificate,
    region_classify,
    region_representatives,
    verify_k3_hat_constraint,
    verify_k3_m3,
)
from renewal_lab.errors import BoundaryPoint, OutOfRange, RequiresTwoRegions
from renewal_lab.masses import SamplePlan, SimplexPoint
from renewal_lab.polylab import MultiPoly, build_Q, variables

pt = SimplexPoint.of


class TestRegions:
    def test_k3(self):
        assert region_classify(3, pt(3, ["1/4", "1/2"])) == 1
        assert region_classify(3, pt(3, ["3/4", "0"])) == 2

    def test_tie(self):
        # p1 = p1^2 + p2 on this point
        assert region_classify(3, pt(3, ["1/2", "1/4"])) is None
        with pytest.raises(BoundaryPoint):
            build_perturbation(3, pt(3, ["1/2", "1/4"]), SamplePlan.grid(8))

    def test_representatives_cover_k4(self):
        reps = region_representatives(4)
        assert len({region_classify(4, r) for r in reps}) == len(reps) >= 2

    def test_k2_rejected(self):
        with pytest.raises(OutOfRange):
            region_classify(2, pt(2, ["1/2"]))


class TestPerturbation:
    def test_certificate_k3(self):
        cert = build_perturbation(3, pt(3, ["1/4", "1/2"]), SamplePlan.grid(16))
        assert cert.a > 0 and cert.margin >= 0
        assert cert.touch_value == F(1, 4)
        assert recheck_certificate(cert)

    def test_tampered_certificate_fails(self):
        cert = build_perturbation(3, pt(3, ["3/4", "0"]), SamplePlan.grid(16))
        assert recheck_certificate(cert)
        bad = type(cert)(cert.k, cert.l, cert.p0, cert.a / 1000, cert.scan, cert.margin, cert.touch_value)
        assert not recheck_certificate(bad)

    def test_demo_k3(self):
        rep = no_largest_demo(3, scan=SamplePlan.grid(32))
        assert rep.regions == [1, 2]
        assert all(c.margin >= 0 and recheck_certificate(c) for c in rep.certificates)
        assert "not a polynomial" in rep.explanation()

    def test_demo_needs_two_regions(self):
        with pytest.raises(RequiresTwoRegions):
            no_largest_demo(3, pts=[pt(3, ["1/4", "1/2"]), pt(3, ["1/8", "1/2"])], scan=SamplePlan.grid(8))

    def test_demo_json(self):
        data = no_largest_demo(3, scan=SamplePlan.grid(16)).to_json()
        assert data["regions"] == [1, 2] and len(data["certificates"]) == 2


class TestK3:
    def test_m3_formula(self):
        res = verify_k3_m3(SamplePlan.grid(32))
        assert res.passed and res.checked == 561

    def test_m3_random(self):
        assert verify_k3_m3(SamplePlan.random(300, 9)).passed

    def test_hat_constraint(self):
        rep = verify_k3_hat_constraint()
        assert rep.identity_holds
        assert rep.b_solution.to_text(("a", "b", "c", "d", "e", "f")) == "1 * a + 1 * c"

    @pytest.mark.parametrize("a, c", [(2, 3), (F(1, 2), F(-1, 3)), (0, 0)])
    def test_determinant_values(self, a, c):
        rep = verify_k3_hat_constraint()
        point = [a, 0, c, 0, 0, 0]
        b = a + c
        assert rep.determinant.evaluate(point) == 4 * (a - 1) * c - (b - 1) ** 2 == -((a - c - 1) ** 2)


class TestDominance:
    @pytest.mark.parametrize("cls", ["a", "a-hat"])
    def test_k3_returns_Q3(self, cls):
        res = dominance_search(3, cls, SamplePlan.grid(16))
        assert res.objective <= 1e-6
        assert res.exact_recheck.verdict == "clean"
        assert res.best_candidate == build_Q(3, 3)

    def test_objective_monotone_in_grid(self):
        objs = [dominance_search(3, "a-hat", SamplePlan.grid(r)).objective for r in (8, 16, 32)]
        assert objs[0] + 1e-9 >= objs[1] and objs[1] + 1e-9 >= objs[2]

    def test_k4_reports(self):
        res = dominance_search(4, "a-hat", SamplePlan.grid(8))
        assert res.exact_recheck.verdict in ("clean", "refuted", "anomaly")
        assert res.reproduce() == "renewal-lab probe --k 4 --class a-hat --grid 8"

    def test_exact_recheck_refutes(self):
        p1, p2 = variables(2)
        too_high = build_Q(3, 3) + F(1, 100)
        assert exact_recheck(too_high, 3, "a", SamplePlan.grid(8)).verdict == "refuted"
        # p1^2 dips below Q_3 wherever p1 p2 > 0
        assert exact_recheck(p1 * p1, 3, "a", SamplePlan.grid(8)).verdict == "refuted"
        assert exact_recheck(p1 * p1 + p1 * p2, 3, "a-hat", SamplePlan.grid(8)).verdict == "clean"

    def test_range(self):
        with pytest.raises(OutOfRange):
            dominance_search(6, "a", SamplePlan.grid(4))
        with pytest.raises(ValueError):
            dominance_search(3, "b", SamplePlan.grid(4))
