import json
import math
import os

import numpy as np
import pytest
from fastapi.testclient import TestClient

import bandeau.cli as cli
from bandeau.caseio import (
    CaseFile,
    PlanParams,
    case_from_payload,
    case_to_payload,
    load_case,
    load_plan,
    plan_from_payload,
    plan_to_payload,
    save_case,
    save_plan,
)
from bandeau.dissimilarity import MatchConfig
from bandeau.errors import FormatError
from bandeau.geometry import FunctionCurve
from bandeau.service import create_app
from bandeau.solver import RefitInstance, solve_exact_k
from bandeau.svg import emit_plan_svg
from bandeau.synth import make_case

from test_geometry import fc


def random_case(rng, n=12, m=11):
    fx = np.sort(rng.uniform(0, 50, n)); fx[0], fx[-1] = 0, 50
    gx = np.sort(rng.uniform(0, 50, m)); gx[0], gx[-1] = 0, 50
    if len(np.unique(fx)) != n or len(np.unique(gx)) != m:
        return None
    return CaseFile(
        FunctionCurve.from_xy(fx, rng.uniform(-9, 9, n)),
        FunctionCurve.from_xy(gx, rng.uniform(-9, 9, m)),
        {"bucket": "random", "seed": 1, "units": "mm"},
    )


class TestCaseRoundTrip:
    def test_metopic_case_round_trip_bit_exact(self, tmp_path):
        deformed, ideal = make_case("metopic", 7)
        case = CaseFile(deformed, ideal, {"bucket": "metopic", "seed": 7, "units": "mm"})
        path = tmp_path / "case.json"
        save_case(case, str(path))
        back = load_case(str(path))
        assert back.deformed.points == case.deformed.points
        assert back.ideal.points == case.ideal.points
        assert back.metadata == case.metadata

    def test_hundred_random_round_trips(self, tmp_path):
        rng = np.random.default_rng(0)
        done = 0
        while done < 100:
            case = random_case(rng)
            if case is None:
                continue
            path = tmp_path / f"case_{done}.json"
            save_case(case, str(path))
            back = load_case(str(path))
            assert back.deformed.points == case.deformed.points
            assert back.ideal.points == case.ideal.points
            done += 1

    def test_non_increasing_x_names_index(self, tmp_path):
        payload = {"formatVersion": "1",
                   "deformed": [[0, 0], [2, 1], [1, 2], [3, 0]],
                   "ideal": [[0, 0], [1, 1]], "metadata": {}}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(FormatError, match=r"deformed.*\[2\]"):
            load_case(str(path))

    def test_unknown_version(self, tmp_path):
        payload = {"formatVersion": "9", "deformed": [[0, 0], [1, 1]],
                   "ideal": [[0, 0], [1, 1]], "metadata": {}}
        path = tmp_path / "v9.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(FormatError, match="formatVersion"):
            load_case(str(path))

    def test_json_error_carries_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"formatVersion": "1", "deformed": [[0, 0}')
        with pytest.raises(FormatError, match="line"):
            load_case(str(path))


class TestPlanRoundTrip:
    def plan_doc(self, rng):
        case = None
        while case is None:
            case = random_case(rng)
        params = PlanParams(2, float(rng.choice([0.0, 0.5])), 1.0)
        plan = solve_exact_k(params.to_instance(case))
        return case, params, plan

    def test_hundred_random_plan_round_trips(self, tmp_path):
        rng = np.random.default_rng(12)
        done = 0
        while done < 100:
            case, params, plan = self.plan_doc(rng)
            if not plan.feasible:
                continue
            path = tmp_path / f"plan_{done}.json"
            save_plan(params, plan, case, str(path), solve_millis=1.25)
            back = load_plan(str(path))
            assert back.plan.cuts == plan.cuts
            assert back.plan.clamps == plan.clamps
            assert back.plan.piece_costs == plan.piece_costs
            assert back.plan.objective == plan.objective
            assert back.params == params
            done += 1

    def test_inconsistent_plan_rejected(self):
        payload = {
            "formatVersion": "1",
            "params": {"k": 0, "delta": 0, "alpha": 1, "mode": "no_rearrangement"},
            "cuts": [], "clamps": [[0, 1]], "pieceCosts": [2.0],
            "uncovered": 0, "objective": 5.0, "solveMillis": 0,
        }
        with pytest.raises(FormatError, match="self-consistent"):
            plan_from_payload(payload)

    def test_infinite_delta_round_trip(self):
        rng = np.random.default_rng(3)
        case = None
        while case is None:
            case = random_case(rng)
        params = PlanParams(1, math.inf, 1.0)
        plan = solve_exact_k(params.to_instance(case))
        if not plan.feasible:
            pytest.skip("random case infeasible under full coverage")
        payload = plan_to_payload(params, plan, case)
        assert payload["params"]["delta"] == "inf"
        back = plan_from_payload(payload)
        assert math.isinf(back.params.delta)


class TestSvg:
    def setup_method(self):
        deformed, ideal = make_case("metopic", 3, n_samples=60)
        self.case = CaseFile(deformed, ideal, {"bucket": "metopic", "seed": 3, "units": "mm"})

    def test_marker_counts_for_three_cuts(self):
        from bandeau.caseio import PlanFile
        params = PlanParams(3, math.inf, 0.3)
        plan = solve_exact_k(params.to_instance(self.case))
        doc = emit_plan_svg(self.case, PlanFile(params, plan))
        assert doc.count('class="cut"') == 3
        assert doc.count('class="clamp"') == 2 * 4
        for color in ("green", "red", "blue"):
            assert color in doc

    def test_identity_case_blue_on_green(self):
        from bandeau.caseio import PlanFile
        case = CaseFile(self.case.ideal, self.case.ideal, {})
        params = PlanParams(0, 0.0, 1.0)
        plan = solve_exact_k(params.to_instance(case))
        doc = emit_plan_svg(case, PlanFile(params, plan))
        polys = [line for line in doc.splitlines() if "polyline" in line]

        def coords(line):
            raw = line.split('points="')[1].split('"')[0]
            return np.array([[float(v) for v in pair.split(",")] for pair in raw.split()])

        green = next(p for p in polys if "green" in p)
        blue = next(p for p in polys if "blue" in p)
        assert np.allclose(coords(green), coords(blue), atol=1e-9)


class TestCli:
    def test_synth_count(self, tmp_path):
        out = tmp_path / "cases"
        assert cli.main(["synth", "--bucket", "sagittal", "--count", "3",
                         "--seed", "5", "--out", str(out)]) == 0
        files = sorted(os.listdir(out))
        assert files == ["sagittal_00005.json", "sagittal_00006.json", "sagittal_00007.json"]

    def test_solve_writes_plan_and_svg(self, tmp_path):
        case_dir = tmp_path / "c"
        cli.main(["synth", "--bucket", "metopic", "--seed", "9", "--out", str(case_dir),
                  "--samples", "60"])
        case_path = case_dir / "metopic_00009.json"
        plan_path = tmp_path / "plan.json"
        svg_path = tmp_path / "plan.svg"
        rc = cli.main(["solve", "--case", str(case_path), "--k", "2", "--delta", "inf",
                       "--alpha", "0.3", "--out", str(plan_path), "--svg", str(svg_path)])
        assert rc == 0
        doc = load_plan(str(plan_path))
        assert doc.plan.feasible and len(doc.plan.cuts) == 2
        assert svg_path.read_text().startswith("<?xml")

    def test_sweep_writes_table_and_chart(self, tmp_path):
        case_dir = tmp_path / "c"
        cli.main(["synth", "--bucket", "metopic", "--seed", "2", "--out", str(case_dir),
                  "--samples", "50"])
        case_path = case_dir / "metopic_00002.json"
        out_csv = tmp_path / "sweep.csv"
        rc = cli.main(["sweep", "--case", str(case_path), "--kmax", "2", "--delta", "inf",
                       "--alpha", "0.3", "--out", str(out_csv)])
        assert rc == 0
        rows = out_csv.read_text().strip().splitlines()
        assert len(rows) == 4  # header + k=0..2
        assert (tmp_path / "sweep.png").exists()

    def test_infeasible_exit_code(self, tmp_path):
        case = CaseFile(fc((0, 0), (1, 0), (2, 0), (30, 0)), fc((0, 0), (1, 0), (2, 0), (3, 0)), {})
        path = tmp_path / "case.json"
        save_case(case, str(path))
        rc = cli.main(["solve", "--case", str(path), "--k", "1", "--alpha", "0.0"])
        assert rc == 2

    def test_validation_exit_code(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        assert cli.main(["solve", "--case", str(bad), "--k", "1"]) == 1

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["solve", "--k", "1"])
        assert err.value.code == 1

    def test_brute_matches_solve(self, tmp_path, capsys):
        rng = np.random.default_rng(8)
        case = None
        while case is None:
            case = random_case(rng, n=8, m=8)
        path = tmp_path / "case.json"
        save_case(case, str(path))
        assert cli.main(["brute", "--case", str(path), "--k", "2", "--alpha", "1.0"]) == 0
        brute_line = capsys.readouterr().out
        assert cli.main(["solve", "--case", str(path), "--k", "2", "--alpha", "1.0"]) == 0
        solve_line = capsys.readouterr().out
        b = float(brute_line.split()[1])
        s = float(solve_line.split()[1])
        assert s == pytest.approx(b, rel=1e-9)

    def test_oracle3p_reports_agreement(self, capsys):
        assert cli.main(["oracle3p", "--sizes", "4,4,4,4,4,6", "--m", "2"]) == 0
        out = capsys.readouterr().out
        assert out.count("NO") == 2


@pytest.fixture()
def client():
    return TestClient(create_app())


def upload_metopic(client, seed=7, samples=60):
    got = client.post("/synth", json={"bucket": "metopic", "seed": seed, "samples": samples})
    assert got.status_code == 200
    entry = got.json()["cases"][0]
    return entry["id"], entry["case"]


class TestService:
    def test_synth_matches_cli_output(self, client, tmp_path):
        case_id, payload = upload_metopic(client, seed=7, samples=60)
        cli.main(["synth", "--bucket", "metopic", "--seed", "7", "--samples", "60",
                  "--out", str(tmp_path)])
        disk = json.load(open(tmp_path / "metopic_00007.json"))
        assert disk["deformed"] == payload["deformed"]
        assert disk["ideal"] == payload["ideal"]

    def test_upload_validation(self, client):
        got = client.post("/cases", json={"formatVersion": "1", "deformed": [[0, 0]],
                                          "ideal": [[0, 0], [1, 1]], "metadata": {}})
        assert got.status_code == 400

    def test_solve_identity_zero(self, client):
        case_id, payload = upload_metopic(client)
        identity = {"formatVersion": "1", "deformed": payload["ideal"],
                    "ideal": payload["ideal"], "metadata": {}}
        up = client.post("/cases", json=identity)
        assert up.status_code == 200
        got = client.post("/solve", json={"caseId": up.json()["id"], "k": 0,
                                          "delta": 0, "alpha": 1.0})
        assert got.status_code == 200
        assert abs(got.json()["objective"]) < 1e-9

    def test_solve_unknown_case(self, client):
        assert client.post("/solve", json={"caseId": "nope", "k": 0}).status_code == 404

    def test_solve_infeasible_is_422(self, client):
        case = CaseFile(fc((0, 0), (1, 0), (2, 0), (30, 0)),
                        fc((0, 0), (1, 0), (2, 0), (3, 0)), {})
        up = client.post("/cases", json=case_to_payload(case))
        got = client.post("/solve", json={"caseId": up.json()["id"], "k": 1, "alpha": 0.0})
        assert got.status_code == 422
        assert got.json()["detail"]["error"] == "infeasible"

    def test_solve_cached_by_content(self, client):
        case_id, _ = upload_metopic(client)
        req = {"caseId": case_id, "k": 1, "delta": "inf", "alpha": 0.3}
        first = client.post("/solve", json=req).json()
        second = client.post("/solve", json=req).json()
        assert first == second
        assert client.get(f"/plans/{first['id']}").json()["objective"] == first["objective"]

    def test_sweep_streams_expected_records(self, client):
        case_id, _ = upload_metopic(client)
        with client.stream("POST", "/sweep", json={"caseId": case_id, "kmax": 3,
                                                   "delta": "inf", "alpha": 0.3}) as resp:
            assert resp.status_code == 200
            lines = [json.loads(line) for line in resp.iter_lines() if line]
        assert [rec["k"] for rec in lines] == [0, 1, 2, 3]
        best = [rec["bestAtMost"] for rec in lines]
        assert all(a >= b for a, b in zip(best, best[1:]))
        solo = client.post("/solve", json={"caseId": case_id, "k": 3,
                                           "delta": "inf", "alpha": 0.3}).json()
        assert solo["objective"] == pytest.approx(lines[3]["objective"], rel=1e-9)

    def test_plan_svg_matches_library_render(self, client):
        case_id, payload = upload_metopic(client)
        plan = client.post("/solve", json={"caseId": case_id, "k": 2,
                                           "delta": "inf", "alpha": 0.3}).json()
        http_svg = client.get(f"/plans/{plan['id']}/svg")
        assert http_svg.status_code == 200
        from bandeau.caseio import PlanFile, plan_from_payload
        case = case_from_payload(payload)
        doc = plan_from_payload({k: v for k, v in plan.items() if k not in ("id", "caseId")})
        assert http_svg.text == emit_plan_svg(case, doc)

    def test_persistence_round_trip(self, tmp_path):
        app = create_app(str(tmp_path))
        with TestClient(app) as c:
            case_id, _ = upload_metopic(c)
            c.post("/solve", json={"caseId": case_id, "k": 0, "delta": 0, "alpha": 1.0})
        fresh = TestClient(create_app(str(tmp_path)))
        assert fresh.get(f"/cases/{case_id}").status_code == 200
        assert len(fresh.get("/cases").json()) >= 1
