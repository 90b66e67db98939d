import math

from bandeau.charts import percentile_chart, read_sweep_csv, sweep_chart, write_sweep_csv


def rows_fixture():
    return [
        {"k": 0, "objective": 190.5, "bestAtMost": 190.5, "uncovered": 0, "cuts": ""},
        {"k": 1, "objective": 120.25, "bestAtMost": 120.25, "uncovered": 0, "cuts": "40"},
        {"k": 2, "objective": float("inf"), "bestAtMost": 120.25, "uncovered": 0, "cuts": ""},
        {"k": 3, "objective": 39.0, "bestAtMost": 39.0, "uncovered": 0, "cuts": "30 60 90"},
    ]


def test_sweep_csv_round_trip(tmp_path):
    path = tmp_path / "sweep.csv"
    write_sweep_csv(str(path), rows_fixture())
    back = read_sweep_csv(str(path))
    assert [r["k"] for r in back] == [0, 1, 2, 3]
    assert back[0]["objective"] == 190.5
    assert math.isinf(back[2]["objective"])
    assert back[3]["bestAtMost"] == 39.0


def test_sweep_chart_renders_png_and_svg(tmp_path):
    finite = [r for r in rows_fixture() if math.isfinite(r["objective"])]
    for name in ("chart.png", "chart.svg"):
        out = tmp_path / name
        sweep_chart(finite, str(out))
        assert out.stat().st_size > 500


def test_percentile_chart_renders(tmp_path):
    series = {
        "metopic": [[200.0, 90.0, 50.0, 30.0], [180.0, 80.0, 40.0, 20.0],
                    [220.0, 100.0, 66.0, 41.0]],
        "sagittal": [[800.0, 200.0, 90.0, 40.0], [750.0, 210.0, 80.0, 35.0]],
    }
    out = tmp_path / "percentiles.png"
    percentile_chart(series, str(out))
    assert out.stat().st_size > 1000
