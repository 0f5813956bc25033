"""Renderer unit tests on synthetic CSVs with the documented headers."""

import pytest

from satris_plots import PlotSpec, render
from satris_plots.render import read_rows

FIG3_CSV = """elevation_deg,pga_coverage,exhaustive_coverage,random_coverage,bound_coverage
30,0.52,0.53,0.21,0.2
45,0.61,0.61,0.33,0.3
60,0.72,0.73,0.4,0.38
"""

FIG4_CSV = """density,gamma,optimized_coverage,random_coverage
25,0.25,0.3,0.12
25,0.5,0.55,0.22
50,0.25,0.42,0.18
50,0.5,0.66,0.3
"""

FIG5_CSV = """k_train,train_coverage,test_coverage_mean,test_coverage_std
5,0.5,0.41,0.04
10,0.48,0.44,0.03
30,0.47,0.46,0.02
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestRender:
    def test_fig3_four_curves(self, tmp_path):
        src = write(tmp_path, "fig3.csv", FIG3_CSV)
        res = render(PlotSpec(str(src), "fig3", str(tmp_path / "f3.png")))
        assert res.output_path.exists()
        assert res.legend_labels == ["pga_coverage", "exhaustive_coverage",
                                     "random_coverage", "bound_coverage"]

    def test_fig4_curve_per_density_and_method(self, tmp_path):
        src = write(tmp_path, "fig4.csv", FIG4_CSV)
        res = render(PlotSpec(str(src), "fig4", str(tmp_path / "f4.png")))
        assert len(res.legend_labels) == 4  # 2 densities x 2 methods
        for col in ("optimized_coverage", "random_coverage"):
            assert any(col in lab for lab in res.legend_labels)

    def test_fig4_single_gamma_row_renders(self, tmp_path):
        src = write(tmp_path, "one.csv",
                    "density,gamma,optimized_coverage,random_coverage\n"
                    "25,0.5,0.4,0.2\n")
        res = render(PlotSpec(str(src), "fig4", str(tmp_path / "one.png")))
        assert res.output_path.exists()
        assert res.n_rows == 1

    def test_fig5_train_and_test_series(self, tmp_path):
        src = write(tmp_path, "fig5.csv", FIG5_CSV)
        res = render(PlotSpec(str(src), "fig5", str(tmp_path / "f5.png")))
        assert res.legend_labels == ["train_coverage", "test_coverage_mean"]

    def test_missing_column_named_in_error(self, tmp_path):
        src = write(tmp_path, "bad.csv",
                    "elevation_deg,pga_coverage\n30,0.5\n")
        with pytest.raises(ValueError, match="exhaustive_coverage"):
            render(PlotSpec(str(src), "fig3", str(tmp_path / "x.png")))

    def test_wrong_kind_header_rejected(self, tmp_path):
        src = write(tmp_path, "fig3.csv", FIG3_CSV)
        with pytest.raises(ValueError, match="density"):
            render(PlotSpec(str(src), "fig4", str(tmp_path / "x.png")))

    def test_empty_csv_rejected(self, tmp_path):
        src = write(tmp_path, "empty.csv",
                    "k_train,train_coverage,test_coverage_mean,test_coverage_std\n")
        with pytest.raises(ValueError, match="no data rows"):
            render(PlotSpec(str(src), "fig5", str(tmp_path / "x.png")))

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="figure kind"):
            PlotSpec("x.csv", "fig9", "y.png")

    def test_input_never_modified(self, tmp_path):
        src = write(tmp_path, "fig5.csv", FIG5_CSV)
        before = src.read_bytes()
        render(PlotSpec(str(src), "fig5", str(tmp_path / "f5.png")))
        assert src.read_bytes() == before

    def test_deterministic_output_bytes(self, tmp_path):
        src = write(tmp_path, "fig3.csv", FIG3_CSV)
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        render(PlotSpec(str(src), "fig3", str(a), title="t"))
        render(PlotSpec(str(src), "fig3", str(b), title="t"))
        assert a.read_bytes() == b.read_bytes()


class TestReadRows:
    def test_values_parsed_as_floats(self, tmp_path):
        src = write(tmp_path, "fig5.csv", FIG5_CSV)
        rows = read_rows(src, "fig5")
        assert rows[0]["k_train"] == 5.0
        assert rows[2]["test_coverage_std"] == 0.02
