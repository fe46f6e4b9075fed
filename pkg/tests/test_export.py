"""CSV/SVG/JSON writers: exact round trips, reproducible bytes."""

import json

import numpy as np
import pytest

from epitaxy.branches import sweep_lambda
from epitaxy.energy import HeightProfile, evaluate_functional, reconstruct_height
from epitaxy.export import (
    DIAGRAM_HEADER,
    PROFILE_HEADER,
    export_csv,
    export_svg,
    read_profile_csv,
    spec_echo,
    write_summary,
)
from epitaxy.model import BoundaryKind, ProblemSpec
from epitaxy.shoot import NoSolutions, solve_branches

STEP = 1e-3


@pytest.fixture(scope="module")
def clamped_pair():
    return solve_branches(
        ProblemSpec(bc=BoundaryKind.DIRICHLET, lam=100.0, step=STEP)
    )


class TestProfileCsv:
    def test_header_and_column_count(self, clamped_pair, tmp_path):
        path = export_csv(clamped_pair.minimum.profile, tmp_path / "p.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == PROFILE_HEADER
        assert all(line.count(",") == 4 for line in lines[1:])

    def test_round_trip_preserves_every_bit(self, clamped_pair, tmp_path):
        prof = clamped_pair.minimum.profile
        h = reconstruct_height(prof)
        path = export_csv(prof, tmp_path / "p.csv")
        r, w, u, up, upp = read_profile_csv(path)
        assert np.array_equal(r, prof.radii)
        assert np.array_equal(w, prof.w)
        assert np.array_equal(u, h.u)
        assert np.array_equal(up, h.up)
        assert np.array_equal(upp, h.upp)

    def test_round_trip_preserves_the_energy(self, clamped_pair, tmp_path):
        path = export_csv(clamped_pair.minimum.profile, tmp_path / "p.csv")
        r, _w, u, up, upp = read_profile_csv(path)
        rep = evaluate_functional(
            BoundaryKind.DIRICHLET,
            HeightProfile(radii=r, u=u, up=up, upp=upp),
            lam=100.0,
        )
        ref = clamped_pair.energy_min.total
        assert abs(rep.total - ref) <= 1e-12 * max(1.0, abs(ref))

    def test_height_profile_export_recomputes_w(self, tmp_path):
        r = np.linspace(0.0, 1.0, 65)
        h = HeightProfile(
            radii=r,
            u=(1.0 - r * r) ** 2,
            up=-4.0 * r * (1.0 - r * r),
            upp=-4.0 + 12.0 * r * r,
        )
        path = export_csv(h, tmp_path / "h.csv")
        r2, w, u, _up, _upp = read_profile_csv(path)
        assert np.array_equal(w, r2 * h.up)
        assert np.array_equal(u, h.u)

    def test_repeated_export_is_byte_identical(self, clamped_pair, tmp_path):
        a = export_csv(clamped_pair.minimum.profile, tmp_path / "a.csv")
        b = export_csv(clamped_pair.minimum.profile, tmp_path / "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_files_with_wrong_shape(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n4,5,6\n")
        with pytest.raises(ValueError):
            read_profile_csv(bad)

    def test_rejects_unknown_objects(self, tmp_path):
        with pytest.raises(TypeError):
            export_csv(object(), tmp_path / "x.csv")


class TestDiagramCsv:
    def test_absent_branches_leave_fields_empty(self, tmp_path):
        diagram = sweep_lambda(
            BoundaryKind.DIRICHLET,
            [100.0, 200.0],
            base_spec=ProblemSpec(bc=BoundaryKind.DIRICHLET, lam=0.0, step=STEP),
        )
        path = export_csv(diagram, tmp_path / "d.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == DIAGRAM_HEADER
        assert len(lines) == 3
        assert lines[1].startswith("100,13.65590")
        assert lines[2] == "200,,,,"


class TestSvg:
    def test_branch_pair_plot_uses_the_two_branch_colors(
        self, clamped_pair, tmp_path
    ):
        path = export_svg(clamped_pair, tmp_path / "pair.svg")
        text = path.read_text()
        assert text.startswith("<?xml")
        assert "#ff0000" in text
        assert "#008000" in text
        assert "lambda = 100" in text

    def test_no_solutions_plot_carries_the_annotation(self, tmp_path):
        marker = NoSolutions(bc=BoundaryKind.DIRICHLET, lam=200.0)
        path = export_svg(marker, tmp_path / "none.svg")
        text = path.read_text()
        assert "no solutions" in text
        assert "lambda = 200" in text

    def test_repeated_export_is_byte_identical(self, clamped_pair, tmp_path):
        a = export_svg(clamped_pair, tmp_path / "a.svg")
        b = export_svg(clamped_pair, tmp_path / "b.svg")
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_unknown_objects(self, tmp_path):
        with pytest.raises(TypeError):
            export_svg(3.14, tmp_path / "x.svg")


class TestSummaries:
    def test_spec_echo_restates_the_generating_parameters(self):
        spec = ProblemSpec(bc=BoundaryKind.NAVIER, lam=5.0, step=STEP)
        echo = spec_echo(spec)
        assert echo["bc"] == "navier"
        assert echo["lambda"] == 5.0
        assert echo["step"] == STEP
        assert echo["scan_range"] == 40.0
        assert echo["forcing"] == "constant 1"
        assert echo["spec_hash"] == spec.spec_hash()

    def test_write_summary_emits_sorted_parseable_json(self, tmp_path):
        path = write_summary(tmp_path / "s.json", {"b": 1, "a": [1, 2]})
        text = path.read_text()
        assert text.endswith("\n")
        assert json.loads(text) == {"a": [1, 2], "b": 1}
        assert text.index('"a"') < text.index('"b"')
