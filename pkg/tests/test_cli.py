"""Tests for the command-line interface."""

import json
import math
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from chabauty.cli import main
from chabauty.errors import NumericError

GAUSSIAN = '{"gens": [1, [0, 1]]}'
THIN = '{"stratum": "lattice", "basis": [[1, 0], [1, 1e-7]]}'


@pytest.fixture
def invoke(tmp_config):
    """Run the CLI in JSON mode against an empty config."""
    runner = CliRunner()

    def _invoke(*args, as_json=True):
        head = ["--config", str(tmp_config)] + (["--json"] if as_json else [])
        return runner.invoke(main, head + list(args))

    return _invoke


def _payload(result) -> dict:
    return json.loads(result.output.splitlines()[0])


class TestClassify:
    """Canonical forms and exit codes."""

    def test_lattice(self, invoke):
        result = invoke("classify", GAUSSIAN)
        assert result.exit_code == 0
        out = _payload(result)
        assert out["status"] == "ok"
        assert out["result"]["stratum"] == "lattice"
        assert out["result"]["discrete"] is True
        assert out["result"]["covolume"] == pytest.approx(1)

    def test_line_subgroup(self, invoke):
        out = _payload(invoke("classify", "--space", "R", '{"gens": [4, 6]}'))
        assert out["result"]["stratum"] == "cyclic"
        assert out["result"]["descriptor"]["step"] == pytest.approx(2)

    def test_heisenberg_lattice(self, invoke):
        out = _payload(invoke("classify", "--space", "H", '{"kind": "standard-lattice", "n": 3}'))
        assert out["result"]["stratum"] == "L_3(H)"
        assert out["result"]["center_index"] == 3
        assert out["result"]["projection"]["stratum"] == "lattice"

    def test_text_output(self, invoke):
        result = invoke("classify", GAUSSIAN, as_json=False)
        assert result.exit_code == 0
        assert "stratum: lattice" in result.output

    def test_bad_descriptor(self, invoke):
        result = invoke("classify", "{not json")
        assert result.exit_code == 3
        out = _payload(result)
        assert out["status"] == "error"
        assert out["code"] == 3

    def test_inexact_generators(self, invoke):
        assert invoke("classify", '{"gens": [0.5]}').exit_code == 3

    def test_canonical_tolerance_from_config(self, invoke, tmp_config):
        assert invoke("classify", THIN).exit_code == 0
        tmp_config.write_text("[canonical]\ntol = 1e-6\n")
        result = invoke("classify", THIN)
        assert result.exit_code == 3
        assert "degenerate" in _payload(result)["message"]


class TestDist:
    """Distances and numeric failures."""

    def test_zero_to_plane(self, invoke):
        out = _payload(invoke("dist", '{"stratum": "zero"}', '{"stratum": "full"}'))
        assert out["result"]["distance"] == pytest.approx(1 / math.sqrt(2), abs=2e-3)
        assert out["result"]["evaluations"] > 1
        assert "trace" not in out["result"]

    def test_trace_flag(self, invoke):
        out = _payload(invoke("dist", "--trace", "--tol", "0.01", '{"stratum": "zero"}', '{"stratum": "full"}'))
        assert out["result"]["tol"] == 0.01
        assert len(out["result"]["trace"]) == out["result"]["evaluations"]

    def test_residual_reported(self, invoke):
        with patch("chabauty.metric.chabauty_trace", side_effect=NumericError("bisection stalled", residual=0.25)):
            result = invoke("dist", GAUSSIAN, GAUSSIAN)
        assert result.exit_code == 4
        out = _payload(result)
        assert out["result"]["residual"] == 0.25
        assert "residual" in out["message"]

    def test_strict_flag(self, invoke):
        assert invoke("dist", "--strict", '{"stratum": "zero"}', '{"stratum": "full"}').exit_code == 0
        with patch("chabauty.metric.chabauty_trace", side_effect=NumericError("undecided", residual=0.01)) as trace:
            result = invoke("dist", "--strict", GAUSSIAN, GAUSSIAN)
        assert result.exit_code == 4
        assert trace.call_args.args[3].strict is True


class TestLimit:
    """Finite-scale limit checks."""

    def test_collapsing_family(self, invoke):
        result = invoke(
            "limit", "--space", "H", "--radius", "6", "--delta", "0.25",
            '{"family": "collapsing", "n": 1, "ks": [30, 31]}', '{"kind": "collapsing-limit"}',
        )
        assert result.exit_code == 0
        out = _payload(result)["result"]
        assert out["passed"] is True
        assert out["indices"] == [30, 31]
        assert out["failures"] == []

    def test_unbounded_family_needs_start(self, invoke):
        family = '{"family": "scaled", "base": ' + GAUSSIAN + ', "power": 1}'
        result = invoke("limit", "--radius", "2", "--delta", "0.2", family, '{"stratum": "zero"}')
        assert result.exit_code == 2


class TestNeighborhood:
    """N(K, U) membership."""

    def test_close_cyclic_groups(self, invoke):
        out = _payload(invoke(
            "nbhd", "--space", "R", "--k-radius", "3", "--u-radius", "0.2",
            '{"kind": "cyclic", "step": 1}', '{"kind": "cyclic", "step": 1.05}',
        ))
        assert out["result"]["inside"] is True

    def test_bad_radius(self, invoke):
        result = invoke(
            "nbhd", "--space", "R", "--k-radius", "3", "--u-radius", "0",
            '{"kind": "cyclic", "step": 1}', '{"kind": "cyclic", "step": 1}',
        )
        assert result.exit_code == 4


class TestMahler:
    """Compactness verdicts."""

    FAMILY = '[' + GAUSSIAN + ', {"stratum": "lattice", "basis": [[2, 0], [0, "1/2"]]}]'

    def test_plane_family(self, invoke):
        out = _payload(invoke("mahler", "--c-big", "1.5", "--c-small", "0.9", self.FAMILY))["result"]
        assert out["certified"] is False
        assert out["min_norm_collapsing"] is True
        # min_norm is the squared length: (1/2)²
        assert out["inf_min_norm"] == pytest.approx(0.25)

    def test_plane_needs_c_small(self, invoke):
        assert invoke("mahler", "--c-big", "1.5", self.FAMILY).exit_code == 2

    def test_heisenberg_family(self, invoke):
        family = '{"family": "scaled", "base": {"kind": "standard-lattice"}, "power": 2, "ks": [0, 1]}'
        out = _payload(invoke("mahler", "--space", "H", "--c-big", "2", "--u-radius", "0.5", family))["result"]
        assert out["certified"] is False
        assert out["volume_violations"] == [1]

    def test_family_needs_indices(self, invoke):
        family = '{"family": "scaled", "base": ' + GAUSSIAN + ', "power": 1}'
        assert invoke("mahler", "--c-big", "1.5", "--c-small", "0.9", family).exit_code == 3


class TestInvariants:
    """Eisenstein invariants and their inverse."""

    def test_square_lattice(self, invoke):
        out = _payload(invoke("invariants", GAUSSIAN))["result"]
        assert out["stratum"] == "lattice"
        assert out["method"] == "qseries"
        assert out["g3"] == pytest.approx([0, 0], abs=1e-8)
        assert out["g2"][0] > 0
        assert out["j"][0] == pytest.approx(1728, rel=1e-6)

    def test_undefined_on_lines(self, invoke):
        assert invoke("invariants", '{"stratum": "line", "angle": 0}').exit_code == 3

    def test_invert_origin(self, invoke):
        out = _payload(invoke("invert", "0", "0"))["result"]
        assert out["stratum"] == "zero"

    def test_invert_lattice(self, invoke):
        out = _payload(invoke("invert", "[1, 0]", "0"))["result"]
        assert out["stratum"] == "lattice"

    def test_invert_out_of_range(self, invoke):
        result = invoke("invert", "1e300", "1e300")
        assert result.exit_code == 4
        assert _payload(result)["status"] == "error"

    def test_floating_point_errors_are_numeric(self, invoke):
        with patch("chabauty.modular.invert_g", side_effect=OverflowError("math range error")):
            result = invoke("invert", "[1, 0]", "0")
        assert result.exit_code == 4
        assert "math range error" in _payload(result)["message"]


class TestSphere:
    """Forward and inverse sphere maps."""

    def test_infinity_is_plane(self, invoke):
        out = _payload(invoke("sphere-fwd", '{"infinity": true}'))["result"]
        assert out["stratum"] == "full"
        assert out["curve"] is None

    def test_inverse_of_plane(self, invoke):
        out = _payload(invoke("sphere-inv", '{"stratum": "full"}'))["result"]
        assert out["point"] == {"infinity": True}
        assert out["norm"] == "inf"


class TestConfigAndPlots:
    """Configuration dump and figure tables."""

    def test_config_dump_and_write(self, invoke, tmp_path):
        target = tmp_path / "out.toml"
        out = _payload(invoke("config", "--write", str(target)))["result"]
        assert out["metric"]["horizon"] == 4
        assert target.exists()

    def test_emit_trefoil(self, invoke, tmp_path):
        target = tmp_path / "trefoil.csv"
        out = _payload(invoke("emit-plot", "trefoil", "--samples", "12", "--output", str(target)))["result"]
        assert out["rows"] == 12
        assert target.exists()

    def test_bad_ks(self, invoke, tmp_path):
        result = invoke("emit-plot", "collapse-trace", "--ks", "1,x", "--output", str(tmp_path / "t.csv"))
        assert result.exit_code == 2

    def test_example11_trace(self, invoke, tmp_path):
        target = tmp_path / "trace.csv"
        out = _payload(invoke("emit-plot", "example11-trace", "--ks", "1,2", "--output", str(target)))["result"]
        assert out["kind"] == "collapse-trace"
        assert out["rows"] == 2
        assert target.exists()


class TestHeisenbergCommands:
    """The heis subcommands."""

    def test_standard_lattice(self, invoke):
        out = _payload(invoke("heis", "standard-lattice", "2"))["result"]
        assert out["center_index"] == 2
        assert out["central_step"] == pytest.approx(0.5)
        assert out["commutator_step"] == pytest.approx(1)

    def test_standard_lattice_rejects_zero(self, invoke):
        assert invoke("heis", "standard-lattice", "0").exit_code == 2

    def test_member(self, invoke):
        lat = '{"kind": "standard-lattice", "n": 1}'
        assert _payload(invoke("heis", "member", lat, '[1, 1, "1/2"]'))["result"]["member"] is True
        assert _payload(invoke("heis", "member", lat, "[1, 1, 0]"))["result"]["member"] is False

    def test_commutator(self, invoke):
        out = _payload(invoke("heis", "commutator", "[1, 0, 0]", "[0, 1, 0]"))["result"]
        assert out["commutator"] == [0, 0, 1]

    def test_index(self, invoke):
        out = _payload(invoke("heis", "index", '{"kind": "standard-lattice", "n": 3}'))["result"]
        assert out["center_index"] == 3
        assert out["center_step"] == pytest.approx(1 / 3)
        assert out["commutator_step"] == pytest.approx(1)

    def test_index_needs_lattice(self, invoke):
        assert invoke("heis", "index", '{"kind": "trivial"}').exit_code == 3

    def test_automorphism_on_element(self, invoke):
        out = _payload(invoke("heis", "aut", '{"matrix": [[0, -1], [1, 0]]}', "[1, 0, 1]"))["result"]
        assert out["image"] == [0, 1, 1]
        assert out["det"] == 1

    def test_automorphism_on_lattice(self, invoke):
        out = _payload(invoke("heis", "aut", '{"matrix": [[2, 0], [0, 1]]}', '{"kind": "standard-lattice", "n": 3}'))
        assert out["result"]["center_index"] == 3
        assert out["result"]["det"] == 2

    def test_collapse(self, invoke):
        out = _payload(invoke("heis", "collapse", "--k", "2"))["result"]
        assert out["center_index"] == 1
        assert out["limit"]["stratum"] == "C_Z2(H)"
        assert out["limit_projection"]["stratum"] == "cyclic"

    def test_refine(self, invoke):
        out = _payload(invoke("heis", "refine", "--eps", "0.5", GAUSSIAN))["result"]
        assert out["n"] <= 2

    def test_make_lambda_alias(self, invoke):
        out = _payload(invoke("heis", "make-lambda", "2"))["result"]
        assert out["center_index"] == 2
        assert out["central_step"] == pytest.approx(0.5)

    def test_example11_alias(self, invoke):
        out = _payload(invoke("heis", "example11", "--n", "1", "--k", "8"))["result"]
        assert out["center_index"] == 1
        assert out["limit"]["stratum"] == "C_Z2(H)"
        assert out["projection"]["stratum"] == "lattice"
