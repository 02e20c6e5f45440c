import json
import subprocess
import sys
from pathlib import Path

import pytest

from threecolor.cli import main
from threecolor.dimacs import emit_dimacs, parse_coloring, parse_dimacs
from threecolor.generate import GenParams, generate_planted
from threecolor.graph import build_graph, is_proper_coloring

K4_TEXT = "p edge 4 6\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n"


def run_cli(args):
    return main(args)


class TestGenerate:
    def test_writes_three_files(self, tmp_path):
        out = tmp_path / "inst"
        code = run_cli(["generate", "--n", "40", "--p", "0.5", "--seed", "7",
                        "--out", str(out)])
        assert code == 0
        graph = parse_dimacs((tmp_path / "inst.col").read_text())
        coloring = parse_coloring((tmp_path / "inst.sol").read_text(), graph.n)
        ok, _ = is_proper_coloring(graph, coloring)
        assert ok
        meta = json.loads((tmp_path / "inst.json").read_text())
        assert meta["seed"] == 7 and meta["n"] == 40

    def test_rerun_byte_identical(self, tmp_path):
        for name in ("a", "b"):
            run_cli(["generate", "--n", "30", "--p", "0.4", "--seed", "3",
                     "--out", str(tmp_path / name)])
        for suffix in (".col", ".sol", ".json"):
            assert (tmp_path / ("a" + suffix)).read_bytes() == \
                (tmp_path / ("b" + suffix)).read_bytes()

    def test_p_zero_edgeless(self, tmp_path):
        run_cli(["generate", "--n", "10", "--p", "0", "--out",
                 str(tmp_path / "z")])
        graph = parse_dimacs((tmp_path / "z.col").read_text())
        assert graph.m == 0


class TestColor:
    def test_triangle(self, tmp_path):
        src = tmp_path / "tri.col"
        src.write_text("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
        out = tmp_path / "tri.sol"
        rep = tmp_path / "tri.report.json"
        code = run_cli(["color", "--in", str(src), "--out", str(out),
                        "--report", str(rep)])
        assert code == 0
        graph = parse_dimacs(src.read_text())
        coloring = parse_coloring(out.read_text(), 3)
        ok, _ = is_proper_coloring(graph, coloring)
        assert ok
        report = json.loads(rep.read_text())
        assert report["proper"] is True

    def test_k4_exit_code_2(self, tmp_path):
        src = tmp_path / "k4.col"
        src.write_text(K4_TEXT)
        rep = tmp_path / "k4.report.json"
        code = run_cli(["color", "--in", str(src), "--report", str(rep)])
        assert code == 2
        report = json.loads(rep.read_text())
        assert report["not3colorable"] is True
        cycle = report["witness"]["cycle"]
        assert len(cycle) % 2 == 1

    def test_methods_all_proper(self, tmp_path):
        g, _ = generate_planted(GenParams(n=90, edge_prob=0.5, seed=11))
        src = tmp_path / "g.col"
        src.write_text(emit_dimacs(g))
        for method in ("pipeline", "greedy", "extract", "seek"):
            out = tmp_path / f"{method}.sol"
            code = run_cli(["color", "--in", str(src), "--out", str(out),
                            "--method", method])
            assert code == 0
            coloring = parse_coloring(out.read_text(), g.n)
            ok, _ = is_proper_coloring(g, coloring)
            assert ok

    def test_missing_file_exit_4(self, tmp_path):
        assert run_cli(["color", "--in", str(tmp_path / "nope.col")]) == 4

    def test_trace_written(self, tmp_path):
        g, _ = generate_planted(GenParams(n=80, edge_prob=0.5, seed=1))
        src = tmp_path / "g.col"
        src.write_text(emit_dimacs(g))
        trace_path = tmp_path / "trace.jsonl"
        run_cli(["color", "--in", str(src), "--trace", str(trace_path)])
        lines = trace_path.read_text().splitlines()
        assert lines
        for line in lines:
            json.loads(line)

    def test_params_file_respected(self, tmp_path):
        g, _ = generate_planted(GenParams(n=80, edge_prob=0.5, seed=1))
        src = tmp_path / "g.col"
        src.write_text(emit_dimacs(g))
        pfile = tmp_path / "params.json"
        pfile.write_text(json.dumps(
            {"k": 2.5, "round_cap": 2, "c1": 2.0, "c2": 2.0}
        ))
        rep = tmp_path / "report.json"
        code = run_cli(["color", "--in", str(src), "--method", "seek",
                        "--params", str(pfile), "--report", str(rep)])
        assert code == 0
        report = json.loads(rep.read_text())
        assert report["method"] == "seek"

    def test_inconsistent_params_exit_4(self, tmp_path):
        g, _ = generate_planted(GenParams(n=70, edge_prob=0.5, seed=1))
        src = tmp_path / "g.col"
        src.write_text(emit_dimacs(g))
        pfile = tmp_path / "params.json"
        pfile.write_text(json.dumps({"c1": 2.0}))
        code = run_cli(["color", "--in", str(src), "--params", str(pfile)])
        assert code == 4

    def test_no_side_cuts_flag(self, tmp_path):
        g, _ = generate_planted(GenParams(n=80, edge_prob=0.5, seed=1))
        src = tmp_path / "g.col"
        src.write_text(emit_dimacs(g))
        out = tmp_path / "g.sol"
        code = run_cli(["color", "--in", str(src), "--no-side-cuts",
                        "--out", str(out)])
        assert code == 0
        coloring = parse_coloring(out.read_text(), g.n)
        ok, _ = is_proper_coloring(g, coloring)
        assert ok


class TestVerify:
    def test_claims_roundtrip(self, tmp_path):
        src = tmp_path / "p3.col"
        src.write_text("p edge 3 2\ne 1 2\ne 2 3\n")
        claims = {
            "k": 1.5,
            "claims": [
                {"type": "type1", "vertices": [0, 2]},
                {"type": "multi", "vertices": [0, 1]},
            ],
        }
        cfile = tmp_path / "claims.json"
        cfile.write_text(json.dumps(claims))
        out = tmp_path / "verdicts.json"
        code = run_cli(["verify", "--in", str(src), "--claims", str(cfile),
                        "--out", str(out)])
        assert code == 0
        verdicts = json.loads(out.read_text())
        assert all(v["verified"] for v in verdicts)

    def test_rejection_exit_3(self, tmp_path):
        src = tmp_path / "p3.col"
        src.write_text("p edge 3 2\ne 1 2\ne 2 3\n")
        cfile = tmp_path / "claims.json"
        cfile.write_text(json.dumps([{"type": "type0", "pair": [0, 2]}]))
        code = run_cli(["verify", "--in", str(src), "--claims", str(cfile)])
        assert code == 3

    def test_empty_claims_ok(self, tmp_path):
        src = tmp_path / "p3.col"
        src.write_text("p edge 3 2\ne 1 2\ne 2 3\n")
        cfile = tmp_path / "claims.json"
        cfile.write_text("[]")
        out = tmp_path / "v.json"
        code = run_cli(["verify", "--in", str(src), "--claims", str(cfile),
                        "--out", str(out)])
        assert code == 0
        assert json.loads(out.read_text()) == []

    def test_mono_claim_on_small_instance(self, tmp_path):
        # complete bipartite S x T plus one T-edge forces S monochromatic
        edges = [(0, 1), (0, 2), (0, 3)]
        edges += [(s, t) for s in (1, 2, 3) for t in (4, 5, 6)]
        edges.append((4, 5))
        g = build_graph(7, edges)
        src = tmp_path / "m.col"
        src.write_text(emit_dimacs(g))
        cfile = tmp_path / "claims.json"
        cfile.write_text(json.dumps([
            {"type": "mono", "vertices": [1, 2, 3]},
            {"type": "mono", "vertices": [1, 2, 3], "conditional": [4, 0]},
        ]))
        code = run_cli(["verify", "--in", str(src), "--claims", str(cfile)])
        assert code == 0


class TestBench:
    def test_matrix_shape_and_determinism(self, tmp_path):
        args = ["bench", "--sizes", "40,60", "--densities", "0.5",
                "--seeds", "2", "--methods", "greedy,extract,pipeline",
                "--ablation"]
        csv1, json1 = tmp_path / "b1.csv", tmp_path / "b1.json"
        csv2, json2 = tmp_path / "b2.csv", tmp_path / "b2.json"
        assert run_cli(args + ["--out-csv", str(csv1), "--out-json", str(json1)]) == 0
        assert run_cli(args + ["--out-csv", str(csv2), "--out-json", str(json2)]) == 0
        assert csv1.read_bytes() == csv2.read_bytes()
        rows = csv1.read_text().splitlines()
        assert len(rows) == 1 + 2 * 1 * 2 * 3  # header + sizes*densities*seeds*methods
        summary = json.loads(json1.read_text())
        assert summary["rows"] == 12
        assert "ablation" in summary
        assert summary["ablation"]["mean_y1_ratio_side"] is not None

    def test_csv_columns_fixed(self, tmp_path):
        run_cli(["bench", "--sizes", "30", "--densities", "0.5", "--seeds", "1",
                 "--methods", "greedy", "--out-csv", str(tmp_path / "b.csv"),
                 "--out-json", str(tmp_path / "b.json")])
        header = (tmp_path / "b.csv").read_text().splitlines()[0]
        assert header.split(",")[:6] == ["method", "family", "n", "edge_prob",
                                         "seed", "colors"]


@pytest.mark.slow
def test_cli_subprocess_determinism(tmp_path):
    """Two separate processes produce byte-identical outputs."""
    g, _ = generate_planted(GenParams(n=120, edge_prob=0.5, seed=5))
    src = tmp_path / "g.col"
    src.write_text(emit_dimacs(g))
    outputs = []
    for tag in ("x", "y"):
        out = tmp_path / f"{tag}.sol"
        trace = tmp_path / f"{tag}.jsonl"
        res = subprocess.run(
            [sys.executable, "-m", "threecolor.cli", "color",
             "--in", str(src), "--out", str(out), "--trace", str(trace)],
            capture_output=True,
        )
        assert res.returncode == 0, res.stderr
        outputs.append((out.read_bytes(), trace.read_bytes()))
    assert outputs[0] == outputs[1]
