import json
import math
import subprocess
import sys

import numpy as np
import pytest

from rankfreq.cli import main, parse_config
from rankfreq.core import load_counts, rank
from rankfreq.fit import ComparisonReport, compare, pearson
from rankfreq.infometrics import pointwise_compare
from rankfreq.mixlab import ExperimentReport, geometric_steps
from rankfreq.models import GeometricModel, derive_seed


def write_counts(path, counts, header="type,count"):
    lines = [header] + [f"w{i},{c}" for i, c in enumerate(counts)]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def write_table(path, table):
    path.write_text("type,count\n" + "".join(f"{k},{v}\n" for k, v in sorted(table.entries.items())))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def tsv(text):
    lines = [l.split("\t") for l in text.splitlines() if not l.startswith("#")]
    return lines[0], lines[1:]


@pytest.fixture
def geo_file(tmp_path):
    return write_counts(tmp_path / "geo.csv", [2 ** (20 - r) for r in range(20)])


@pytest.fixture
def zipf_file(tmp_path):
    return write_counts(tmp_path / "zipf.csv", [27720 // r for r in range(1, 13)])


class TestConfig:
    def test_defaults(self):
        assert parse_config(["fit", "-i", "x"]).mode == "both"
        assert parse_config(["compare", "-i", "x"]).mode == "regression"
        assert parse_config(["trajectory", "-i", "x"]).format == "tsv"
        assert parse_config(["plotdata", "-i", "x"]).format == "tsv"
        assert parse_config(["code", "--q", "0.5"]).format == "json"

    def test_argparse_errors_exit_nonzero(self):
        with pytest.raises(SystemExit) as e:
            parse_config(["fit", "--mode", "bayes"])
        assert e.value.code != 0


class TestFit:
    def test_exact_geometric(self, capsys, geo_file):
        code, out, _ = run(capsys, "fit", "-i", geo_file)
        assert code == 0
        (group,) = json.loads(out)["groups"]
        assert group["regression"]["geometric"]["r2"] == pytest.approx(1.0, abs=1e-9)
        assert group["regression"]["geometric"]["params"]["q"] == pytest.approx(0.5, abs=1e-12)
        assert group["regression"]["preferred"] == "geometric"
        assert "mle" in group and group["entropy_bits"] > 0

    def test_json_round_trips(self, capsys, geo_file):
        _, out, _ = run(capsys, "fit", "-i", geo_file)
        rep = ComparisonReport.from_dict(json.loads(out)["groups"][0]["mle"])
        with open(geo_file) as f:
            dist = rank(load_counts(f)[0])
        assert rep == compare(dist, "mle")

    def test_tsv(self, capsys, zipf_file):
        code, out, _ = run(capsys, "fit", "-i", zipf_file, "--format", "tsv")
        header, rows = tsv(out)
        assert code == 0 and len(rows) == 2
        assert rows[0][header.index("preferred")] == "zipf"

    def test_groups_and_schema(self, capsys, tmp_path):
        p = tmp_path / "g.tsv"
        rows = ["name\tn\tregion"] + [f"a{i}\t{2 ** (9 - i)}\tx" for i in range(8)] + [f"b{i}\t{9 - i}\ty" for i in range(5)]
        p.write_text("\n".join(rows) + "\n")
        code, out, _ = run(capsys, "compare", "-i", str(p), "--schema", "type=name,count=n,group=region")
        assert code == 0
        groups = json.loads(out)["groups"]
        assert [g["group"] for g in groups] == [{"region": "x"}, {"region": "y"}]

    def test_token_stream(self, capsys, tmp_path):
        p = tmp_path / "tok.tsv"
        p.write_text("context\ttype\n" + "".join(f"c{j}\tt{i}\n" for j in range(2) for i in range(6) for _ in range(6 - i)))
        code, out, _ = run(capsys, "entropy", "-i", str(p), "--token-stream")
        assert code == 0 and len(json.loads(out)["groups"]) == 2

    def test_min_count(self, capsys, geo_file):
        _, out, _ = run(capsys, "entropy", "-i", geo_file, "--min-count", "1000")
        assert json.loads(out)["groups"][0]["n_types"] == 11

    def test_empty_file(self, capsys, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        assert run(capsys, "fit", "-i", str(p))[0] == 1

    def test_parse_error_lines(self, capsys, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("type,count\na,3\nb,x\nc,1\n")
        code, _, err = run(capsys, "fit", "-i", str(p))
        assert code == 1 and "line 3" in err

    def test_missing_column(self, capsys, geo_file):
        assert run(capsys, "fit", "-i", geo_file, "--schema", "type=name,count=n")[0] == 1

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "fit", "-i", str(tmp_path / "nope.csv"))[0] == 1

    def test_no_input(self, capsys):
        assert run(capsys, "fit")[0] == 1

    def test_insufficient(self, capsys, tmp_path):
        assert run(capsys, "fit", "-i", write_counts(tmp_path / "two.csv", [5, 2]))[0] == 2

    def test_filtered_to_nothing(self, capsys, geo_file):
        assert run(capsys, "fit", "-i", geo_file, "--min-count", "10000000")[0] == 2

    def test_compare_needs_single_mode(self, capsys, geo_file):
        assert run(capsys, "compare", "-i", geo_file, "--mode", "both")[0] == 1

    def test_output_file(self, capsys, tmp_path, geo_file):
        out = tmp_path / "r.json"
        assert run(capsys, "fit", "-i", geo_file, "-o", str(out))[0] == 0
        assert json.loads(out.read_text())["groups"]


class TestSimulate:
    def test_requires_seed(self, capsys):
        code, _, err = run(capsys, "simulate", "--k", "2")
        assert code == 1 and "seed" in err

    def test_single_component(self, capsys):
        code, out, _ = run(capsys, "simulate", "--k", "1", "--tokens", "3000", "--seed", "4")
        rep = ExperimentReport.from_dict(json.loads(out))
        assert code == 0 and rep.pooled == rep.components[0]

    def test_spec_file(self, capsys, tmp_path):
        p = tmp_path / "spec.json"
        p.write_text(json.dumps({"k": 3, "tokens": [100, 200, 300], "seed": 9, "q_lo": 0.6, "q_hi": 0.9}))
        code, out, _ = run(capsys, "simulate", "--spec", str(p), "--format", "tsv")
        header, rows = tsv(out)
        assert code == 0 and header[0] == "component" and rows[-1][:3] == ["pooled", "", "600"]

    @pytest.mark.parametrize("argv", [
        ["--k", "3", "--q-range", "0.9", "--seed", "1"],
        ["--k", "3", "--q-range", "0.9:0.5", "--seed", "1"],
        ["--k", "0", "--seed", "1"],
        ["--k", "2", "--tokens", "5,x", "--seed", "1"],
        ["--seed", "1"],
    ])
    def test_invalid_spec(self, capsys, argv):
        assert run(capsys, "simulate", *argv)[0] == 1

    def test_emergence(self, capsys):
        _, out, _ = run(capsys, "simulate", "--k", "51", "--tokens", "100000", "--seed", "7")
        assert json.loads(out)["summary"]["pooled_preferred"] == "zipf"


class TestPlotdata:
    def test_geometric_affine(self, capsys, geo_file):
        _, out, _ = run(capsys, "plotdata", "-i", geo_file)
        header, rows = tsv(out)
        assert header == ["rank", "count", "prob", "log2_count", "log2_rank"]
        cols = np.array(rows, dtype=float).T
        assert pearson(cols[0], cols[3]) == pytest.approx(-1.0, abs=1e-12)

    def test_zipf_affine(self, capsys, zipf_file):
        _, out, _ = run(capsys, "plotdata", "-i", zipf_file)
        cols = np.array(tsv(out)[1], dtype=float).T
        assert pearson(cols[4], cols[3]) == pytest.approx(-1.0, abs=1e-4)

    @pytest.mark.parametrize("family", ["geometric", "zipf"])
    def test_model_column(self, capsys, tmp_path, family):
        table = GeometricModel(0.85).sample(5000, seed=3)
        path = write_table(tmp_path / "s.csv", table)
        _, out, _ = run(capsys, "plotdata", "-i", path, "--with-model", family)
        header, rows = tsv(out)
        col = np.array([float(r[header.index("model_prob")]) for r in rows])
        dist = rank(table)
        fitted = getattr(compare(dist), family).model(dist.N)
        assert np.array_equal(col, pointwise_compare(dist, fitted).model)


class TestTrajectory:
    def steps(self, tmp_path, qs):
        tables = geometric_steps(qs, 10_000, seed=2024, label_sharing="shared")
        return [write_table(tmp_path / f"d{i}.csv", t) for i, t in enumerate(tables)]

    def test_identical_steps(self, capsys, tmp_path):
        paths = self.steps(tmp_path, [0.8]) * 10
        _, out, _ = run(capsys, "trajectory", *sum((["-i", p] for p in paths), []))
        header, rows = tsv(out)
        px = [float(r[header.index("perplexity")]) for r in rows]
        assert len(rows) == 10 and np.allclose(px, px[0], rtol=1e-12)

    def test_drifting_footer(self, capsys, tmp_path):
        paths = self.steps(tmp_path, np.linspace(0.80, 0.95, 10))
        pop = ",".join(str(10_000 * (i + 1)) for i in range(10))
        code, out, _ = run(capsys, "trajectory", *sum((["-i", p] for p in paths), []), "--population", pop)
        footer = out.splitlines()[-1].split("\t")
        assert code == 0 and footer[0] == "#pearson_population_perplexity"
        assert float(footer[1]) > 0.95

    def test_population_file(self, capsys, tmp_path):
        paths = self.steps(tmp_path, [0.8, 0.9, 0.95])
        pop = tmp_path / "pop.txt"
        pop.write_text("1\n2\n3\n")
        _, out, _ = run(capsys, "trajectory", *sum((["-i", p] for p in paths), []),
                        "--population", f"@{pop}", "--format", "json")
        doc = json.loads(out)
        assert [p["population"] for p in doc["points"]] == [1.0, 2.0, 3.0]
        assert doc["pearson_population_perplexity"] > 0

    def test_single_step(self, capsys, tmp_path):
        _, out, _ = run(capsys, "trajectory", "-i", self.steps(tmp_path, [0.8])[0])
        assert len(tsv(out)[1]) == 1

    def test_population_mismatch(self, capsys, tmp_path):
        paths = self.steps(tmp_path, [0.8, 0.9])
        assert run(capsys, "trajectory", "-i", paths[0], "-i", paths[1], "--population", "1,2,3")[0] == 1

    def test_unreadable_step(self, capsys, tmp_path):
        paths = self.steps(tmp_path, [0.8])
        assert run(capsys, "trajectory", "-i", paths[0], "-i", str(tmp_path / "gone.csv"))[0] == 1


def test_aggregate(capsys, tmp_path):
    tables = geometric_steps(1 - 1 / np.geomspace(2, 10_000, 10), 10_000, seed=5)
    paths = [write_table(tmp_path / f"a{i}.csv", t) for i, t in enumerate(tables)]
    code, out, _ = run(capsys, "aggregate", *sum((["-i", p] for p in paths), []), "--format", "tsv")
    header, rows = tsv(out)
    assert code == 0 and len(rows) == 10
    assert rows[-1][header.index("cumulative_preferred")] == "zipf"


class TestCode:
    def test_half(self, capsys):
        doc = json.loads(run(capsys, "code", "--q", "0.5")[1])
        assert doc["m"] == 1 and doc["efficiency"] == 1.0

    def test_point_nine(self, capsys):
        assert json.loads(run(capsys, "code", "--q", "0.9")[1])["m"] == 7

    @pytest.mark.parametrize("q", ["1.5", "0", "-0.2"])
    def test_out_of_range(self, capsys, q):
        assert run(capsys, "code", "--q", q)[0] == 1

    def test_model_file(self, capsys, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(json.dumps({"family": "zipf", "s": 1.0, "N": 100}))
        doc = json.loads(run(capsys, "code", "--model", str(p))[1])
        assert doc["q"] is None and doc["expected_length_bits"] > doc["entropy_bits"]

    def test_explicit_m_tsv(self, capsys):
        header, rows = tsv(run(capsys, "code", "--q", "0.9", "--m", "3", "--format", "tsv")[1])
        assert header == ["q", "m", "entropy_bits", "expected_length_bits", "efficiency"]
        assert rows[0][1] == "3"


@pytest.mark.parametrize("argv", [
    ["simulate", "--k", "5", "--tokens", "2000", "--seed", "3"],
    ["simulate", "--k", "4", "--tokens", "1000", "--seed", "3", "--format", "tsv", "--mode", "mle"],
])
def test_byte_identical_subprocess(tmp_path, argv):
    outs = []
    for i in range(2):
        out = tmp_path / f"o{i}"
        subprocess.run([sys.executable, "-m", "rankfreq", *argv, "-o", str(out)], check=True)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] and outs[0]
