import json
import subprocess
import sys

import pytest

from totipotent import __version__, cli
from totipotent.bundle import output_digests, recompute_digests
from totipotent.exactmaps import PiecewiseTranslation, from_atom_permutation
from totipotent.odometer import u_n


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    config = root / "config.txt"
    config.write_text("muY = 3/5\nballCount = 4\n")
    out = root / "bundle"
    assert cli.main(["build", "--config", str(config), "--out", str(out)]) == 0
    return out


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBuild:
    def test_bundle_layout(self, bundle):
        names = {str(p.relative_to(bundle)) for p in bundle.rglob("*") if p.is_file()}
        for name in ("config.txt", "alpha.json", "witnesses.json", "reports.json", "provenance.log", "manifest.json"):
            assert name in names
        for n in range(1, 5):
            for suffix in (".json", ".dot", "_partial.dot"):
                assert f"balls/ball_{n:02d}{suffix}" in names
        manifest = json.loads((bundle / "manifest.json").read_text())
        assert manifest["tool_version"] == __version__
        assert set(manifest["timing"]) == {"build_seconds", "verify_seconds"}
        assert recompute_digests(bundle) == output_digests(bundle)
        assert set(json.loads((bundle / "alpha.json").read_text())["generators"]) == {"a1", "a2"}

    def test_missing_config(self, tmp_path, capsys):
        code, _, err = run(capsys, "build", "--config", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "o"))
        assert code == 2 and "not found" in err

    def test_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "c.txt"
        cfg.write_text("muY = 2/5\n")
        code, _, err = run(capsys, "build", "--config", str(cfg), "--out", str(tmp_path / "o"))
        assert code == 2 and "1/2<μ(Y)<1 violated: muY = 2/5" in err

    def test_infeasible(self, tmp_path, capsys):
        cfg = tmp_path / "c.txt"
        cfg.write_text("level = 3\nprecycleC = 1/4\nmuY = 11/20\n")
        code, _, err = run(capsys, "build", "--config", str(cfg), "--out", str(tmp_path / "o"))
        assert code == 3 and "infeasible" in err
        assert not (tmp_path / "o").exists()


class TestVerify:
    def test_passes(self, bundle, capsys):
        code, out, _ = run(capsys, "verify", str(bundle))
        assert code == 0
        reports = json.loads(out)
        assert [r["title"] for r in reports] == ["assembly", "step4", "totipotency", "certificates"]
        assert all(r["passed"] for r in reports)

    def test_missing_bundle(self, tmp_path, capsys):
        code, _, _ = run(capsys, "verify", str(tmp_path / "absent"))
        assert code == 2

    def test_garbled_field_is_named(self, bundle, tmp_path, capsys):
        import shutil

        bad = tmp_path / "bad"
        shutil.copytree(bundle, bad)
        wit = json.loads((bad / "witnesses.json").read_text())
        wit["T"] = {"pieces": "oops"}
        (bad / "witnesses.json").write_text(json.dumps(wit))
        code, out, err = run(capsys, "verify", str(bad))
        assert code == 1 and "witnesses.json:T" in err
        assert json.loads(out)[0]["passed"] is False

    def test_tampered_piece_offset_names_the_clause(self, bundle, tmp_path, capsys):
        import shutil

        bad = tmp_path / "tampered"
        shutil.copytree(bundle, bad)
        alpha = json.loads((bad / "alpha.json").read_text())
        pieces = alpha["generators"]["a2"]["pieces"]
        seen = {}
        for k, piece in enumerate(pieces):
            if piece["len"] in seen:
                j = seen[piece["len"]]
                pieces[j]["dst_start"], piece["dst_start"] = piece["dst_start"], pieces[j]["dst_start"]
                break
            seen[piece["len"]] = k
        (bad / "alpha.json").write_text(json.dumps(alpha))
        code, _, err = run(capsys, "verify", str(bad))
        assert code == 1
        assert "FAILED assembly: alpha[a2] matches its factors" in err
        assert "a1" not in err


class TestEnumerate:
    def test_counts(self, capsys):
        code, out, _ = run(capsys, "enumerate-balls", "--max", "3")
        assert code == 0
        assert json.loads(out)["by_size"] == {"1": 3, "2": 16, "3": 113}

    def test_files(self, tmp_path, capsys):
        code, _, _ = run(capsys, "enumerate-balls", "--min", "2", "--max", "2", "--out", str(tmp_path), "--dot")
        assert code == 0
        lines = (tmp_path / "balls.jsonl").read_text().splitlines()
        assert len(lines) == 16 and "code" in json.loads(lines[0])
        assert (tmp_path / "balls.dot").read_text().count("digraph") == 16

    def test_bad_range(self, capsys):
        assert run(capsys, "enumerate-balls", "--min", "3", "--max", "2")[0] == 2


class TestSampling:
    def test_irs_sample(self, bundle, capsys):
        code, out, _ = run(capsys, "irs-sample", str(bundle), "--x", "1/7", "--radius", "2", "--word-len", "4")
        assert code == 0
        data = json.loads(out)
        assert data["point"] == "1/7"
        approx = data["stabilizer_approximation"]
        assert approx["in_perfect_kernel"] == (approx["index"] == "infinite")

    @pytest.mark.parametrize("x", ["0.5", "3/2", "1/0"])
    def test_bad_point(self, bundle, capsys, x):
        assert run(capsys, "irs-sample", str(bundle), "--x", x)[0] == 2


class TestSubgroup:
    def test_finite_index(self, capsys):
        code, out, _ = run(capsys, "subgroup", "a1^2,a2,a1 a2 a1^-1", "--contains", "a1 a2 a1", "--contains", "a1")
        assert code == 0
        data = json.loads(out)
        assert data["index"] == 2 and data["in_perfect_kernel"] is False
        assert data["contains"] == {"a1 a2 a1": True, "a1": False}
        assert "hall_completion" not in data

    def test_isolation(self, capsys):
        code, out, _ = run(capsys, "subgroup", "a1 a2 a1^-1", "--isolation", "6")
        data = json.loads(out)
        assert code == 0 and data["index"] == "infinite"
        assert [s["n"] for s in data["isolation"]["steps"]] == [2, 3, 4, 5, 6]
        assert data["isolation"]["strictly_increasing"] is True

    def test_dot(self, capsys):
        code, out, _ = run(capsys, "subgroup", "a1^2", "--dot")
        assert code == 0 and out.startswith("digraph")

    @pytest.mark.parametrize("argv", [["b7"], ["a1", "--rank", "1"]])
    def test_rejections(self, capsys, argv):
        assert run(capsys, "subgroup", *argv)[0] == 2


class TestDistanceAndDot:
    def test_distance(self, tmp_path, capsys):
        (tmp_path / "u.json").write_text(u_n(2).dumps())
        (tmp_path / "id.json").write_text(PiecewiseTranslation.identity().dumps())
        code, out, _ = run(capsys, "distance", str(tmp_path / "u.json"), str(tmp_path / "id.json"))
        assert code == 0 and out.strip() == "1/2"

    def test_distance_rejects_partial_maps(self, tmp_path, capsys):
        (tmp_path / "p.json").write_text(PiecewiseTranslation.translation(0, "1/2", 0).dumps())
        (tmp_path / "t.json").write_text(from_atom_permutation([1, 0]).dumps())
        assert run(capsys, "distance", str(tmp_path / "p.json"), str(tmp_path / "t.json"))[0] == 2

    def test_export_ball_and_automaton(self, bundle, tmp_path, capsys):
        code, out, _ = run(capsys, "export-dot", str(bundle / "balls" / "ball_01.json"), "--name", "B")
        assert code == 0 and out.startswith("digraph B {") and "doublecircle" in out
        assert out == (bundle / "balls" / "ball_01.dot").read_text().replace("ball_01", "B")
        run(capsys, "subgroup", "a1^2,a2", "--out", str(tmp_path / "s.json"))
        aut = json.loads((tmp_path / "s.json").read_text())["automaton"]
        (tmp_path / "a.json").write_text(json.dumps(aut))
        code, out, _ = run(capsys, "export-dot", str(tmp_path / "a.json"))
        assert code == 0 and '0 -> 0 [label="a2"];' in out

    def test_export_rejects_garbage(self, tmp_path, capsys):
        (tmp_path / "x.json").write_text("{not json")
        assert run(capsys, "export-dot", str(tmp_path / "x.json"))[0] == 2
        (tmp_path / "y.json").write_text('{"size": 2, "maps": [[5, 0]]}')
        assert run(capsys, "export-dot", str(tmp_path / "y.json"))[0] == 2


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        cli.main(["build"])
    assert exc.value.code == 2


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "totipotent.cli", "--version"], capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout.strip() == __version__
