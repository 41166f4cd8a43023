import json

import pytest

from concurgraph.cli import SCHEMA, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def graphs(tmp_path, capsys):
    lat = tmp_path / "lat.bin"
    und = tmp_path / "und.adj"
    assert run(capsys, "gen", "--lattice", "30x30", "--seed", "2", "-o", str(lat))[0] == 0
    assert run(capsys, "gen", "--random", "400", "--undirected", "--connected", "--seed", "2",
               "-o", str(und))[0] == 0
    return lat, und


@pytest.mark.parametrize("algo", ["scc", "cc", "bcc", "lelists"])
def test_par_and_seq_agree(capsys, graphs, algo):
    lat, und = graphs
    g = str(lat if algo == "scc" else und)
    _, out_par, _ = run(capsys, algo, g, "--threads", "2")
    _, out_seq, _ = run(capsys, algo, g, "--engine", "seq")
    par, seq = json.loads(out_par), json.loads(out_seq)
    assert par["schema"] == SCHEMA and par["algorithm"] == algo
    assert par["result"] == seq["result"]
    assert "total" in par["timings"]


def test_cc_on_directed_input_symmetrizes(capsys, graphs):
    lat, _ = graphs
    code, out, _ = run(capsys, "cc", str(lat), "--threads", "1")
    assert code == 0 and json.loads(out)["graph"]["symmetric"]


def test_compare_rounds(capsys, graphs):
    lat, _ = graphs
    _, out, _ = run(capsys, "scc", str(lat), "--threads", "1", "--compare-rounds")
    cmp = json.loads(out)["rounds"]["compare"]
    assert cmp["first_scc_forward_tau1"] >= cmp["first_scc_forward_tau"]


def test_stream_records(capsys, graphs):
    _, und = graphs
    _, out, _ = run(capsys, "bcc", str(und), "--threads", "1", "--stream")
    recs = [json.loads(line) for line in out.splitlines()]
    assert {r["record"] for r in recs} == {"phase", "result"}
    assert recs[-1]["record"] == "result"
    assert {r["name"] for r in recs if r["record"] == "phase"} >= {"first_cc", "euler_tour", "last_cc"}


def test_outputs_written(capsys, graphs, tmp_path):
    lat, und = graphs
    run(capsys, "scc", str(lat), "--threads", "1", "-o", str(tmp_path / "scc.txt"))
    assert len((tmp_path / "scc.txt").read_text().split()) == 900
    run(capsys, "lelists", str(und), "--threads", "1", "-o", str(tmp_path / "le.txt"))
    assert (tmp_path / "le.txt").read_text().startswith("0: ")


def test_convert_round_trip(capsys, graphs, tmp_path):
    lat, _ = graphs
    txt = tmp_path / "lat.adj"
    back = tmp_path / "back.bin"
    assert run(capsys, "convert", str(lat), str(txt))[0] == 0
    assert run(capsys, "convert", str(txt), str(back))[0] == 0
    assert back.read_bytes() == lat.read_bytes()


def test_bench(capsys, graphs):
    _, und = graphs
    _, out, _ = run(capsys, "bench", str(und), "--algorithm", "cc", "--taus", "1,64",
                    "--repeats", "1", "--threads", "1")
    rows = json.loads(out)["rows"]
    assert [r["tau"] for r in rows] == [1, 64]
    assert rows[0]["relative_to_tau1"] == 1.0
    assert rows[0]["result"] == rows[1]["result"]


def test_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.adj"
    bad.write_text("nonsense\n")
    code, _, err = run(capsys, "scc", str(bad))
    assert code == 2 and "error" in err
    assert run(capsys, "scc", str(tmp_path / "missing.adj"))[0] == 2
    assert run(capsys, "gen", "-o", str(tmp_path / "x.adj"))[0] == 2
    assert run(capsys, "gen", "--lattice", "3by3", "-o", str(tmp_path / "x.adj"))[0] == 2


def test_bad_flag_values(capsys, graphs):
    lat, _ = graphs
    with pytest.raises(SystemExit):
        main(["scc", str(lat), "--tau", "0"])
    assert run(capsys, "scc", str(lat), "--beta", "0.5")[0] == 2
