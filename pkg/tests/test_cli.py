import csv
import io

import pytest

from mellinquad.cli import (
    InputError,
    RunConfig,
    build_table,
    main,
    parse_sigma_range,
    render,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_table_one_layout(capsys):
    code, out, _ = run_cli(capsys, "table", "1", "--precision-bits", "256", "--format", "csv")
    assert code == 0
    rows = parse_csv(out)
    assert rows[0] == ["sigma", "K", "E"]
    assert [r[0] for r in rows[1:]] == [f"{0.5 * j:.2f}" for j in range(1, 17)]


def test_table_text_has_title_and_rule(capsys):
    code, out, _ = run_cli(capsys, "table", "1", "--precision-bits", "128")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# ")
    assert set(lines[2].replace(" ", "")) == {"-"}
    assert len(lines) == 3 + 16


def test_integrate_sobolev(capsys):
    code, out, _ = run_cli(capsys, "integrate", "sobolev", "--sigma", "4", "--c", "0", "--format", "csv")
    assert code == 0
    header, row = parse_csv(out)
    rec = dict(zip(header, row))
    assert rec["E"] == "6.478229e-05"
    assert rec["bound"] == "6.510417e-05"
    assert float(rec["value"]) == pytest.approx(4 - 6.478229e-05, rel=1e-12)


def test_classify_sobolev(capsys):
    code, out, _ = run_cli(capsys, "classify", "sobolev", "--sigma-range", "2:8192:x2", "--format", "csv")
    assert code == 0
    header, row = parse_csv(out)
    rec = dict(zip(header, row))
    assert rec["verdict"] == "PolynomialRate"
    assert float(rec["parameter"]) == pytest.approx(4.0, abs=0.05)


def test_rate_scan_branch(capsys):
    code, out, _ = run_cli(capsys, "rate-scan", "branch:1/2", "--sigma-range", "5:5:1", "--format", "csv")
    assert code == 0
    header, row = parse_csv(out)
    rec = dict(zip(header, row))
    assert rec["K"] == "19"
    assert f"{float(rec['E']):.3e}" == "1.453e-07"
    assert f"{float(rec['C_exp']):.3e}" == "9.641e-01"


def test_transform_probe(capsys):
    code, out, _ = run_cli(capsys, "transform", "expdecay", "--c", "0.5", "--t", "0", "--tol", "1e-20", "--format", "csv")
    assert code == 0
    header, row = parse_csv(out)
    rec = dict(zip(header, row))
    assert float(rec["abs_diff"]) < 1e-19
    assert rec["re"].startswith("1.7724538509055160273")


def test_csv_round_trip(capsys, tmp_path):
    target = tmp_path / "t6.csv"
    code, _, _ = run_cli(capsys, "table", "6", "--format", "csv", "--out", str(target))
    assert code == 0
    text = target.read_text()
    rows = parse_csv(text)
    again = io.StringIO()
    csv.writer(again, lineterminator="\n").writerows(rows)
    assert again.getvalue() == text
    for row in rows[1:]:
        for cell in row:
            assert format(float(cell), "") and cell == cell.strip()
    assert [float(r[1]) for r in rows[1:]] == sorted((float(r[1]) for r in rows[1:]), reverse=True)


def test_output_is_deterministic(capsys):
    first = run_cli(capsys, "table", "4", "--format", "csv")[1]
    second = run_cli(capsys, "table", "4", "--format", "csv")[1]
    assert first == second


def test_table_branch_parameter_override(capsys):
    code, out, _ = run_cli(capsys, "table", "3", "--a", "5/8", "--sigma-range", "12:12:1", "--format", "csv")
    assert code == 0
    header, row = parse_csv(out)
    assert dict(zip(header, row))["K"] == "8212"


def test_table_five_refuses_low_precision(capsys):
    code, _, err = run_cli(capsys, "table", "5", "--precision-bits", "256")
    assert code == 2
    assert "280" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("integrate", "nosuch", "--sigma", "1"),
        ("integrate", "sobolev"),
        ("integrate", "sobolev", "--sigma", "-1"),
        ("integrate", "sobolev", "--sigma", "1", "--precision-bits", "32"),
        ("rate-scan", "sobolev", "--sigma-range", "4:2:1"),
        ("classify", "sobolev", "--sigma-range", "2:4:1"),
        ("transform", "sinc_power:4", "--c", "0.5"),
    ],
)
def test_invalid_input_exits_two(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err.startswith("error:")


def test_numerical_failure_exits_three(capsys):
    code, _, err = run_cli(capsys, "integrate", "expdecay", "--sigma", "1e-19")
    assert code == 3
    assert err.startswith("numerical failure:")


def test_unknown_table_rejected_by_parser(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["table", "7"])
    assert exc.value.code == 2


def test_sigma_range_forms():
    assert [float(s) for s in parse_sigma_range("1:2:0.25")] == [1, 1.25, 1.5, 1.75, 2]
    assert [int(s) for s in parse_sigma_range("2:32:x2")] == [2, 4, 8, 16, 32]
    for bad in ("1:2", "0:2:1", "1:2:0", "1:4:x1", "a:b:c"):
        with pytest.raises(InputError):
            parse_sigma_range(bad)


def test_render_formats_agree():
    table = build_table(1, RunConfig(command="table", table=1, precision_bits=128))
    text = render(table, "text").splitlines()[3:]
    rows = parse_csv(render(table, "csv"))[1:]
    assert [line.split() for line in text] == rows
