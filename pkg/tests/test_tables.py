from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from sociotrace.tables import (
    decode_cell,
    encode_cell,
    format_float,
    read_csv,
    read_records,
    record_to_row,
    row_to_record,
    table_header,
    write_csv,
    write_records,
)
from sociotrace.network import TimeWindow


def test_encode_basics():
    assert encode_cell(None) == ""
    assert encode_cell(True) == "true"
    assert encode_cell(False) == "false"
    assert encode_cell(42) == "42"
    assert encode_cell("plain") == "plain"
    assert encode_cell([1, 2]) == "[1, 2]"
    assert encode_cell([(1, 2), (3, 4)]) == "[[1, 2], [3, 4]]"


def test_float_six_significant_digits():
    assert format_float(0.5) == "0.5"
    assert format_float(1 / 3) == "0.333333"
    assert format_float(123456789.0) == "1.23457e+08"


def test_float_format_idempotent():
    # reparsing the 6-digit form and formatting again is a fixed point
    for value in [1 / 3, 2 / 7, 0.1 + 0.2, 1e-7, 123456.789, 0.0, 1.0]:
        once = format_float(value)
        twice = format_float(float(once))
        assert once == twice


def test_timestamp_roundtrip_preserves_offset():
    stamp = datetime(2021, 5, 1, 12, 30, tzinfo=timezone(timedelta(minutes=120)))
    text = encode_cell(stamp)
    assert text.endswith("+02:00")
    back = decode_cell(text, datetime)
    assert back == stamp
    assert back.utcoffset() == timedelta(minutes=120)


def test_optional_decode():
    assert decode_cell("", float | None) is None
    assert decode_cell("0.5", float | None) == 0.5
    assert decode_cell("", str | None) is None


def test_rfc4180_quoting(tmp_path):
    path = str(tmp_path / "t.csv")
    write_csv(path, ["a", "b"], [['has,comma', 'has"quote'], ["\nnewline", "plain"]])
    raw = open(path, encoding="utf-8", newline="").read()
    assert '"has,comma"' in raw
    assert '"has""quote"' in raw
    header, rows = read_csv(path)
    assert header == ["a", "b"]
    assert rows == [['has,comma', 'has"quote'], ["\nnewline", "plain"]]


def test_lf_line_endings(tmp_path):
    path = str(tmp_path / "t.csv")
    write_csv(path, ["a"], [["1"], ["2"]])
    raw = open(path, "rb").read()
    assert b"\r" not in raw


def test_empty_table_header_only(tmp_path):
    path = str(tmp_path / "t.csv")
    write_csv(path, ["x", "y"], [])
    assert open(path, encoding="utf-8").read() == "x,y\n"


@dataclass
class Sample:
    window: TimeWindow
    name: str
    score: float | None
    flags: list[str]
    pairs: list[tuple[int, int]]
    active: bool
    count: int


def make_sample() -> Sample:
    return Sample(
        window=TimeWindow(
            index=1,
            start=datetime(2021, 1, 1, tzinfo=timezone.utc),
            end=datetime(2021, 4, 1, tzinfo=timezone.utc),
        ),
        name="ex,ample",
        score=1 / 3,
        flags=["a", "b"],
        pairs=[(1, 2), (3, 4)],
        active=True,
        count=7,
    )


def test_window_expansion_in_header():
    assert table_header(Sample) == [
        "window_index",
        "window_start",
        "window_end",
        "name",
        "score",
        "flags",
        "pairs",
        "active",
        "count",
    ]


def test_record_roundtrip(tmp_path):
    sample = make_sample()
    row = record_to_row(sample)
    back = row_to_record(Sample, row)
    # score passed through %.6g: compare through the same formatting
    assert back.window == sample.window
    assert back.name == sample.name
    assert back.flags == sample.flags
    assert back.pairs == sample.pairs
    assert back.active is True
    assert back.count == 7
    assert format_float(back.score) == format_float(sample.score)


def test_file_roundtrip_identical_rows(tmp_path):
    path = str(tmp_path / "records.csv")
    samples = [make_sample()]
    write_records(path, Sample, samples)
    back = read_records(path, Sample)
    # writing the re-parsed records again produces identical bytes
    path2 = str(tmp_path / "records2.csv")
    write_records(path2, Sample, back)
    assert open(path, "rb").read() == open(path2, "rb").read()


def test_none_roundtrips_as_empty(tmp_path):
    sample = make_sample()
    sample.score = None
    path = str(tmp_path / "records.csv")
    write_records(path, Sample, [sample])
    assert read_records(path, Sample)[0].score is None


def test_atomic_write_no_partial_files(tmp_path):
    path = str(tmp_path / "out.csv")
    write_csv(path, ["a"], [["1"]])
    leftovers = [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]
    assert leftovers == []
