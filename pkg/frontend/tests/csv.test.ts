import { describe, expect, it } from "vitest";
import { parseCsv, readTable } from "../src/csv";

describe("parseCsv", () => {
  it("splits plain rows", () => {
    expect(parseCsv("a,b,c\n1,2,3\n")).toEqual([
      ["a", "b", "c"],
      ["1", "2", "3"],
    ]);
  });

  it("keeps quoted cells verbatim, including commas and brackets", () => {
    const rows = parseCsv('x,"[[1, 2], [2, 3]]",y\n');
    expect(rows).toEqual([["x", "[[1, 2], [2, 3]]", "y"]]);
  });

  it("unescapes doubled quotes", () => {
    expect(parseCsv('"say ""hi""",b\n')).toEqual([['say "hi"', "b"]]);
  });

  it("handles CRLF line endings", () => {
    expect(parseCsv("a,b\r\n1,2\r\n")).toEqual([
      ["a", "b"],
      ["1", "2"],
    ]);
  });

  it("keeps empty cells, including a trailing one", () => {
    expect(parseCsv("a,,c\n1,2,\n")).toEqual([
      ["a", "", "c"],
      ["1", "2", ""],
    ]);
  });

  it("handles a file without a final newline", () => {
    expect(parseCsv("a,b\n1,2")).toEqual([
      ["a", "b"],
      ["1", "2"],
    ]);
  });

  it("keeps newlines inside quoted cells", () => {
    expect(parseCsv('"line1\nline2",x\n')).toEqual([["line1\nline2", "x"]]);
  });
});

describe("readTable", () => {
  it("maps rows onto header names", () => {
    const table = readTable("id,name\n1,ann\n2,bob\n");
    expect(table.header).toEqual(["id", "name"]);
    expect(table.rows).toEqual([
      { id: "1", name: "ann" },
      { id: "2", name: "bob" },
    ]);
  });

  it("returns empty table for empty text", () => {
    expect(readTable("")).toEqual({ header: [], rows: [] });
  });

  it("fills missing trailing cells with empty strings", () => {
    const table = readTable("a,b,c\n1,2\n");
    expect(table.rows[0]).toEqual({ a: "1", b: "2", c: "" });
  });
});
