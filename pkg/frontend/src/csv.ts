import type { CsvRow } from "./types";

// Minimal RFC 4180 reader. Cells come back as the exact strings the
// writer produced (after unquoting), which is what the smell panel
// needs for byte-equal display; nothing is coerced to numbers.
export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let cell = "";
  let inQuotes = false;
  let i = 0;
  const push = () => {
    row.push(cell);
    cell = "";
  };
  const endRow = () => {
    push();
    rows.push(row);
    row = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          cell += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i++;
        continue;
      }
      cell += ch;
      i++;
      continue;
    }
    if (ch === '"' && cell === "") {
      inQuotes = true;
      i++;
      continue;
    }
    if (ch === ",") {
      push();
      i++;
      continue;
    }
    if (ch === "\r" && text[i + 1] === "\n") {
      endRow();
      i += 2;
      continue;
    }
    if (ch === "\n") {
      endRow();
      i++;
      continue;
    }
    cell += ch;
    i++;
  }
  if (cell !== "" || row.length > 0) endRow();
  return rows;
}

export interface CsvTable {
  header: string[];
  rows: CsvRow[];
}

export function readTable(text: string): CsvTable {
  const raw = parseCsv(text);
  if (raw.length === 0) return { header: [], rows: [] };
  const [header, ...body] = raw;
  const rows = body.map((cells) => {
    const rec: CsvRow = {};
    header.forEach((name, idx) => {
      rec[name] = cells[idx] ?? "";
    });
    return rec;
  });
  return { header, rows };
}
