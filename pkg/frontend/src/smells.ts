import type { CsvRow } from "./types";

export interface PairHooks {
  onPairEnter?: (a: string, b: string) => void;
  onPairLeave?: () => void;
}

const SKIP = new Set(["window_index", "window_start", "window_end"]);

// Renders the metric rows for the selected window. Values come straight
// from the CSV cells; the panel never recomputes a smell. Empty cells
// (nulls on the producing side) show as a dash.
export class SmellPanel {
  private readonly host: HTMLElement;
  private readonly hooks: PairHooks;

  constructor(host: HTMLElement, hooks: PairHooks = {}) {
    this.host = host;
    this.hooks = hooks;
  }

  render(
    smellHeader: string[],
    smellRow: CsvRow | null,
    demoHeader: string[],
    demoRow: CsvRow | null,
    present: boolean,
  ): void {
    this.host.replaceChildren();
    if (!present) {
      this.host.style.display = "none";
      return;
    }
    this.host.style.display = "";
    this.section("Smells", smellHeader, smellRow, true);
    this.section("Demographics", demoHeader, demoRow, false);
  }

  private section(
    title: string,
    header: string[],
    row: CsvRow | null,
    withPairs: boolean,
  ): void {
    const block = document.createElement("div");
    block.className = `panel-section panel-${title.toLowerCase()}`;
    const heading = document.createElement("h3");
    heading.textContent = title;
    block.appendChild(heading);
    if (row === null) {
      const none = document.createElement("p");
      none.className = "no-row";
      none.textContent = "no row for this window";
      block.appendChild(none);
      this.host.appendChild(block);
      return;
    }
    const list = document.createElement("dl");
    for (const field of header) {
      if (SKIP.has(field)) continue;
      const dt = document.createElement("dt");
      dt.textContent = field;
      const dd = document.createElement("dd");
      dd.dataset.field = field;
      const value = row[field] ?? "";
      dd.textContent = value === "" ? "–" : value;
      list.appendChild(dt);
      list.appendChild(dd);
    }
    block.appendChild(list);
    if (withPairs) this.pairChips(block, row["missing_link_pairs"] ?? "");
    this.host.appendChild(block);
  }

  private pairChips(block: HTMLElement, cell: string): void {
    let pairs: unknown;
    try {
      pairs = JSON.parse(cell);
    } catch {
      return;
    }
    if (!Array.isArray(pairs) || pairs.length === 0) return;
    const holder = document.createElement("div");
    holder.className = "pair-chips";
    for (const pair of pairs) {
      if (!Array.isArray(pair) || pair.length !== 2) continue;
      const [a, b] = pair.map(String);
      const chip = document.createElement("span");
      chip.className = "pair-chip";
      chip.dataset.a = a;
      chip.dataset.b = b;
      chip.textContent = `${a} | ${b}`;
      chip.addEventListener("mouseenter", () => this.hooks.onPairEnter?.(a, b));
      chip.addEventListener("mouseleave", () => this.hooks.onPairLeave?.());
      holder.appendChild(chip);
    }
    block.appendChild(holder);
  }
}
