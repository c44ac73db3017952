import type { SessionData, WindowGraphs } from "./data";
import type { CsvRow, GraphDoc } from "./types";

export interface DisplayOptions {
  communityColors: boolean;
  minEdgeWeight: number;
  showLabels: boolean;
}

// Selection state over a loaded output directory. The session never
// mutates the data it was given; it only tracks what is being looked at.
export class ExplorerSession {
  readonly data: SessionData;
  private windowIdx = 0;
  private graphKind: string;
  readonly options: DisplayOptions = {
    communityColors: true,
    minEdgeWeight: 0,
    showLabels: true,
  };

  constructor(data: SessionData) {
    this.data = data;
    this.graphKind = this.availableKinds()[0] ?? "collab_projection";
  }

  get windowIndex(): number {
    return this.windowIdx;
  }

  get kind(): string {
    return this.graphKind;
  }

  get window(): WindowGraphs | null {
    return this.data.windows[this.windowIdx] ?? null;
  }

  availableKinds(): string[] {
    const win = this.window;
    return win ? [...win.graphs.keys()] : [];
  }

  hasKind(kind: string): boolean {
    return this.window?.graphs.has(kind) ?? false;
  }

  selectWindow(index: number): void {
    if (!Number.isInteger(index) || index < 0 || index >= this.data.windows.length) return;
    this.windowIdx = index;
    if (!this.hasKind(this.graphKind)) {
      this.graphKind = this.availableKinds()[0] ?? this.graphKind;
    }
  }

  selectKind(kind: string): void {
    if (this.hasKind(kind)) this.graphKind = kind;
  }

  setMinEdgeWeight(value: number): void {
    // the threshold is never negative
    this.options.minEdgeWeight = Number.isFinite(value) && value > 0 ? value : 0;
  }

  currentGraph(): GraphDoc | null {
    return this.window?.graphs.get(this.graphKind) ?? null;
  }

  private rowFor(rows: CsvRow[]): CsvRow | null {
    const wanted = String(this.window?.entry.index ?? this.windowIdx);
    return rows.find((row) => row["window_index"] === wanted) ?? null;
  }

  smellRow(): CsvRow | null {
    return this.rowFor(this.data.smells.rows);
  }

  demographicsRow(): CsvRow | null {
    return this.rowFor(this.data.demographics.rows);
  }
}
