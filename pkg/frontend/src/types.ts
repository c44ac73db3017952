// Shapes of the files a sociotrace output directory contains. The
// explorer never recomputes anything; it only reads these.

export interface GraphMeta {
  project: string;
  window_index: number;
  window_start: string;
  window_end: string;
  kind: string;
  directed: boolean;
}

export interface GraphNode {
  id: string;
  label: string;
  type: string;
  community?: number;
}

export interface GraphEdge {
  source: string;
  target: string;
  weight: number;
}

export interface GraphDoc {
  meta: GraphMeta;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface WindowEntry {
  index: number;
  start: string;
  end: string;
  graphs: Record<string, string>;
}

export interface UiIndex {
  project: string;
  generated_by: string;
  granularity: string;
  window_days: number;
  windows: WindowEntry[];
  smells_csv: string;
  demographics_csv: string;
}

// One parsed CSV row, cells kept verbatim so the panel can show them
// byte-for-byte.
export type CsvRow = Record<string, string>;

export const GRAPH_KINDS = [
  "collab_projection",
  "collab_temporal",
  "comm_projection",
  "reply",
  "issue_file",
] as const;

export type GraphKind = (typeof GRAPH_KINDS)[number];

export interface SkippedFile {
  file: string;
  reason: string;
}
