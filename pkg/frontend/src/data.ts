import { readTable, type CsvTable } from "./csv";
import type { GraphDoc, SkippedFile, UiIndex, WindowEntry } from "./types";

// A session can come from a static file server, from a directory the
// user picked, or (in tests) from an in-memory map. Everything behind
// the same tiny interface: read a name, get text or null.
export interface FileStore {
  read(name: string): Promise<string | null>;
}

export function mapStore(files: Map<string, string>): FileStore {
  return {
    async read(name: string) {
      return files.has(name) ? (files.get(name) as string) : null;
    },
  };
}

export function urlStore(base: string): FileStore {
  const root = base.endsWith("/") ? base : base + "/";
  return {
    async read(name: string) {
      try {
        const resp = await fetch(root + name);
        if (!resp.ok) return null;
        return await resp.text();
      } catch {
        return null;
      }
    },
  };
}

export class NoManifestFound extends Error {
  constructor() {
    super("ui_index.json not found: this directory is not a sociotrace output");
    this.name = "NoManifestFound";
  }
}

export interface WindowGraphs {
  entry: WindowEntry;
  graphs: Map<string, GraphDoc>;
}

export interface SessionData {
  index: UiIndex;
  windows: WindowGraphs[];
  smells: CsvTable;
  demographics: CsvTable;
  smellsPresent: boolean;
  demographicsPresent: boolean;
  aliases: Map<string, string[]>;
  skipped: SkippedFile[];
}

function checkGraphDoc(parsed: unknown): string | null {
  if (typeof parsed !== "object" || parsed === null) return "not a JSON object";
  const doc = parsed as Partial<GraphDoc>;
  if (typeof doc.meta !== "object" || doc.meta === null) return "missing meta";
  if (!Array.isArray(doc.nodes)) return "missing nodes array";
  if (!Array.isArray(doc.edges)) return "missing edges array";
  const ids = new Set<string>();
  for (const node of doc.nodes) {
    if (typeof node?.id !== "string") return "node without string id";
    ids.add(node.id);
  }
  for (const edge of doc.edges) {
    if (typeof edge?.weight !== "number") return "edge without numeric weight";
    if (!ids.has(edge.source) || !ids.has(edge.target)) {
      return `edge references unknown node ${edge.source}->${edge.target}`;
    }
  }
  return null;
}

// Loads everything the manifest references. Malformed graph files are
// skipped (with a reason) rather than failing the whole directory.
export async function loadSession(store: FileStore): Promise<SessionData> {
  const indexText = await store.read("ui_index.json");
  if (indexText === null) throw new NoManifestFound();
  let index: UiIndex;
  try {
    index = JSON.parse(indexText) as UiIndex;
  } catch (err) {
    throw new NoManifestFound();
  }
  if (!Array.isArray(index.windows)) throw new NoManifestFound();

  const skipped: SkippedFile[] = [];
  const windows: WindowGraphs[] = [];
  for (const entry of index.windows) {
    const graphs = new Map<string, GraphDoc>();
    for (const [kind, file] of Object.entries(entry.graphs ?? {})) {
      const text = await store.read(file);
      if (text === null) {
        skipped.push({ file, reason: "file missing" });
        continue;
      }
      let parsed: unknown;
      try {
        parsed = JSON.parse(text);
      } catch (err) {
        skipped.push({ file, reason: `invalid JSON (${(err as Error).message})` });
        continue;
      }
      const problem = checkGraphDoc(parsed);
      if (problem !== null) {
        skipped.push({ file, reason: problem });
        continue;
      }
      graphs.set(kind, parsed as GraphDoc);
    }
    windows.push({ entry, graphs });
  }

  const smellsText = await store.read(index.smells_csv ?? "smells.csv");
  const demoText = await store.read(index.demographics_csv ?? "demographics.csv");
  const aliasText = await store.read("identities.csv");
  const aliases = new Map<string, string[]>();
  if (aliasText !== null) {
    for (const row of readTable(aliasText).rows) {
      const id = row["identity_id"];
      if (id === undefined) continue;
      const list = aliases.get(id) ?? [];
      if (!list.includes(row["raw"])) list.push(row["raw"]);
      aliases.set(id, list);
    }
  }

  return {
    index,
    windows,
    smells: smellsText === null ? { header: [], rows: [] } : readTable(smellsText),
    demographics: demoText === null ? { header: [], rows: [] } : readTable(demoText),
    smellsPresent: smellsText !== null,
    demographicsPresent: demoText !== null,
    aliases,
    skipped,
  };
}
