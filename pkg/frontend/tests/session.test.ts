import { beforeEach, describe, expect, it } from "vitest";
import { loadSession, mapStore, NoManifestFound } from "../src/data";
import { ExplorerSession } from "../src/session";
import { fixtureFiles } from "./helpers";

beforeEach(() => {
  document.body.replaceChildren();
});

describe("loadSession", () => {
  it("loads every window and graph kind of the fixture", async () => {
    const data = await loadSession(mapStore(fixtureFiles()));
    expect(data.index.project).toBe("explorer-fixture");
    expect(data.windows).toHaveLength(2);
    for (const win of data.windows) {
      expect([...win.graphs.keys()].sort()).toEqual([
        "collab_projection",
        "collab_temporal",
        "comm_projection",
        "reply",
      ]);
    }
    expect(data.skipped).toEqual([]);
    expect(data.smellsPresent).toBe(true);
    expect(data.smells.rows).toHaveLength(2);
  });

  it("throws NoManifestFound without ui_index.json", async () => {
    const files = fixtureFiles();
    files.delete("ui_index.json");
    await expect(loadSession(mapStore(files))).rejects.toBeInstanceOf(NoManifestFound);
  });

  it("skips a corrupt graph file but loads the other seven", async () => {
    const files = fixtureFiles();
    files.set("window_00000_reply.json", "{ not json");
    const data = await loadSession(mapStore(files));
    const loaded = data.windows.reduce((n, w) => n + w.graphs.size, 0);
    expect(loaded).toBe(7);
    expect(data.skipped).toHaveLength(1);
    expect(data.skipped[0].file).toBe("window_00000_reply.json");
    expect(data.skipped[0].reason).toMatch(/invalid JSON/);
  });

  it("skips a structurally wrong graph with a reason", async () => {
    const files = fixtureFiles();
    files.set("window_00001_reply.json", JSON.stringify({ meta: {}, nodes: "nope" }));
    const data = await loadSession(mapStore(files));
    expect(data.skipped).toEqual([
      { file: "window_00001_reply.json", reason: "missing nodes array" },
    ]);
  });

  it("flags an edge that references a node the file does not declare", async () => {
    const files = fixtureFiles();
    files.set(
      "window_00001_reply.json",
      JSON.stringify({
        meta: { kind: "reply", directed: true },
        nodes: [{ id: "1", label: "a", type: "author" }],
        edges: [{ source: "1", target: "9", weight: 1 }],
      }),
    );
    const data = await loadSession(mapStore(files));
    expect(data.skipped[0].reason).toMatch(/unknown node/);
  });

  it("reports a graph file the manifest names but the directory lacks", async () => {
    const files = fixtureFiles();
    files.delete("window_00000_comm_projection.json");
    const data = await loadSession(mapStore(files));
    expect(data.skipped).toEqual([
      { file: "window_00000_comm_projection.json", reason: "file missing" },
    ]);
  });

  it("marks the metric panel hidden when smells.csv is absent", async () => {
    const files = fixtureFiles();
    files.delete("smells.csv");
    const data = await loadSession(mapStore(files));
    expect(data.smellsPresent).toBe(false);
  });

  it("collects identity aliases keyed by id", async () => {
    const data = await loadSession(mapStore(fixtureFiles()));
    expect(data.aliases.get("5")).toEqual(["Gil Gómez <gil@example.com>"]);
  });
});

describe("ExplorerSession", () => {
  async function session(): Promise<ExplorerSession> {
    return new ExplorerSession(await loadSession(mapStore(fixtureFiles())));
  }

  it("starts on the first window with a concrete kind", async () => {
    const s = await session();
    expect(s.windowIndex).toBe(0);
    expect(s.availableKinds()).toContain(s.kind);
    expect(s.currentGraph()).not.toBeNull();
  });

  it("ignores out-of-range window selections", async () => {
    const s = await session();
    s.selectWindow(99);
    expect(s.windowIndex).toBe(0);
    s.selectWindow(-1);
    expect(s.windowIndex).toBe(0);
    s.selectWindow(1);
    expect(s.windowIndex).toBe(1);
  });

  it("ignores kinds the window does not have", async () => {
    const s = await session();
    const before = s.kind;
    s.selectKind("issue_file");
    expect(s.kind).toBe(before);
    s.selectKind("reply");
    expect(s.kind).toBe("reply");
  });

  it("keeps the threshold at zero or above", async () => {
    const s = await session();
    s.setMinEdgeWeight(-5);
    expect(s.options.minEdgeWeight).toBe(0);
    s.setMinEdgeWeight(2.5);
    expect(s.options.minEdgeWeight).toBe(2.5);
    s.setMinEdgeWeight(Number.NaN);
    expect(s.options.minEdgeWeight).toBe(0);
  });

  it("finds the smell and demographics rows for the selected window", async () => {
    const s = await session();
    expect(s.smellRow()?.["missing_link_count"]).toBe("4");
    expect(s.demographicsRow()?.["committing_devs"]).toBe("5");
    s.selectWindow(1);
    expect(s.smellRow()?.["missing_link_count"]).toBe("0");
    expect(s.smellRow()?.["st_congruence"]).toBe("");
  });
});
