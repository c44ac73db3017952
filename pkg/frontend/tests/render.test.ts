import { beforeEach, describe, expect, it } from "vitest";
import { GraphRenderer, type NodeDetail } from "../src/render";
import type { DisplayOptions } from "../src/session";
import type { GraphDoc } from "../src/types";
import { fixtureApp, nodeIds, setThreshold, visibleEdges } from "./helpers";

beforeEach(() => {
  document.body.replaceChildren();
});

const DEFAULTS: DisplayOptions = {
  communityColors: true,
  minEdgeWeight: 0,
  showLabels: true,
};

function host(): HTMLElement {
  const div = document.createElement("div");
  document.body.appendChild(div);
  return div;
}

function smallGraph(directed: boolean): GraphDoc {
  return {
    meta: {
      project: "t",
      window_index: 0,
      window_start: "2021-01-01T00:00:00+00:00",
      window_end: "2021-04-01T00:00:00+00:00",
      kind: directed ? "reply" : "comm_projection",
      directed,
    },
    nodes: [
      { id: "1", label: "a", type: "author", community: 1 },
      { id: "2", label: "b", type: "author", community: 1 },
      { id: "3", label: "c", type: "author", community: 2 },
    ],
    edges: [
      { source: "1", target: "2", weight: 1 },
      { source: "2", target: "3", weight: 4 },
    ],
  };
}

describe("GraphRenderer", () => {
  it("shows an empty state instead of an svg for a graph without nodes", () => {
    const div = host();
    const renderer = new GraphRenderer(div);
    renderer.render(
      { meta: smallGraph(false).meta, nodes: [], edges: [] },
      DEFAULTS,
      new Map(),
    );
    expect(div.querySelector("svg")).toBeNull();
    expect(div.querySelector(".empty-state")?.textContent).toMatch(/no nodes/);
  });

  it("draws one group per node and one line per edge", () => {
    const div = host();
    new GraphRenderer(div).render(smallGraph(false), DEFAULTS, new Map());
    expect(div.querySelectorAll("g.node")).toHaveLength(3);
    expect(div.querySelectorAll("line.edge")).toHaveLength(2);
  });

  it("adds arrowheads only on directed graphs", () => {
    const div = host();
    const renderer = new GraphRenderer(div);
    renderer.render(smallGraph(true), DEFAULTS, new Map());
    expect(div.querySelector("marker#arrow")).not.toBeNull();
    for (const line of div.querySelectorAll("line.edge")) {
      expect(line.getAttribute("marker-end")).toBe("url(#arrow)");
    }
    renderer.render(smallGraph(false), DEFAULTS, new Map());
    expect(div.querySelector("marker#arrow")).toBeNull();
    for (const line of div.querySelectorAll("line.edge")) {
      expect(line.getAttribute("marker-end")).toBeNull();
    }
  });

  it("marks nodes whose neighbors span two communities as boundary", () => {
    const div = host();
    new GraphRenderer(div).render(smallGraph(false), DEFAULTS, new Map());
    // node 2 touches communities 1 and 2; nodes 1 and 3 each see one
    expect(div.querySelector('g[data-node-id="2"]')?.classList.contains("boundary")).toBe(true);
    expect(div.querySelector('g[data-node-id="1"]')?.classList.contains("boundary")).toBe(false);
    expect(div.querySelector('g[data-node-id="3"]')?.classList.contains("boundary")).toBe(false);
  });

  it("colors by community when on, neutral when off", () => {
    const div = host();
    const renderer = new GraphRenderer(div);
    renderer.render(smallGraph(false), DEFAULTS, new Map());
    const fill = (id: string) =>
      div.querySelector(`g[data-node-id="${id}"] circle`)?.getAttribute("fill");
    expect(fill("1")).toBe(fill("2"));
    expect(fill("1")).not.toBe(fill("3"));
    renderer.render(smallGraph(false), { ...DEFAULTS, communityColors: false }, new Map());
    expect(new Set([fill("1"), fill("2"), fill("3")]).size).toBe(1);
  });

  it("hides edges below the weight threshold but keeps all nodes", () => {
    const div = host();
    new GraphRenderer(div).render(
      smallGraph(false),
      { ...DEFAULTS, minEdgeWeight: 2 },
      new Map(),
    );
    const lines = [...div.querySelectorAll("line.edge")];
    expect(lines).toHaveLength(2);
    const hidden = lines.filter((l) => l.getAttribute("display") === "none");
    expect(hidden).toHaveLength(1);
    expect(hidden[0].getAttribute("data-weight")).toBe("1");
    expect(div.querySelectorAll("g.node")).toHaveLength(3);
  });

  it("toggles label visibility", () => {
    const div = host();
    const renderer = new GraphRenderer(div);
    renderer.render(smallGraph(false), DEFAULTS, new Map());
    expect(div.querySelector("text.node-label")?.getAttribute("visibility")).toBeNull();
    renderer.render(smallGraph(false), { ...DEFAULTS, showLabels: false }, new Map());
    expect(div.querySelector("text.node-label")?.getAttribute("visibility")).toBe("hidden");
  });

  it("reports label, degree, weight sum and aliases on click", () => {
    const div = host();
    const seen: NodeDetail[] = [];
    const renderer = new GraphRenderer(div, { onNodeClick: (d) => seen.push(d) });
    renderer.render(
      smallGraph(false),
      DEFAULTS,
      new Map([["2", ["b <b@x>", "bee <b@y>"]]]),
    );
    const group = div.querySelector('g[data-node-id="2"]') as SVGGElement;
    group.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(seen).toHaveLength(1);
    expect(seen[0]).toMatchObject({
      id: "2",
      label: "b",
      degree: 2,
      weightSum: 5,
      aliases: ["b <b@x>", "bee <b@y>"],
    });
  });

  it("lays out the same graph identically on every render", () => {
    const positions = () =>
      [...document.querySelectorAll("g.node")].map((g) => g.getAttribute("transform"));
    const div = host();
    const renderer = new GraphRenderer(div);
    renderer.render(smallGraph(false), DEFAULTS, new Map());
    const first = positions();
    renderer.render(smallGraph(false), DEFAULTS, new Map());
    expect(positions()).toEqual(first);
    expect(new Set(first).size).toBe(first.length);
  });

  it("highlights exactly the requested pair and clears it again", () => {
    const div = host();
    const renderer = new GraphRenderer(div);
    renderer.render(smallGraph(false), DEFAULTS, new Map());
    renderer.highlightPair("1", "3");
    const lit = [...div.querySelectorAll("g.node.highlight")].map(
      (g) => (g as SVGGElement).dataset.nodeId,
    );
    expect(lit.sort()).toEqual(["1", "3"]);
    renderer.clearHighlight();
    expect(div.querySelectorAll("g.node.highlight")).toHaveLength(0);
  });
});

describe("rendering through the app", () => {
  it("hides every edge when the threshold exceeds the maximum weight", async () => {
    const { root } = await fixtureApp();
    expect(visibleEdges(root).length).toBeGreaterThan(0);
    setThreshold(root, 99);
    expect(visibleEdges(root)).toHaveLength(0);
    expect(nodeIds(root)).toHaveLength(5);
    setThreshold(root, 0);
    expect(visibleEdges(root)).toHaveLength(4);
  });

  it("disables a kind button when the window lacks that graph, with a tooltip", async () => {
    const { root } = await fixtureApp((files) => {
      files.delete("window_00000_collab_temporal.json");
    });
    const btn = root.querySelector<HTMLButtonElement>(
      'button[data-kind="collab_temporal"]',
    ) as HTMLButtonElement;
    expect(btn.disabled).toBe(true);
    expect(btn.title).toMatch(/no Collaboration \(temporal\) graph/);
  });
});
