import * as d3 from "d3";
import { computeLayout, type LayoutEdge, type LayoutNode } from "./layout";
import type { DisplayOptions } from "./session";
import type { GraphDoc } from "./types";

export interface NodeDetail {
  id: string;
  label: string;
  type: string;
  community: number | null;
  degree: number;
  weightSum: number;
  aliases: string[];
}

export interface RendererHooks {
  onNodeClick?: (detail: NodeDetail) => void;
}

const WIDTH = 860;
const HEIGHT = 600;
const NEUTRAL = "#9aa0a6";

function communityColor(community: number | undefined, enabled: boolean): string {
  if (!enabled || community === undefined) return NEUTRAL;
  return d3.schemeTableau10[community % 10];
}

// Nodes whose neighbors sit in two or more communities bridge the
// partition; they get a heavier outline.
function boundaryIds(doc: GraphDoc): Set<string> {
  const communityOf = new Map(doc.nodes.map((n) => [n.id, n.community]));
  const neighborCommunities = new Map<string, Set<number>>();
  for (const edge of doc.edges) {
    for (const [me, other] of [
      [edge.source, edge.target],
      [edge.target, edge.source],
    ]) {
      const c = communityOf.get(other);
      if (c === undefined) continue;
      let set = neighborCommunities.get(me);
      if (!set) neighborCommunities.set(me, (set = new Set()));
      set.add(c);
    }
  }
  const out = new Set<string>();
  for (const [id, set] of neighborCommunities) {
    if (set.size >= 2) out.add(id);
  }
  return out;
}

export class GraphRenderer {
  private readonly host: HTMLElement;
  private readonly hooks: RendererHooks;
  private doc: GraphDoc | null = null;

  constructor(host: HTMLElement, hooks: RendererHooks = {}) {
    this.host = host;
    this.hooks = hooks;
  }

  render(doc: GraphDoc | null, options: DisplayOptions, aliases: Map<string, string[]>): void {
    this.doc = doc;
    const host = d3.select(this.host);
    host.selectAll("*").remove();
    if (doc === null || doc.nodes.length === 0) {
      host
        .append("div")
        .attr("class", "empty-state")
        .text("Nothing to draw: this graph has no nodes.");
      return;
    }

    const seedKey = `${doc.meta.window_index}:${doc.meta.kind}`;
    const layout = computeLayout(doc, WIDTH, HEIGHT, seedKey);
    const boundary = boundaryIds(doc);

    const svg = host
      .append("svg")
      .attr("class", "graph")
      .attr("viewBox", `0 0 ${WIDTH} ${HEIGHT}`)
      .attr("data-kind", doc.meta.kind)
      .attr("data-directed", String(doc.meta.directed));

    if (doc.meta.directed) {
      svg
        .append("defs")
        .append("marker")
        .attr("id", "arrow")
        .attr("viewBox", "0 -5 10 10")
        .attr("refX", 20)
        .attr("refY", 0)
        .attr("markerWidth", 7)
        .attr("markerHeight", 7)
        .attr("orient", "auto")
        .append("path")
        .attr("d", "M0,-5L10,0L0,5")
        .attr("fill", "#555");
    }

    svg
      .append("g")
      .attr("class", "edges")
      .selectAll("line")
      .data(layout.edges)
      .join("line")
      .attr("class", "edge")
      .attr("data-source", (e: LayoutEdge) => e.source.id)
      .attr("data-target", (e: LayoutEdge) => e.target.id)
      .attr("data-weight", (e: LayoutEdge) => e.weight)
      .attr("x1", (e: LayoutEdge) => e.source.x ?? 0)
      .attr("y1", (e: LayoutEdge) => e.source.y ?? 0)
      .attr("x2", (e: LayoutEdge) => e.target.x ?? 0)
      .attr("y2", (e: LayoutEdge) => e.target.y ?? 0)
      .attr("stroke", "#777")
      .attr("stroke-width", (e: LayoutEdge) => 1 + Math.sqrt(e.weight))
      .attr("marker-end", doc.meta.directed ? "url(#arrow)" : null)
      .attr("display", (e: LayoutEdge) =>
        e.weight < options.minEdgeWeight ? "none" : null,
      );

    const nodeGroups = svg
      .append("g")
      .attr("class", "nodes")
      .selectAll("g")
      .data(layout.nodes)
      .join("g")
      .attr("class", (n: LayoutNode) =>
        boundary.has(n.id) ? "node boundary" : "node",
      )
      .attr("data-node-id", (n: LayoutNode) => n.id)
      .attr("transform", (n: LayoutNode) => `translate(${n.x ?? 0},${n.y ?? 0})`);

    nodeGroups
      .append("circle")
      .attr("r", (n: LayoutNode) => (n.type === "author" ? 11 : 8))
      .attr("fill", (n: LayoutNode) =>
        communityColor(n.community, options.communityColors),
      )
      .attr("stroke", (n: LayoutNode) => (boundary.has(n.id) ? "#111" : "#fff"))
      .attr("stroke-width", (n: LayoutNode) => (boundary.has(n.id) ? 3 : 1.25));

    nodeGroups
      .append("text")
      .attr("class", "node-label")
      .attr("dy", 24)
      .attr("text-anchor", "middle")
      .attr("visibility", options.showLabels ? null : "hidden")
      .text((n: LayoutNode) => n.label);

    const hooks = this.hooks;
    const detailFor = (node: LayoutNode): NodeDetail => {
      let degree = 0;
      let weightSum = 0;
      for (const edge of doc.edges) {
        if (edge.source === node.id || edge.target === node.id) {
          degree += 1;
          weightSum += edge.weight;
        }
      }
      return {
        id: node.id,
        label: node.label,
        type: node.type,
        community: node.community ?? null,
        degree,
        weightSum,
        aliases: node.type === "author" ? (aliases.get(node.id) ?? []) : [],
      };
    };
    nodeGroups.on("click", function (_event: unknown, node: LayoutNode) {
      hooks.onNodeClick?.(detailFor(node));
    });
  }

  // used by the smell panel when hovering a missing-link pair
  highlightPair(a: string, b: string): void {
    this.clearHighlight();
    d3.select(this.host)
      .selectAll<SVGGElement, LayoutNode>("g.node")
      .filter((n) => n.id === a || n.id === b)
      .classed("highlight", true);
  }

  clearHighlight(): void {
    d3.select(this.host).selectAll("g.node").classed("highlight", false);
  }

  currentDoc(): GraphDoc | null {
    return this.doc;
  }
}
