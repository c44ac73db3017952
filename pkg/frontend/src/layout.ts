import * as d3 from "d3";
import type { GraphDoc, GraphNode } from "./types";

export interface LayoutNode extends GraphNode, d3.SimulationNodeDatum {}

export interface LayoutEdge {
  source: LayoutNode;
  target: LayoutNode;
  weight: number;
}

export interface Layout {
  nodes: LayoutNode[];
  edges: LayoutEdge[];
}

function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

// Runs the force simulation to rest synchronously with a seed derived
// from the key, so the same window and kind always land on the same
// picture.
export function computeLayout(
  doc: GraphDoc,
  width: number,
  height: number,
  seedKey: string,
): Layout {
  const nodes: LayoutNode[] = doc.nodes.map((n) => ({ ...n }));
  const links = doc.edges.map((e) => ({ ...e }));
  const rng = mulberry32(fnv1a(seedKey));
  const sim = d3
    .forceSimulation(nodes)
    .randomSource(rng)
    .force("charge", d3.forceManyBody().strength(-160))
    .force(
      "link",
      d3
        .forceLink<LayoutNode, d3.SimulationLinkDatum<LayoutNode>>(links)
        .id((n) => n.id)
        .distance(70),
    )
    .force("center", d3.forceCenter(width / 2, height / 2))
    .force("collide", d3.forceCollide(16))
    .stop();
  for (let i = 0; i < 300; i++) sim.tick();
  return { nodes, edges: links as unknown as LayoutEdge[] };
}
