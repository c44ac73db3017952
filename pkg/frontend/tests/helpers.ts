import { readdirSync, readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { buildApp, type App } from "../src/app";
import { loadSession, mapStore, type SessionData } from "../src/data";

export const FIXTURE_DIR = join(
  dirname(fileURLToPath(import.meta.url)),
  "fixtures",
  "out",
);

// The committed fixture is a real pipeline output directory; tests read
// it into a map, which is the same shape the directory picker produces.
export function fixtureFiles(): Map<string, string> {
  const files = new Map<string, string>();
  for (const name of readdirSync(FIXTURE_DIR)) {
    files.set(name, readFileSync(join(FIXTURE_DIR, name), "utf-8"));
  }
  return files;
}

export interface Built {
  app: App;
  root: HTMLElement;
  data: SessionData;
}

export async function fixtureApp(
  mutate?: (files: Map<string, string>) => void,
): Promise<Built> {
  const files = fixtureFiles();
  mutate?.(files);
  const data = await loadSession(mapStore(files));
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = buildApp(root, data);
  return { app, root, data };
}

export function clickKind(root: HTMLElement, kind: string): void {
  const btn = root.querySelector<HTMLButtonElement>(`button[data-kind="${kind}"]`);
  if (!btn) throw new Error(`no button for kind ${kind}`);
  btn.click();
}

export function pickWindow(root: HTMLElement, index: number): void {
  const select = root.querySelector<HTMLSelectElement>(".window-select");
  if (!select) throw new Error("no window selector");
  select.value = String(index);
  select.dispatchEvent(new Event("change"));
}

export function setThreshold(root: HTMLElement, value: number): void {
  const input = root.querySelector<HTMLInputElement>(".opt-threshold");
  if (!input) throw new Error("no threshold input");
  input.value = String(value);
  input.dispatchEvent(new Event("input"));
}

export function nodeIds(root: HTMLElement): string[] {
  return [...root.querySelectorAll<SVGGElement>("g.node")].map(
    (g) => g.dataset.nodeId as string,
  );
}

export function visibleEdges(root: HTMLElement): Element[] {
  return [...root.querySelectorAll("line.edge")].filter(
    (line) => line.getAttribute("display") !== "none",
  );
}
