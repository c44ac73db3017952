import type { SessionData } from "./data";
import { GraphRenderer, type NodeDetail } from "./render";
import { ExplorerSession } from "./session";
import { SmellPanel } from "./smells";
import { GRAPH_KINDS } from "./types";

const KIND_LABELS: Record<string, string> = {
  collab_projection: "Collaboration",
  collab_temporal: "Collaboration (temporal)",
  comm_projection: "Communication",
  reply: "Replies",
  issue_file: "Issues x files",
};

function kindOrder(present: Set<string>): string[] {
  const ordered: string[] = [];
  for (const kind of GRAPH_KINDS) if (present.has(kind)) ordered.push(kind);
  for (const kind of present) if (!ordered.includes(kind)) ordered.push(kind);
  return ordered;
}

// Everything the explorer shows for one loaded output directory:
// toolbar, graph, node details, metric panel, skipped-file list.
export class App {
  readonly session: ExplorerSession;
  readonly renderer: GraphRenderer;
  readonly panel: SmellPanel;
  private readonly windowSelect: HTMLSelectElement;
  private readonly kindHost: HTMLElement;
  private readonly graphHost: HTMLElement;
  private readonly detailHost: HTMLElement;
  private readonly allKinds: string[];

  constructor(root: HTMLElement, data: SessionData) {
    this.session = new ExplorerSession(data);
    root.replaceChildren();

    const heading = document.createElement("h2");
    heading.className = "project-name";
    heading.textContent = `${data.index.project} (${data.index.granularity}, ${data.index.window_days}-day windows)`;
    root.appendChild(heading);

    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    root.appendChild(toolbar);

    this.windowSelect = document.createElement("select");
    this.windowSelect.className = "window-select";
    for (const win of data.windows) {
      const opt = document.createElement("option");
      opt.value = String(win.entry.index);
      opt.textContent = `window ${win.entry.index}: ${win.entry.start} .. ${win.entry.end}`;
      this.windowSelect.appendChild(opt);
    }
    this.windowSelect.addEventListener("change", () => {
      this.session.selectWindow(Number(this.windowSelect.value));
      this.sync();
    });
    toolbar.appendChild(this.windowSelect);

    this.kindHost = document.createElement("span");
    this.kindHost.className = "kind-buttons";
    toolbar.appendChild(this.kindHost);
    const present = new Set<string>();
    for (const win of data.windows) for (const k of win.graphs.keys()) present.add(k);
    this.allKinds = kindOrder(present);
    for (const kind of this.allKinds) {
      const btn = document.createElement("button");
      btn.dataset.kind = kind;
      btn.textContent = KIND_LABELS[kind] ?? kind;
      btn.addEventListener("click", () => {
        this.session.selectKind(kind);
        this.sync();
      });
      this.kindHost.appendChild(btn);
    }

    toolbar.appendChild(this.checkbox("opt-communities", "community colors", true, (on) => {
      this.session.options.communityColors = on;
      this.renderGraph();
    }));
    toolbar.appendChild(this.checkbox("opt-labels", "labels", true, (on) => {
      this.session.options.showLabels = on;
      this.renderGraph();
    }));

    const thresholdWrap = document.createElement("label");
    thresholdWrap.textContent = "min edge weight ";
    const threshold = document.createElement("input");
    threshold.type = "number";
    threshold.min = "0";
    threshold.step = "0.5";
    threshold.value = "0";
    threshold.className = "opt-threshold";
    threshold.addEventListener("input", () => {
      this.session.setMinEdgeWeight(Number(threshold.value));
      threshold.value = String(this.session.options.minEdgeWeight);
      this.renderGraph();
    });
    thresholdWrap.appendChild(threshold);
    toolbar.appendChild(thresholdWrap);

    const row = document.createElement("div");
    row.className = "layout-row";
    root.appendChild(row);
    this.graphHost = document.createElement("div");
    this.graphHost.className = "graph-host";
    row.appendChild(this.graphHost);
    const side = document.createElement("div");
    side.className = "side";
    row.appendChild(side);
    this.detailHost = document.createElement("div");
    this.detailHost.className = "detail-panel";
    side.appendChild(this.detailHost);
    const panelHost = document.createElement("div");
    panelHost.className = "smell-panel";
    side.appendChild(panelHost);

    this.renderer = new GraphRenderer(this.graphHost, {
      onNodeClick: (detail) => this.showDetail(detail),
    });
    this.panel = new SmellPanel(panelHost, {
      onPairEnter: (a, b) => this.renderer.highlightPair(a, b),
      onPairLeave: () => this.renderer.clearHighlight(),
    });

    if (data.skipped.length > 0) {
      const box = document.createElement("div");
      box.className = "skipped-box";
      const label = document.createElement("p");
      label.textContent = `${data.skipped.length} file(s) could not be loaded:`;
      box.appendChild(label);
      const list = document.createElement("ul");
      list.className = "skipped-list";
      for (const item of data.skipped) {
        const li = document.createElement("li");
        li.textContent = `${item.file}: ${item.reason}`;
        list.appendChild(li);
      }
      box.appendChild(list);
      root.appendChild(box);
    }

    this.sync();
  }

  private checkbox(
    cls: string,
    text: string,
    initial: boolean,
    onChange: (on: boolean) => void,
  ): HTMLLabelElement {
    const wrap = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = initial;
    box.className = cls;
    box.addEventListener("change", () => onChange(box.checked));
    wrap.appendChild(box);
    wrap.appendChild(document.createTextNode(` ${text}`));
    return wrap;
  }

  private showDetail(detail: NodeDetail): void {
    this.detailHost.replaceChildren();
    const title = document.createElement("h3");
    title.className = "detail-label";
    title.textContent = detail.label;
    this.detailHost.appendChild(title);
    const dl = document.createElement("dl");
    const add = (name: string, value: string, cls: string) => {
      const dt = document.createElement("dt");
      dt.textContent = name;
      const dd = document.createElement("dd");
      dd.className = cls;
      dd.textContent = value;
      dl.appendChild(dt);
      dl.appendChild(dd);
    };
    add("id", detail.id, "detail-id");
    add("type", detail.type, "detail-type");
    if (detail.community !== null) add("community", String(detail.community), "detail-community");
    add("degree", String(detail.degree), "detail-degree");
    add("edge weight sum", String(detail.weightSum), "detail-weight");
    this.detailHost.appendChild(dl);
    if (detail.aliases.length > 0) {
      const aliasTitle = document.createElement("p");
      aliasTitle.textContent = "known as:";
      this.detailHost.appendChild(aliasTitle);
      const ul = document.createElement("ul");
      ul.className = "alias-list";
      for (const alias of detail.aliases) {
        const li = document.createElement("li");
        li.textContent = alias;
        ul.appendChild(li);
      }
      this.detailHost.appendChild(ul);
    }
  }

  private renderGraph(): void {
    this.renderer.render(
      this.session.currentGraph(),
      this.session.options,
      this.session.data.aliases,
    );
  }

  // Redraws everything that depends on the selection. The smell panel
  // follows the window in lockstep with the graph.
  sync(): void {
    this.windowSelect.value = String(this.session.window?.entry.index ?? "");
    for (const btn of this.kindHost.querySelectorAll<HTMLButtonElement>("button[data-kind]")) {
      const kind = btn.dataset.kind as string;
      const available = this.session.hasKind(kind);
      btn.disabled = !available;
      btn.title = available
        ? ""
        : `this output has no ${KIND_LABELS[kind] ?? kind} graph for the selected window`;
      btn.classList.toggle("active", kind === this.session.kind);
    }
    this.detailHost.replaceChildren();
    this.renderGraph();
    this.panel.render(
      this.session.data.smells.header,
      this.session.smellRow(),
      this.session.data.demographics.header,
      this.session.demographicsRow(),
      this.session.data.smellsPresent,
    );
  }
}

export function buildApp(root: HTMLElement, data: SessionData): App {
  return new App(root, data);
}
