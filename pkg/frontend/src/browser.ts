import { buildApp } from "./app";
import {
  loadSession,
  mapStore,
  NoManifestFound,
  urlStore,
  type FileStore,
} from "./data";

function banner(root: HTMLElement, text: string): void {
  const div = document.createElement("div");
  div.className = "banner";
  div.textContent = text;
  root.prepend(div);
}

async function open(root: HTMLElement, store: FileStore): Promise<void> {
  try {
    const data = await loadSession(store);
    buildApp(root, data);
  } catch (err) {
    if (err instanceof NoManifestFound) {
      root.replaceChildren();
      banner(root, err.message);
      return;
    }
    throw err;
  }
}

function pickerUi(root: HTMLElement): void {
  const intro = document.createElement("p");
  intro.textContent =
    "Pick a sociotrace output directory (the one holding ui_index.json), " +
    "or serve one and open this page with ?data=<url>.";
  root.appendChild(intro);
  const input = document.createElement("input");
  input.type = "file";
  // non-standard but universally supported way to pick a directory
  input.setAttribute("webkitdirectory", "");
  input.addEventListener("change", async () => {
    const files = new Map<string, string>();
    for (const file of input.files ?? []) {
      files.set(file.name, await file.text());
    }
    await open(root, mapStore(files));
  });
  root.appendChild(input);
}

export function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const params = new URLSearchParams(window.location.search);
  const base = params.get("data");
  if (base) {
    void open(root, urlStore(base));
  } else {
    pickerUi(root);
  }
}

bootstrap();
