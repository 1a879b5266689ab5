// Browser entry point: wires the session picker, embedding view, explanation
// panels and attribution chart together against a running drcf service.

import { DrcfClient, ServiceError } from "./api.js";
import {
  ViewController,
  canBlacklist,
  encodeState,
  selectSample,
  selectTarget,
  setK,
  toggleBlacklist,
} from "./state.js";
import { renderEmbedding, renderErrorBanner, renderExplanation } from "./render.js";
import type { Embedding, SessionInfo } from "./types.js";

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

async function boot(): Promise<void> {
  const client = new DrcfClient("");
  const sessions = await client.listSessions();
  const picker = byId("session-picker") as HTMLSelectElement;
  for (const s of sessions.sessions) {
    const opt = document.createElement("option");
    opt.value = s.session_id;
    opt.textContent = `${s.session_id} (${s.kind}, ${s.n_samples} samples)`;
    picker.appendChild(opt);
  }
  picker.addEventListener("change", () => {
    const info = sessions.sessions.find((s) => s.session_id === picker.value);
    if (info) void openSession(client, info);
  });
  if (sessions.sessions.length > 0) {
    await openSession(client, sessions.sessions[0]);
  } else {
    byId("embedding").innerHTML = renderErrorBanner("no sessions available");
  }
}

async function openSession(client: DrcfClient, info: SessionInfo): Promise<void> {
  const controller = new ViewController(client, info);
  const embedding: Embedding = await client.embedding(info.session_id);
  const embedHost = byId("embedding");
  embedHost.innerHTML = renderEmbedding(embedding);

  embedHost.addEventListener("click", (ev) => {
    const target = ev.target as Element;
    const sampleAttr = target.getAttribute("data-index");
    const cellAttr = target.getAttribute("data-cell");
    if (sampleAttr !== null) {
      controller.state = selectSample(controller.state, Number(sampleAttr));
    } else if (cellAttr !== null) {
      const [r, c] = cellAttr.split(",").map(Number);
      controller.state = selectTarget(controller.state, [r, c], embedding);
      void refresh();
    }
    window.location.hash = encodeState(controller.state);
  });

  // continuous projectors take a raw click anywhere in the plot as the target
  if (embedding.kind !== "som") {
    embedHost.addEventListener("dblclick", (ev) => {
      const rect = (embedHost.firstElementChild as SVGSVGElement).getBoundingClientRect();
      const click: [number, number] = [ev.clientX - rect.left, ev.clientY - rect.top];
      controller.state = selectTarget(controller.state, click, embedding);
      void refresh();
    });
  }

  const kInput = byId("k-input") as HTMLInputElement;
  kInput.addEventListener("change", () => {
    controller.state = setK(controller.state, Number(kInput.value));
  });

  const blHost = byId("blacklist");
  blHost.innerHTML = "";
  embedding.feature_names.forEach((name, j) => {
    const btn = document.createElement("button");
    btn.textContent = name;
    btn.addEventListener("click", () => {
      controller.state = toggleBlacklist(controller.state, j);
      btn.classList.toggle("active", controller.state.blacklist.includes(j));
      embedding.feature_names.forEach((_, i) => {
        const el = blHost.children[i] as HTMLButtonElement;
        el.disabled = !canBlacklist(controller.state, i);
      });
      void refresh();
    });
    blHost.appendChild(btn);
  });

  async function refresh(): Promise<void> {
    const out = byId("panels");
    if (controller.state.sampleIndex === null || controller.state.target === null) return;
    try {
      const state = await controller.requestExplanation();
      if (state.lastExplanation) {
        out.innerHTML = renderExplanation(state.lastExplanation, embedding.feature_names);
      }
    } catch (err) {
      const message = err instanceof ServiceError ? `${err.code}: ${err.message}` : String(err);
      out.insertAdjacentHTML("afterbegin", renderErrorBanner(message));
    }
  }
}

void boot();
