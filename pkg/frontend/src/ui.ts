/**
 * DOM renderer for the verification console.
 *
 * Layout: a banner naming the current batch type and progress, the frame
 * with the candidate point drawn over it (color by proposed type) plus the
 * rough-localization trace, and accept/reject/ambiguous buttons as click
 * fallbacks for the hotkeys.
 */

import { Decision, ExportPayload, ProposedLabel, VerifyApi } from "./api.js";
import { SessionMachine, ViewState } from "./machine.js";

const LABEL_TITLES: Record<ProposedLabel, string> = {
  foreground: "Foreground batch",
  background: "Background batch",
  uncertain: "Uncertain batch",
};

interface TracePoint {
  x: number;
  y: number;
}

function traceFromOverlay(overlay: Record<string, unknown>): TracePoint[] {
  const trace = overlay["trace"];
  if (!Array.isArray(trace)) {
    return [];
  }
  return trace.filter(
    (p): p is TracePoint =>
      typeof p === "object" && p !== null && typeof (p as TracePoint).x === "number",
  );
}

export class ConsoleUi {
  private banner!: HTMLElement;
  private stage!: HTMLElement;
  private controls!: HTMLElement;
  private status!: HTMLElement;
  private exportView!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: VerifyApi,
    readonly machine: SessionMachine,
  ) {}

  async mount(): Promise<void> {
    this.root.innerHTML = `
      <header id="banner" class="banner">loading…</header>
      <main id="stage" class="stage"></main>
      <nav id="controls" class="controls"></nav>
      <footer id="status" class="status"></footer>
      <section id="export" class="export"></section>
    `;
    this.banner = this.root.querySelector("#banner")!;
    this.stage = this.root.querySelector("#stage")!;
    this.controls = this.root.querySelector("#controls")!;
    this.status = this.root.querySelector("#status")!;
    this.exportView = this.root.querySelector("#export")!;

    this.machine.onChange((state) => this.render(state));
    await this.machine.start();
    this.buildControls();
    this.render(this.machine.state);
  }

  /** Hook keyboard input; returns the handler so callers can detach it. */
  attachHotkeys(target: Pick<Window, "addEventListener">): (ev: KeyboardEvent) => void {
    const handler = (ev: KeyboardEvent): void => {
      void this.machine.hotkey(ev.key);
    };
    target.addEventListener("keydown", handler as EventListener);
    return handler;
  }

  private buildControls(): void {
    const hotkeys = this.machine.config?.hotkeys;
    if (!hotkeys) {
      return;
    }
    this.controls.innerHTML = "";
    for (const decision of Object.keys(hotkeys) as Decision[]) {
      const button = document.createElement("button");
      button.id = `btn-${decision}`;
      button.textContent = `${decision} (${hotkeys[decision]})`;
      button.addEventListener("click", () => void this.machine.judge(decision));
      this.controls.appendChild(button);
    }
  }

  private render(state: ViewState): void {
    if (state.phase === "loading") {
      this.banner.textContent = "loading…";
      return;
    }
    if (state.phase === "done") {
      this.renderDone(state);
      return;
    }
    const item = state.item;
    if (!item) {
      return;
    }
    const colors = this.machine.config?.marker_colors;
    this.banner.textContent = `${LABEL_TITLES[item.proposed_label]} — frame ${item.frame}`;
    this.banner.dataset["label"] = item.proposed_label;

    const trace = traceFromOverlay(state.overlay);
    const polyline = trace.length
      ? `<polyline points="${trace.map((p) => `${p.x},${p.y}`).join(" ")}"
           fill="none" stroke="#f5c518" stroke-width="2" opacity="0.8"></polyline>`
      : "";
    const image = item.image_url
      ? `<img id="frame" src="${item.image_url}" alt="frame ${item.frame}">`
      : `<div id="frame" class="frame-placeholder">frame ${item.frame}</div>`;
    this.stage.innerHTML = `
      <div class="frame-wrap">
        ${image}
        <svg class="overlay" id="overlay">${polyline}
          <circle id="marker" cx="${item.x}" cy="${item.y}" r="6"
            fill="${colors?.[item.proposed_label] ?? "#ffffff"}"
            stroke="#111" stroke-width="1.5"></circle>
        </svg>
      </div>
    `;
    this.renderStatus(state);
  }

  private renderStatus(state: ViewState): void {
    const progress = state.progress;
    if (!progress) {
      return;
    }
    this.status.textContent =
      `${progress.done} / ${progress.total} judged` +
      (state.item ? ` — item ${state.item.index}` : "");
  }

  private renderDone(state: ViewState): void {
    this.banner.textContent = "All candidates judged";
    delete this.banner.dataset["label"];
    this.stage.innerHTML = `<div class="done-screen">Session complete.</div>`;
    this.renderStatus(state);
    if (!this.exportView.querySelector("#btn-export")) {
      const button = document.createElement("button");
      button.id = "btn-export";
      button.textContent = "export verified points";
      button.addEventListener("click", () => void this.runExport());
      this.exportView.appendChild(button);
    }
  }

  private async runExport(): Promise<void> {
    const exported: ExportPayload = await this.api.exportSession(this.machine.sessionId);
    const counts = Object.entries(exported.counts)
      .map(([label, n]) => `${label} ${n}`)
      .join(", ");
    let summary = this.exportView.querySelector("#export-summary");
    if (!summary) {
      summary = document.createElement("p");
      summary.id = "export-summary";
      this.exportView.appendChild(summary);
    }
    summary.textContent = `${exported.points.length} points (${counts})`;
  }
}
