// DOM wiring for the advisor client. One mutation is in flight at a time;
// every render is driven by the latest GET state + advice pair, and 409
// conflicts always trigger a re-fetch instead of a retry.

import { ApiError, Client } from "./api.js";
import type { Advice, CreateRequest, SessionState } from "./api.js";
import { buildBoardView, renderBoardHtml } from "./board.js";

function el<T extends HTMLElement>(root: Document, id: string): T {
  const node = root.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export class App {
  private readonly client: Client;
  private state: SessionState | null = null;
  private advice: Advice | null = null;
  private startOptimal = 0;
  private busy = false;

  constructor(
    private readonly root: Document,
    base = "",
  ) {
    this.client = new Client(base);
  }

  init(): void {
    el<HTMLSelectElement>(this.root, "dist-select").addEventListener("change", () => {
      const custom = el<HTMLSelectElement>(this.root, "dist-select").value === "custom";
      el<HTMLTextAreaElement>(this.root, "custom-dist").hidden = !custom;
    });
    el<HTMLFormElement>(this.root, "new-game-form").addEventListener("submit", (event) => {
      event.preventDefault();
      void this.createGame();
    });
    el<HTMLButtonElement>(this.root, "roll-btn").addEventListener("click", () => {
      void this.roll();
    });
    el<HTMLDivElement>(this.root, "board").addEventListener("click", (event) => {
      const box = (event.target as HTMLElement).closest<HTMLElement>(".box");
      if (box && box.dataset.slot) void this.place(Number(box.dataset.slot));
    });
    el<HTMLDivElement>(this.root, "keypad").addEventListener("click", (event) => {
      const key = (event.target as HTMLElement).closest<HTMLButtonElement>("button[data-value]");
      if (key && key.dataset.value) void this.enterRoll(Number(key.dataset.value));
    });
    el<HTMLButtonElement>(this.root, "quit-btn").addEventListener("click", () => {
      this.state = null;
      this.advice = null;
      el<HTMLElement>(this.root, "game").hidden = true;
      el<HTMLElement>(this.root, "setup").hidden = false;
    });
  }

  private async createGame(): Promise<void> {
    const errorBox = el<HTMLParagraphElement>(this.root, "form-error");
    errorBox.textContent = "";
    let dist: CreateRequest["dist"] = "dice";
    if (el<HTMLSelectElement>(this.root, "dist-select").value === "custom") {
      try {
        dist = JSON.parse(el<HTMLTextAreaElement>(this.root, "custom-dist").value);
      } catch {
        errorBox.textContent = "custom distribution is not valid JSON";
        return;
      }
    }
    const request: CreateRequest = {
      dist,
      n: Number(el<HTMLInputElement>(this.root, "n-input").value),
      rewards: "linear",
      mode: el<HTMLSelectElement>(this.root, "mode-select").value as CreateRequest["mode"],
      seed: Number(el<HTMLInputElement>(this.root, "seed-input").value || "0"),
    };
    try {
      this.state = await this.client.createSession(request);
    } catch (error) {
      errorBox.textContent = describe(error);
      return;
    }
    this.advice = null;
    this.startOptimal = this.state.optimal_remaining_value;
    el<HTMLElement>(this.root, "setup").hidden = true;
    el<HTMLElement>(this.root, "game").hidden = false;
    this.buildKeypad();
    if (this.state.pending_roll !== null) {
      this.advice = await this.client.getAdvice(this.state.id);
    }
    this.render();
  }

  private buildKeypad(): void {
    const keypad = el<HTMLDivElement>(this.root, "keypad");
    if (!this.state || this.state.mode !== "manual") {
      keypad.hidden = true;
      keypad.innerHTML = "";
      return;
    }
    keypad.hidden = false;
    keypad.innerHTML = this.state.support
      .map((x) => `<button type="button" data-value="${x}">${x}</button>`)
      .join("");
  }

  private async roll(): Promise<void> {
    if (!this.state || this.busy) return;
    await this.mutate(async () => {
      await this.client.roll(this.state!.id);
      await this.refresh(true);
    });
  }

  private async enterRoll(value: number): Promise<void> {
    if (!this.state || this.busy) return;
    await this.mutate(async () => {
      await this.client.enterRoll(this.state!.id, value);
      await this.refresh(true);
    });
  }

  private async place(slot: number): Promise<void> {
    if (!this.state || this.busy) return;
    if (this.state.pending_roll === null) {
      this.toast("roll first");
      return;
    }
    if (!this.state.remaining.includes(slot)) {
      this.toast(`box ${slot} is already filled`);
      return;
    }
    await this.mutate(async () => {
      this.state = await this.client.place(this.state!.id, slot, this.state!.version);
      this.advice = null;
      this.render();
    });
  }

  // Runs one mutation, serialized by the busy flag; on a version or state
  // conflict the truth is re-fetched from the service, never retried blind.
  private async mutate(action: () => Promise<void>): Promise<void> {
    this.busy = true;
    this.render();
    try {
      await action();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.toast(`${error.code}: refreshed`);
        await this.refresh(false);
      } else {
        this.toast(describe(error));
      }
    } finally {
      this.busy = false;
      this.render();
    }
  }

  private async refresh(expectAdvice: boolean): Promise<void> {
    if (!this.state) return;
    this.state = await this.client.getState(this.state.id);
    this.advice =
      this.state.pending_roll !== null && (expectAdvice || this.advice !== null)
        ? await this.client.getAdvice(this.state.id)
        : null;
    this.render();
  }

  private render(): void {
    if (!this.state) return;
    const view = buildBoardView(this.state, this.advice);
    el<HTMLDivElement>(this.root, "board").innerHTML = renderBoardHtml(view);

    const rollBtn = el<HTMLButtonElement>(this.root, "roll-btn");
    rollBtn.hidden = this.state.mode !== "simulated";
    rollBtn.disabled = this.busy || view.finished || view.pendingRoll !== null;
    for (const key of this.root.querySelectorAll<HTMLButtonElement>("#keypad button")) {
      key.disabled = this.busy || view.finished || view.pendingRoll !== null;
    }

    el<HTMLSpanElement>(this.root, "status-roll").textContent =
      view.pendingRoll !== null ? String(view.pendingRoll) : "none";
    el<HTMLSpanElement>(this.root, "status-banked").textContent = view.banked.toFixed(2);
    el<HTMLSpanElement>(this.root, "status-optimal").textContent =
      view.optimalFromHere.toFixed(2);
    el<HTMLSpanElement>(this.root, "status-start").textContent = this.startOptimal.toFixed(2);

    const summary = el<HTMLParagraphElement>(this.root, "summary");
    if (view.finished) {
      summary.hidden = false;
      summary.textContent =
        `Game over. Your total: ${view.banked.toFixed(2)}. ` +
        `Optimal play from the start was worth ${this.startOptimal.toFixed(2)} in expectation.`;
    } else {
      summary.hidden = true;
      summary.textContent = "";
    }
  }

  private toast(message: string): void {
    const node = el<HTMLDivElement>(this.root, "toast");
    node.textContent = message;
    node.classList.add("show");
    setTimeout(() => node.classList.remove("show"), 2500);
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}
