// Pure view model: the rendered board is a function of the last session
// state plus the last advice response, nothing else. Totals and rewards
// are echoed verbatim from the service; the only arithmetic here is the
// normalization that turns what-if totals into heat colors.

import type { Advice, SessionState } from "./api.js";

export interface BoxView {
  slot: number;
  reward: number;
  filledValue: number | null;
  advised: boolean;
  whatifTotal: number | null;
  heat: number | null; // 0 = coolest, 1 = best move, null when no advice
}

export interface BoardView {
  boxes: BoxView[]; // display order: slot n on the left down to slot 1 on the right
  pendingRoll: number | null;
  banked: number;
  optimalFromHere: number;
  finished: boolean;
  version: number;
}

export function buildBoardView(state: SessionState, advice: Advice | null): BoardView {
  const filled = new Map<number, number>();
  for (const move of state.history) {
    filled.set(move.slot, move.value);
  }
  const whatif = new Map<number, number>();
  if (advice) {
    for (const w of advice.whatif) {
      whatif.set(w.slot, w.total);
    }
  }
  const totals = advice ? advice.whatif.map((w) => w.total) : [];
  const best = totals.length ? Math.max(...totals) : 0;
  const worst = totals.length ? Math.min(...totals) : 0;
  const span = best - worst;

  const boxes: BoxView[] = [];
  for (let slot = state.n; slot >= 1; slot--) {
    const total = whatif.has(slot) ? (whatif.get(slot) as number) : null;
    boxes.push({
      slot,
      reward: state.rewards[slot - 1] as number,
      filledValue: filled.has(slot) ? (filled.get(slot) as number) : null,
      advised: advice !== null && advice.recommended_slot === slot,
      whatifTotal: total,
      heat: total === null ? null : span > 0 ? (total - worst) / span : 1,
    });
  }
  return {
    boxes,
    pendingRoll: state.pending_roll,
    banked: state.banked,
    optimalFromHere: state.optimal_remaining_value,
    finished: state.finished,
    version: state.version,
  };
}

function heatColor(heat: number): string {
  // cold slate to warm amber; the advised box gets its own outline on top
  const hue = 215 - 170 * heat;
  return `hsl(${hue.toFixed(0)}, 70%, 45%)`;
}

export function renderBoxHtml(box: BoxView): string {
  const classes = ["box"];
  if (box.filledValue !== null) classes.push("filled");
  if (box.advised) classes.push("advised");
  const strip =
    box.heat === null
      ? '<div class="heat"></div>'
      : `<div class="heat" style="background:${heatColor(box.heat)}"></div>`;
  const value = box.filledValue !== null ? `<div class="value">${box.filledValue}</div>` : '<div class="value empty">&middot;</div>';
  const whatif =
    box.whatifTotal !== null && box.filledValue === null
      ? `<div class="whatif" title="expected final total if placed here">${box.whatifTotal.toFixed(2)}</div>`
      : '<div class="whatif">&nbsp;</div>';
  return (
    `<div class="${classes.join(" ")}" data-slot="${box.slot}">` +
    strip +
    value +
    whatif +
    `<div class="reward">r=${box.reward}</div>` +
    `</div>`
  );
}

export function renderBoardHtml(view: BoardView): string {
  return view.boxes.map(renderBoxHtml).join("");
}
