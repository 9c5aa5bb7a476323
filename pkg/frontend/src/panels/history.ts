import type { HistoryEntry } from "../types.js";
import { el, pct, rate, signedPct } from "../format.js";

/** Session trajectory: RR / CR / accuracy / quality per event, with deltas,
 * and a revert action per entry. */
export function renderHistory(
  container: HTMLElement,
  entries: HistoryEntry[],
  onRevert: (index: number) => void,
  busy = false,
): void {
  const table = el("table", { class: "history" });
  table.append(el("tr", {},
    el("th", { text: "#" }),
    el("th", { text: "event" }),
    el("th", { text: "train rows" }),
    el("th", { text: "batch" }),
    el("th", { text: "edits" }),
    el("th", { text: "RR" }),
    el("th", { text: "CR" }),
    el("th", { text: "accuracy" }),
    el("th", { text: "quality" }),
    el("th", { text: "" }),
  ));
  for (const entry of entries) {
    const revertBtn = el("button", { class: "small", text: "revert here", "data-action": "revert" });
    revertBtn.addEventListener("click", () => onRevert(entry.index));
    if (busy || entry.index === entries.length - 1) revertBtn.setAttribute("disabled", "");
    const kind = entry.kind === "revert" && entry.reverted_to !== null
      ? `revert → #${entry.reverted_to}`
      : entry.kind;
    const row = el("tr", { class: "history-row" },
      el("td", { text: String(entry.index) }),
      el("td", { text: kind }),
      el("td", { text: String(entry.train_rows) }),
      el("td", { text: String(entry.batch_size) }),
      el("td", { text: String(entry.edit_count) }),
      el("td", { text: `${rate(entry.overall_rr)} (${signedPct(entry.deltas.rr)})` }),
      el("td", { text: `${rate(entry.overall_cr)} (${signedPct(entry.deltas.cr)})` }),
      el("td", { text: `${pct(entry.accuracy)} (${signedPct(entry.deltas.accuracy)})` }),
      el("td", { text: `${pct(entry.quality_overall)} (${signedPct(entry.deltas.quality)})` }),
      el("td", {}, revertBtn),
    );
    row.setAttribute("data-history-index", String(entry.index));
    table.append(row);
  }
  container.replaceChildren(el("h2", { text: "Session history" }), table);
}
