import type { BiasReport, SegmentStats } from "../types.js";
import { el, pct, rate } from "../format.js";

/** Data Explorer: per-variable segment histograms overlaid with per-outcome
 * accuracy, RR/CR badges, and the ranked Quick Insights list. */
export function renderExplorer(
  container: HTMLElement,
  report: BiasReport,
  selected: string | null,
  onSelect: (variable: string) => void,
): void {
  const names = Object.keys(report.variables);
  const current = selected && names.includes(selected) ? selected : names[0];

  const tabs = el("div", { class: "tabs" });
  for (const name of names) {
    const btn = el("button", {
      class: name === current ? "tab active" : "tab",
      text: name,
      "data-variable": name,
    });
    btn.addEventListener("click", () => onSelect(name));
    tabs.append(btn);
  }

  const badges = el(
    "div",
    { class: "badges" },
    badge("Overall RR", rate(report.overall_rr), "overall-rr"),
    badge("Overall CR", rate(report.overall_cr), "overall-cr"),
    badge(`${current} RR`, rate(report.variables[current].rr), "variable-rr"),
    badge("Coverage threshold", String(report.coverage_threshold), "threshold"),
  );

  const table = el("table", { class: "segments" });
  table.append(el("tr", {},
    el("th", { text: "segment" }),
    el("th", { text: "rows" }),
    el("th", { text: "" }),
    el("th", { text: "rate" }),
    el("th", { text: "covered" }),
    el("th", { text: "heldout accuracy by outcome" }),
  ));
  const peak = Math.max(...report.variables[current].segments.map((s) => s.count), 1);
  for (const seg of report.variables[current].segments) {
    table.append(segmentRow(seg, peak));
  }

  const insights = el("ol", { class: "insights" });
  for (const q of report.quick_insights) {
    insights.append(el("li", {
      text: `${q.variable} / ${q.segment}: ${q.reason.replace("_", " ")} (${q.score.toFixed(3)})`,
      "data-insight": `${q.variable}:${q.segment}`,
    }));
  }

  container.replaceChildren(
    el("h2", { text: "Data explorer" }),
    badges,
    tabs,
    table,
    el("h3", { text: "Quick insights" }),
    report.quick_insights.length ? insights : el("p", { text: "No under-represented segments." }),
  );
}

function badge(label: string, value: string, key: string): HTMLElement {
  const span = el("span", { class: "badge" }, `${label}: `, el("strong", { text: value }));
  span.setAttribute("data-badge", key);
  return span;
}

function segmentRow(seg: SegmentStats, peak: number): HTMLElement {
  const bar = el("div", { class: "bar" });
  bar.style.width = `${Math.round((seg.count / peak) * 100)}%`;
  const accuracy = Object.entries(seg.accuracy_by_outcome)
    .map(([cls, acc]) => `${cls} ${pct(acc, 0)}`)
    .join("  ") || "—";
  const row = el(
    "tr",
    { class: seg.covered ? "segment" : "segment uncovered" },
    el("td", { text: seg.segment.label, class: "seg-label" }),
    el("td", { text: String(seg.count) }),
    el("td", { class: "bar-cell" }, bar),
    el("td", { text: rate(seg.representation_rate), class: "seg-rate" }),
    el("td", { text: seg.covered ? "yes" : "LOW", class: "seg-covered" }),
    el("td", { text: accuracy }),
  );
  row.setAttribute("data-segment", seg.segment.label);
  return row;
}
