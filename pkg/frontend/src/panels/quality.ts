import type { QualityReport } from "../types.js";
import { el, pct } from "../format.js";

const ISSUE_LABELS: Record<string, string> = {
  outliers: "Outliers",
  duplicates: "Duplicate records",
  correlation: "Correlated features",
  skew: "Skewed variables",
  imbalance: "Class imbalance",
};

/** Data Quality Overview: five severity gauges plus the overall score. */
export function renderQuality(container: HTMLElement, report: QualityReport): void {
  const gauges = el("div", { class: "gauges" });
  for (const [key, severity] of Object.entries(report.severities)) {
    gauges.append(gauge(key, ISSUE_LABELS[key] ?? key, severity));
  }
  const pairs = report.flagged_pairs
    .map((p) => `${p.variable_a} × ${p.variable_b} (${p.association.toFixed(2)})`)
    .join(", ");
  container.replaceChildren(
    el("h2", { text: "Data quality" }),
    el("p", { class: "quality-overall", "data-quality": "overall" },
       "Overall score: ", el("strong", { text: pct(report.overall) })),
    gauges,
    pairs ? el("p", { class: "flagged-pairs", text: `Strongly associated pairs: ${pairs}` })
          : el("p", { text: "No strongly associated predictor pairs." }),
  );
}

function gauge(key: string, label: string, severity: number): HTMLElement {
  const fill = el("div", { class: "gauge-fill" });
  fill.style.width = `${Math.round(severity * 100)}%`;
  const node = el(
    "div",
    { class: "gauge" },
    el("span", { class: "gauge-label", text: label }),
    el("div", { class: "gauge-track" }, fill),
    el("span", { class: "gauge-value", text: pct(severity) }),
  );
  node.setAttribute("data-gauge", key);
  return node;
}
