import type { Overview } from "../types.js";
import { el, pct, signedPct } from "../format.js";

/** System Overview: accuracy, accuracy delta vs previous retrain, training
 * size and the predictor list. */
export function renderOverview(container: HTMLElement, data: Overview): void {
  container.replaceChildren(
    el("h2", { text: "System overview" }),
    el(
      "div",
      { class: "stat-grid" },
      stat("Model accuracy", pct(data.accuracy), "data-stat", "accuracy",
           "Share of held-out patients the current model classifies correctly."),
      stat("Change after retrain", signedPct(data.accuracy_delta), "data-stat", "accuracy-delta",
           "Change in accuracy if the model is retrained with the newly generated data " +
           "(compared with the previous model)."),
      stat("Training samples", String(data.train_rows), "data-stat", "train-rows",
           "Rows the model is currently trained on; held-out rows are never touched."),
      stat("Held-out samples", String(data.heldout_rows), "data-stat", "heldout-rows",
           "Untouched evaluation set used for every accuracy figure."),
    ),
    el(
      "p",
      { class: "predictors" },
      `Predicts ${data.target} (${data.classes.join(" / ")}) from ${data.predictors.length} variables: `,
      el("span", { text: data.predictors.join(", ") }),
    ),
  );
}

function stat(label: string, value: string, attr: string, key: string, tooltip: string): HTMLElement {
  const box = el(
    "div",
    { class: "stat", title: tooltip },
    el("span", { class: "stat-label", text: label }),
    el("strong", { class: "stat-value", text: value }),
  );
  box.setAttribute(attr, key);
  return box;
}
