import type { DriftReport } from "../types.js";
import { el, rate } from "../format.js";

export interface DriftCallbacks {
  onAcknowledgeAndRetrain: () => void;
  onRevertInstead: () => void;
  onClose: () => void;
}

/** Bias-awareness dialog: before/after segment histograms per variable,
 * flagged variables, and the acknowledge-and-retrain / revert choices. The
 * retrain request is blocked client-side until the warning is acknowledged;
 * the dialog warns but never forbids retraining. */
export class DriftDialog {
  private open = false;
  private acknowledged = false;

  constructor(
    private readonly container: HTMLElement,
    private readonly callbacks: DriftCallbacks,
  ) {}

  isOpen(): boolean {
    return this.open;
  }

  show(report: DriftReport): void {
    this.open = true;
    this.acknowledged = false;
    this.render(report);
  }

  hide(): void {
    this.open = false;
    this.container.replaceChildren();
  }

  private render(report: DriftReport): void {
    const charts = el("div", { class: "drift-charts" });
    for (const [variable, hist] of Object.entries(report.histograms)) {
      charts.append(this.chart(variable, hist, report.per_variable[variable],
                               report.flagged.includes(variable)));
    }

    const ackBox = el("input", { type: "checkbox", "data-drift": "ack" }) as HTMLInputElement;
    const retrainBtn = el("button", {
      class: "primary", text: "Retrain with generated data", "data-drift": "retrain", disabled: "",
    });
    ackBox.addEventListener("change", () => {
      this.acknowledged = ackBox.checked;
      if (this.acknowledged) retrainBtn.removeAttribute("disabled");
      else retrainBtn.setAttribute("disabled", "");
    });
    retrainBtn.addEventListener("click", () => {
      if (!this.acknowledged) return; // client-side guard mirrors the server precondition
      this.hide();
      this.callbacks.onAcknowledgeAndRetrain();
    });

    const revertBtn = el("button", { text: "Discard generated data", "data-drift": "revert" });
    revertBtn.addEventListener("click", () => {
      this.hide();
      this.callbacks.onRevertInstead();
    });
    const closeBtn = el("button", { class: "small", text: "Back", "data-drift": "close" });
    closeBtn.addEventListener("click", () => {
      this.hide();
      this.callbacks.onClose();
    });

    const flaggedLine = report.flagged.length
      ? `Merging shifts the distribution of: ${report.flagged.join(", ")} ` +
        `(total-variation distance above ${report.threshold}).`
      : "No variable shifts beyond the warning threshold.";

    this.container.replaceChildren(
      el("div", { class: "dialog-backdrop" },
        el("div", { class: "dialog", "data-dialog": "drift" },
          el("h2", { text: "Interaction bias check" }),
          el("p", {
            text: "Your augmentation choices change the training distribution. Review how the " +
              "merged training set differs from the current one before retraining.",
          }),
          el("p", { class: "flagged", "data-drift": "flagged", text: flaggedLine }),
          charts,
          el("label", { class: "ack-label" }, ackBox,
             " I reviewed the distribution changes and want to retrain"),
          el("div", { class: "dialog-actions" }, retrainBtn, revertBtn, closeBtn),
        ),
      ),
    );
  }

  private chart(
    variable: string,
    hist: { labels: string[]; before: number[]; after: number[] },
    score: number,
    flagged: boolean,
  ): HTMLElement {
    const box = el("div", { class: flagged ? "drift-chart flagged" : "drift-chart" });
    box.setAttribute("data-drift-variable", variable);
    box.append(el("h4", { text: `${variable} — drift ${rate(score)}` }));
    const beforeTotal = hist.before.reduce((a, b) => a + b, 0) || 1;
    const afterTotal = hist.after.reduce((a, b) => a + b, 0) || 1;
    for (let i = 0; i < hist.labels.length; i++) {
      const beforeBar = el("div", { class: "bar before" });
      beforeBar.style.width = `${Math.round((hist.before[i] / beforeTotal) * 100)}%`;
      const afterBar = el("div", { class: "bar after" });
      afterBar.style.width = `${Math.round((hist.after[i] / afterTotal) * 100)}%`;
      box.append(el("div", { class: "drift-row" },
        el("span", { class: "seg-label", text: hist.labels[i] }),
        el("div", { class: "bar-pair" }, beforeBar, afterBar),
      ));
    }
    return box;
  }
}
