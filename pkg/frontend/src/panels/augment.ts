import type { ConstraintIn, SchemaResponse, Warning } from "../types.js";
import { el } from "../format.js";

export interface AugmentCallbacks {
  onPlan: (constraints: ConstraintIn[], joint: boolean) => void;
  onGenerate: (constraints: ConstraintIn[], joint: boolean) => void;
}

/** Augmentation Controller: multivariate region pickers plus requested
 * counts, with inline low-coverage warning banners. Warnings never block. */
export class AugmentPanel {
  private warnings: Warning[] = [];
  private rows: ConstraintRowState[] = [];

  constructor(
    private readonly container: HTMLElement,
    private readonly schema: SchemaResponse,
    private readonly callbacks: AugmentCallbacks,
  ) {
    this.rows = [this.emptyRow()];
  }

  private predictors() {
    return this.schema.variables.filter((v) => v.role === "predictor");
  }

  private emptyRow(): ConstraintRowState {
    const first = this.predictors()[0];
    return { variable: first.name, segmentIndex: 0, count: 50 };
  }

  setWarnings(warnings: Warning[]): void {
    this.warnings = warnings;
    this.render(false);
  }

  collect(): { constraints: ConstraintIn[]; joint: boolean } {
    const constraints = this.rows.map((row) => {
      const region = this.schema.segments[row.variable][row.segmentIndex];
      const out: ConstraintIn = { variable: row.variable, count: row.count };
      if (region.categories) {
        out.categories = region.categories;
      } else {
        out.min = typeof region.lo === "string" ? -1e12 : (region.lo as number);
        out.max = typeof region.hi === "string" ? 1e12 : (region.hi as number);
        out.max_open = true;
      }
      return out;
    });
    const joint = new Set(constraints.map((c) => c.variable)).size === constraints.length
      ? this.joint
      : false;
    return { constraints, joint };
  }

  private joint = false;

  render(resetWarnings = true, busy = false): void {
    if (resetWarnings) this.warnings = [];
    const rowsBox = el("div", { class: "constraint-rows" });
    this.rows.forEach((row, i) => rowsBox.append(this.constraintRow(row, i, busy)));

    const addBtn = el("button", { class: "small", text: "+ add variable", "data-action": "add-constraint" });
    addBtn.addEventListener("click", () => {
      this.rows.push(this.emptyRow());
      this.render(false);
    });

    const jointToggle = el("input", { type: "checkbox", "data-action": "joint" }) as HTMLInputElement;
    jointToggle.checked = this.joint;
    jointToggle.addEventListener("change", () => {
      this.joint = jointToggle.checked;
    });

    const planBtn = el("button", { text: "Check coverage", "data-action": "plan" });
    planBtn.addEventListener("click", () => {
      const { constraints, joint } = this.collect();
      this.callbacks.onPlan(constraints, joint);
    });
    const genBtn = el("button", { class: "primary", text: "Generate data", "data-action": "generate" });
    genBtn.addEventListener("click", () => {
      const { constraints, joint } = this.collect();
      this.callbacks.onGenerate(constraints, joint);
    });
    if (busy) {
      planBtn.setAttribute("disabled", "");
      genBtn.setAttribute("disabled", "");
      addBtn.setAttribute("disabled", "");
    }

    const banners = el("div", { class: "warnings" });
    for (const w of this.warnings) {
      const variable = String(w.constraint["variable"] ?? "");
      banners.append(el("p", {
        class: "warning-banner",
        "data-warning": variable,
        text:
          `Low coverage on ${variable}: only ${w.existing_count} existing rows for ` +
          `${w.requested_count} requested (ratio ${w.ratio.toFixed(2)}). Generated samples ` +
          `from this segment are more likely to be problematic — you can still proceed.`,
      }));
    }

    this.container.replaceChildren(
      el("h2", { text: "Augmentation controller" }),
      el("p", {
        class: "hint",
        text: "Pick under-represented segments and how many synthetic rows to request for each.",
      }),
      rowsBox,
      el("div", { class: "controls" },
        addBtn,
        el("label", { class: "joint-label" }, jointToggle, " all regions must hold on every row"),
        planBtn,
        genBtn,
      ),
      banners,
    );
  }

  private constraintRow(row: ConstraintRowState, index: number, busy: boolean): HTMLElement {
    const varSelect = el("select", { "data-field": "variable" }) as HTMLSelectElement;
    for (const v of this.predictors()) {
      const opt = el("option", { value: v.name, text: v.name }) as HTMLOptionElement;
      if (v.name === row.variable) opt.selected = true;
      varSelect.append(opt);
    }
    varSelect.addEventListener("change", () => {
      row.variable = varSelect.value;
      row.segmentIndex = 0;
      this.render(false);
    });

    const segSelect = el("select", { "data-field": "segment" }) as HTMLSelectElement;
    this.schema.segments[row.variable].forEach((seg, i) => {
      const opt = el("option", { value: String(i), text: seg.label }) as HTMLOptionElement;
      if (i === row.segmentIndex) opt.selected = true;
      segSelect.append(opt);
    });
    segSelect.addEventListener("change", () => {
      row.segmentIndex = Number(segSelect.value);
    });

    const countInput = el("input", {
      type: "number", min: "1", value: String(row.count), "data-field": "count",
    }) as HTMLInputElement;
    countInput.addEventListener("change", () => {
      row.count = Math.max(1, Number(countInput.value) || 1);
    });

    const removeBtn = el("button", { class: "small", text: "×", title: "remove" });
    removeBtn.addEventListener("click", () => {
      this.rows.splice(index, 1);
      if (!this.rows.length) this.rows.push(this.emptyRow());
      this.render(false);
    });
    if (busy) {
      for (const node of [varSelect, segSelect, countInput, removeBtn]) {
        node.setAttribute("disabled", "");
      }
    }

    const box = el("div", { class: "constraint-row" },
      varSelect, segSelect, el("span", { text: "rows:" }), countInput, removeBtn);
    box.setAttribute("data-constraint-row", String(index));
    return box;
  }
}

interface ConstraintRowState {
  variable: string;
  segmentIndex: number;
  count: number;
}
