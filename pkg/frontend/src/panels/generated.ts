import type { BatchView, GeneratedRow, Prediction, SchemaResponse } from "../types.js";
import { cell, el, pct } from "../format.js";

export interface GeneratedCallbacks {
  onWhatIf: (rowId: string, variable: string, value: number | string) => Promise<Prediction>;
  onCommitEdit: (rowId: string, variable: string, value: number | string) => void;
  onDeleteRow: (rowId: string) => void;
  onDiscard: () => void;
  onRetrain: () => void;
  onFilterChange: (filters: GeneratedFilters) => void;
}

export interface GeneratedFilters {
  sort?: string;
  predicted?: string;
  max_confidence?: number;
}

/** Generated Data Controller: filter/sort the pending batch, edit cells with
 * a live what-if re-prediction before committing, delete rows, discard. */
export class GeneratedPanel {
  filters: GeneratedFilters = {};
  private editing: { rowId: string; variable: string; preview: Prediction | null } | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly schema: SchemaResponse,
    private readonly callbacks: GeneratedCallbacks,
  ) {}

  renderEmpty(): void {
    this.container.replaceChildren(
      el("h2", { text: "Generated data" }),
      el("p", { class: "hint", text: "No pending batch. Use the augmentation controller to generate rows." }),
    );
  }

  render(batch: BatchView, classes: string[], busy = false): void {
    const head = el("div", { class: "batch-head" },
      el("span", { "data-batch": "size", text: `${batch.size} rows` }),
      el("span", {
        "data-batch": "estimated-accuracy",
        text: batch.estimated_accuracy === null
          ? "estimated accuracy —"
          : `estimated accuracy ${pct(batch.estimated_accuracy)}`,
        title: "Share of generated rows whose label the current model agrees with " +
          "(the batch is scored as an inference set before any merge).",
      }),
      el("span", {
        "data-batch": "estimated-quality",
        text: batch.estimated_quality
          ? `estimated quality ${pct(batch.estimated_quality.overall)}`
          : "estimated quality —",
      }),
    );

    const discardBtn = el("button", { class: "danger", text: "Discard batch", "data-action": "discard" });
    discardBtn.addEventListener("click", () => this.callbacks.onDiscard());
    const retrainBtn = el("button", {
      class: "primary", text: "Merge & retrain…", "data-action": "open-retrain",
      title: "Opens the interaction-bias check before anything is merged.",
    });
    retrainBtn.addEventListener("click", () => this.callbacks.onRetrain());
    if (busy) {
      discardBtn.setAttribute("disabled", "");
      retrainBtn.setAttribute("disabled", "");
    }

    const warnings = el("div", { class: "warnings" });
    for (const w of batch.warnings) {
      warnings.append(el("p", {
        class: "warning-banner",
        text: `Generated under low coverage: ${String(w.constraint["variable"])} ` +
          `(${w.existing_count}/${w.requested_count} existing, ratio ${w.ratio.toFixed(2)}).`,
      }));
    }

    const table = el("table", { class: "generated" });
    const header = el("tr", {});
    const variables = this.schema.variables.map((v) => v.name);
    for (const name of variables) header.append(el("th", { text: name }));
    header.append(el("th", { text: "predicted" }), el("th", { text: "confidence" }), el("th", { text: "" }));
    table.append(header);
    for (const row of batch.rows) {
      table.append(this.rowNode(row, variables, busy));
    }

    this.container.replaceChildren(
      el("h2", { text: "Generated data" }),
      head,
      warnings,
      this.filterBar(classes, busy),
      table,
      el("div", { class: "batch-actions" }, retrainBtn, discardBtn),
    );
  }

  private filterBar(classes: string[], busy: boolean): HTMLElement {
    const predicted = el("select", { "data-filter": "predicted" }) as HTMLSelectElement;
    predicted.append(el("option", { value: "", text: "any outcome" }));
    for (const cls of classes) {
      const opt = el("option", { value: cls, text: `predicted ${cls}` }) as HTMLOptionElement;
      if (this.filters.predicted === cls) opt.selected = true;
      predicted.append(opt);
    }
    predicted.addEventListener("change", () => {
      this.filters.predicted = predicted.value || undefined;
      this.callbacks.onFilterChange(this.filters);
    });

    const lowConf = el("input", { type: "checkbox", "data-filter": "low-confidence" }) as HTMLInputElement;
    lowConf.checked = this.filters.max_confidence !== undefined;
    lowConf.addEventListener("change", () => {
      this.filters.max_confidence = lowConf.checked ? 0.6 : undefined;
      this.callbacks.onFilterChange(this.filters);
    });

    const sort = el("select", { "data-filter": "sort" }) as HTMLSelectElement;
    for (const [value, label] of [
      ["", "original order"],
      ["confidence:asc", "confidence ↑"],
      ["confidence:desc", "confidence ↓"],
    ]) {
      const opt = el("option", { value, text: label }) as HTMLOptionElement;
      if ((this.filters.sort ?? "") === value) opt.selected = true;
      sort.append(opt);
    }
    sort.addEventListener("change", () => {
      this.filters.sort = sort.value || undefined;
      this.callbacks.onFilterChange(this.filters);
    });

    const bar = el("div", { class: "filter-bar" },
      predicted,
      el("label", {}, lowConf, " confidence < 0.6 only"),
      sort,
    );
    if (busy) for (const node of [predicted, lowConf, sort]) node.setAttribute("disabled", "");
    return bar;
  }

  private rowNode(row: GeneratedRow, variables: string[], busy: boolean): HTMLElement {
    const tr = el("tr", { class: row.provenance === "edited" ? "row edited" : "row" });
    tr.setAttribute("data-row", row.row_id);
    for (const name of variables) {
      tr.append(this.cellNode(row, name, busy));
    }
    tr.append(
      el("td", { class: "predicted", text: row.prediction.predicted_class }),
      el("td", { class: "confidence", text: row.prediction.confidence.toFixed(3) }),
    );
    const del = el("button", { class: "small danger", text: "delete", "data-action": "delete-row" });
    del.addEventListener("click", () => this.callbacks.onDeleteRow(row.row_id));
    if (busy) del.setAttribute("disabled", "");
    tr.append(el("td", {}, del));
    return tr;
  }

  private cellNode(row: GeneratedRow, variable: string, busy: boolean): HTMLElement {
    const td = el("td", { class: "cell", "data-cell": variable });
    const editingHere =
      this.editing && this.editing.rowId === row.row_id && this.editing.variable === variable;
    if (!editingHere) {
      const value = el("span", { text: cell(row.cells[variable]) });
      td.append(value);
      const spec = this.schema.variables.find((v) => v.name === variable);
      if (spec && spec.role === "predictor" && !busy) {
        td.classList.add("editable");
        td.addEventListener("click", () => {
          // clicks inside the open editor bubble here; don't reset it
          if (this.editing?.rowId === row.row_id && this.editing?.variable === variable) {
            return;
          }
          this.editing = { rowId: row.row_id, variable, preview: null };
          this.rerenderCell(td, row, variable);
        });
      }
      return td;
    }
    this.rerenderCell(td, row, variable);
    return td;
  }

  /** Editing UI: input + what-if preview + commit/cancel. A preview fires
   * exactly one what-if request and renders the returned confidence. */
  private rerenderCell(td: HTMLElement, row: GeneratedRow, variable: string): void {
    const spec = this.schema.variables.find((v) => v.name === variable)!;
    const current = row.cells[variable];
    let input: HTMLInputElement | HTMLSelectElement;
    if (spec.kind === "continuous") {
      input = el("input", {
        type: "number", step: "any", value: String(current), "data-edit": "value",
      }) as HTMLInputElement;
    } else {
      input = el("select", { "data-edit": "value" }) as HTMLSelectElement;
      for (const c of (spec.segmentation as string[]) ?? []) {
        const opt = el("option", { value: c, text: c }) as HTMLOptionElement;
        if (c === current) opt.selected = true;
        input.append(opt);
      }
    }

    const preview = el("span", { class: "whatif-preview", "data-edit": "preview" });
    if (this.editing?.preview) {
      const p = this.editing.preview;
      preview.textContent = `→ ${p.predicted_class} (${p.confidence.toFixed(3)})`;
    }

    const previewBtn = el("button", { class: "small", text: "what if?", "data-edit": "whatif" });
    previewBtn.addEventListener("click", async () => {
      const value = spec.kind === "continuous" ? Number(input.value) : input.value;
      const prediction = await this.callbacks.onWhatIf(row.row_id, variable, value);
      if (this.editing) this.editing.preview = prediction;
      preview.textContent = `→ ${prediction.predicted_class} (${prediction.confidence.toFixed(3)})`;
    });

    const commitBtn = el("button", { class: "small primary", text: "apply", "data-edit": "commit" });
    commitBtn.addEventListener("click", () => {
      const value = spec.kind === "continuous" ? Number(input.value) : input.value;
      this.editing = null;
      this.callbacks.onCommitEdit(row.row_id, variable, value);
    });

    const cancelBtn = el("button", { class: "small", text: "cancel", "data-edit": "cancel" });
    cancelBtn.addEventListener("click", () => {
      this.editing = null;
      td.replaceChildren(el("span", { text: cell(current) }));
    });

    // clicks on the editor controls must not bubble into the td's
    // enter-edit-mode listener
    const editor = el("span", { class: "cell-editor" },
      input, previewBtn, preview, commitBtn, cancelBtn);
    editor.addEventListener("click", (event) => event.stopPropagation());
    td.replaceChildren(editor);
  }
}
