import { WorkbenchApi } from "./api.js";
import { el } from "./format.js";
import { AugmentPanel } from "./panels/augment.js";
import { DriftDialog } from "./panels/drift.js";
import { renderExplorer } from "./panels/explorer.js";
import { GeneratedPanel } from "./panels/generated.js";
import { renderHistory } from "./panels/history.js";
import { renderOverview } from "./panels/overview.js";
import { renderQuality } from "./panels/quality.js";
import { MutationGate } from "./state.js";
import type {
  BatchView,
  BiasReport,
  ConstraintIn,
  HistoryEntry,
  Overview,
  Prediction,
  QualityReport,
  SchemaResponse,
} from "./types.js";

interface ViewData {
  overview: Overview;
  bias: BiasReport;
  quality: QualityReport;
  history: HistoryEntry[];
  batch: BatchView | null;
}

/** Single-page wiring of the six panels. The app holds no authoritative
 * state: every displayed number comes from the last API fetch, and every
 * mutation re-fetches the whole view. */
export class App {
  readonly gate = new MutationGate();
  private schema!: SchemaResponse;
  private view: ViewData | null = null;
  private selectedVariable: string | null = null;
  private augmentPanel!: AugmentPanel;
  private generatedPanel!: GeneratedPanel;
  private driftDialog!: DriftDialog;

  private readonly sections: Record<string, HTMLElement> = {};

  constructor(
    private readonly api: WorkbenchApi,
    private readonly root: HTMLElement,
  ) {}

  async init(): Promise<void> {
    for (const name of ["status", "overview", "explorer", "quality", "augment", "generated", "history", "dialog"]) {
      const section = el("section", { class: `panel panel-${name}`, id: `panel-${name}` });
      this.sections[name] = section;
      this.root.append(section);
    }
    this.schema = await this.api.schema();
    this.augmentPanel = new AugmentPanel(this.sections.augment, this.schema, {
      onPlan: (constraints, joint) => this.planConstraints(constraints, joint),
      onGenerate: (constraints, joint) => this.generate(constraints, joint),
    });
    this.generatedPanel = new GeneratedPanel(this.sections.generated, this.schema, {
      onWhatIf: (rowId, variable, value) => this.whatIf(rowId, variable, value),
      onCommitEdit: (rowId, variable, value) => this.commitEdit(rowId, variable, value),
      onDeleteRow: (rowId) => this.deleteRow(rowId),
      onDiscard: () => this.discard(),
      onRetrain: () => this.openRetrainDialog(),
      onFilterChange: () => this.refetchBatch(),
    });
    this.driftDialog = new DriftDialog(this.sections.dialog, {
      onAcknowledgeAndRetrain: () => this.retrain(),
      onRevertInstead: () => this.discard(),
      onClose: () => undefined,
    });
    this.gate.onChange(() => this.renderAll());
    await this.refresh();
  }

  /** Settles when all queued mutations and their refreshes are done. */
  idle(): Promise<void> {
    return this.gate.idle();
  }

  /** Re-fetch the whole view from the service, then render it. */
  async refresh(): Promise<void> {
    const [overview, bias, quality, history] = await Promise.all([
      this.api.overview(),
      this.api.variables(),
      this.api.quality(),
      this.api.history(),
    ]);
    let batch: BatchView | null = null;
    if (overview.pending_batch) {
      batch = await this.api.generated(this.generatedPanel.filters);
    }
    this.view = { overview, bias, quality, history: history.entries, batch };
    this.renderAll();
  }

  private renderAll(): void {
    if (!this.view) return;
    const busy = this.gate.busy;
    renderOverview(this.sections.overview, this.view.overview);
    renderExplorer(this.sections.explorer, this.view.bias, this.selectedVariable, (name) => {
      this.selectedVariable = name;
      this.renderAll();
    });
    renderQuality(this.sections.quality, this.view.quality);
    renderHistory(this.sections.history, this.view.history, (index) => this.revert(index), busy);
    this.augmentPanel.render(false, busy);
    if (this.view.batch) {
      this.generatedPanel.render(this.view.batch, this.view.overview.classes, busy);
    } else {
      this.generatedPanel.renderEmpty();
    }
    this.renderStatus();
  }

  private renderStatus(): void {
    const parts: (Node | string)[] = [];
    if (this.gate.busy) parts.push(el("span", { class: "busy", text: "working…" }));
    if (this.gate.lastError) {
      parts.push(el("span", { class: "error", "data-status": "error", text: this.gate.lastError }));
    }
    this.sections.status.replaceChildren(...parts);
  }

  // -- actions (each one serialized through the gate) ---------------------

  private refetchBatch(): Promise<void> {
    return this.gate.run(async () => {
      if (this.view?.overview.pending_batch) {
        this.view.batch = await this.api.generated(this.generatedPanel.filters);
      }
    });
  }

  planConstraints(constraints: ConstraintIn[], joint: boolean): Promise<void> {
    return this.gate.run(async () => {
      const plan = await this.api.plan({ constraints, joint });
      this.augmentPanel.setWarnings(plan.warnings);
    });
  }

  generate(constraints: ConstraintIn[], joint: boolean): Promise<void> {
    return this.gate.run(async () => {
      const batch = await this.api.augment({ constraints, joint }, Date.now() % 100_000);
      this.augmentPanel.setWarnings(batch.warnings);
      await this.refresh();
    });
  }

  /** What-if previews are pure reads; they bypass the mutation gate so the
   * open cell editor survives them. */
  whatIf(rowId: string, variable: string, value: number | string): Promise<Prediction> {
    return this.api.whatIf(rowId, variable, value).then((r) => r.prediction);
  }

  commitEdit(rowId: string, variable: string, value: number | string): Promise<void> {
    return this.gate.run(async () => {
      await this.api.editCell(rowId, variable, value);
      await this.refresh();
    });
  }

  deleteRow(rowId: string): Promise<void> {
    return this.gate.run(async () => {
      await this.api.deleteRow(rowId);
      await this.refresh();
    });
  }

  discard(): Promise<void> {
    return this.gate.run(async () => {
      await this.api.discardBatch();
      await this.refresh();
    });
  }

  /** Entry point of the retrain flow: always opens the bias-awareness dialog
   * first; the actual retrain request happens only after acknowledgement. */
  openRetrainDialog(): Promise<void> {
    return this.gate.run(async () => {
      const report = await this.api.drift();
      this.driftDialog.show(report);
    });
  }

  retrain(): Promise<void> {
    return this.gate.run(async () => {
      await this.api.retrain(true, `ui-retrain-${Date.now()}`);
      await this.refresh();
    });
  }

  revert(index: number): Promise<void> {
    return this.gate.run(async () => {
      await this.api.revert(index, `ui-revert-${index}-${Date.now()}`);
      await this.refresh();
    });
  }
}
