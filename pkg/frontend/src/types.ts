/** Shapes of the service responses the UI consumes. */

export interface Overview {
  accuracy: number;
  accuracy_delta: number;
  accuracy_interval: [number, number];
  train_rows: number;
  heldout_rows: number;
  predictors: string[];
  target: string;
  classes: string[];
  retrain_count: number;
  pending_batch: string | null;
  history_length: number;
}

export interface SegmentRegion {
  variable: string;
  label: string;
  lo?: number | string;
  hi?: number | string;
  categories?: string[];
}

export interface SegmentStats {
  segment: SegmentRegion;
  count: number;
  representation_rate: number;
  covered: boolean;
  coverage_threshold: number;
  accuracy_by_outcome: Record<string, number>;
}

export interface QuickInsight {
  variable: string;
  segment: string;
  reason: string;
  score: number;
}

export interface BiasReport {
  overall_rr: number;
  overall_cr: number;
  coverage_threshold: number;
  variables: Record<string, { rr: number; segments: SegmentStats[] }>;
  quick_insights: QuickInsight[];
}

export interface QualityReport {
  severities: Record<string, number>;
  overall: number;
  flagged_pairs: { variable_a: string; variable_b: string; association: number }[];
  flagged_rows: { row_id: string; issue: string }[];
}

export interface VariableSchema {
  name: string;
  kind: "continuous" | "categorical" | "binary";
  unit: string;
  role: "predictor" | "target";
  group: string;
  segmentation: unknown;
}

export interface SchemaResponse {
  variables: VariableSchema[];
  segments: Record<string, SegmentRegion[]>;
}

export interface ConstraintIn {
  variable: string;
  count: number;
  min?: number;
  max?: number;
  max_open?: boolean;
  categories?: string[];
}

export interface ConstraintSetIn {
  joint: boolean;
  constraints: ConstraintIn[];
}

export interface Warning {
  constraint: Record<string, unknown>;
  existing_count: number;
  requested_count: number;
  ratio: number;
}

export interface Prediction {
  predicted_class: string;
  class_probabilities: Record<string, number>;
  confidence: number;
}

export interface GeneratedRow {
  row_id: string;
  cells: Record<string, number | string>;
  provenance: string;
  prediction: Prediction;
}

export interface BatchView {
  batch_id: string;
  size: number;
  estimated_accuracy: number | null;
  estimated_quality: QualityReport | null;
  warnings: Warning[];
  edit_count?: number;
  rows: GeneratedRow[];
}

export interface DriftReport {
  per_variable: Record<string, number>;
  flagged: string[];
  threshold: number;
  histograms: Record<string, { labels: string[]; before: number[]; after: number[] }>;
}

export interface HistoryEntry {
  index: number;
  kind: string;
  overall_rr: number;
  overall_cr: number;
  accuracy: number;
  quality_overall: number;
  train_rows: number;
  batch_size: number;
  edit_count: number;
  reverted_to: number | null;
  deltas: Record<string, number>;
}

export interface ApiError {
  code: string;
  message: string;
  detail: Record<string, unknown>;
}
