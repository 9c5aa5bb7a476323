// @vitest-environment jsdom
import { beforeEach, expect, test, vi } from "vitest";

import { DriftDialog } from "../src/panels/drift.js";
import type { DriftReport } from "../src/types.js";

const REPORT: DriftReport = {
  per_variable: { severity: 0.21, age: 0.02 },
  flagged: ["severity"],
  threshold: 0.15,
  histograms: {
    severity: { labels: ["mild", "moderate", "severe"], before: [400, 120, 200], after: [400, 220, 200] },
    age: { labels: ["[18, 45)", "[45, 65)", "[65, 95)"], before: [300, 300, 120], after: [310, 300, 120] },
  },
};

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "<div id='dialog'></div>";
  container = document.getElementById("dialog")!;
});

test("retrain stays blocked until the warning is acknowledged", () => {
  const onRetrain = vi.fn();
  const dialog = new DriftDialog(container, {
    onAcknowledgeAndRetrain: onRetrain,
    onRevertInstead: vi.fn(),
    onClose: vi.fn(),
  });
  dialog.show(REPORT);

  const retrainBtn = container.querySelector("[data-drift='retrain']") as HTMLButtonElement;
  expect(retrainBtn.disabled).toBe(true);
  retrainBtn.click();
  expect(onRetrain).not.toHaveBeenCalled();

  const ack = container.querySelector("[data-drift='ack']") as HTMLInputElement;
  ack.checked = true;
  ack.dispatchEvent(new Event("change"));
  expect(retrainBtn.disabled).toBe(false);
  retrainBtn.click();
  expect(onRetrain).toHaveBeenCalledTimes(1);
  expect(dialog.isOpen()).toBe(false);
});

test("flagged variables are called out and charted", () => {
  const dialog = new DriftDialog(container, {
    onAcknowledgeAndRetrain: vi.fn(),
    onRevertInstead: vi.fn(),
    onClose: vi.fn(),
  });
  dialog.show(REPORT);
  expect(container.querySelector("[data-drift='flagged']")!.textContent).toContain("severity");
  const flaggedChart = container.querySelector("[data-drift-variable='severity']")!;
  expect(flaggedChart.className).toContain("flagged");
  expect(container.querySelectorAll(".drift-row").length).toBe(6);
});

test("revert path closes the dialog without retraining", () => {
  const onRetrain = vi.fn();
  const onRevert = vi.fn();
  const dialog = new DriftDialog(container, {
    onAcknowledgeAndRetrain: onRetrain,
    onRevertInstead: onRevert,
    onClose: vi.fn(),
  });
  dialog.show(REPORT);
  (container.querySelector("[data-drift='revert']") as HTMLButtonElement).click();
  expect(onRevert).toHaveBeenCalledTimes(1);
  expect(onRetrain).not.toHaveBeenCalled();
  expect(container.children.length).toBe(0);
});
