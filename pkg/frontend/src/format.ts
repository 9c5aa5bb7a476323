/** Small display helpers shared by the panels. */

export function rate(x: number): string {
  return x.toFixed(2);
}

export function pct(x: number, digits = 1): string {
  return (x * 100).toFixed(digits) + "%";
}

export function signedPct(x: number, digits = 1): string {
  const s = (x * 100).toFixed(digits);
  return (x >= 0 ? "+" : "") + s + "%";
}

export function cell(value: number | string): string {
  if (typeof value === "number") {
    return Number.isInteger(value) ? String(value) : value.toFixed(2);
  }
  return value;
}

export function segmentTitle(label: string, unit: string): string {
  return unit ? `${label} ${unit}` : label;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else if (k === "text") node.textContent = v;
    else node.setAttribute(k, v);
  }
  node.append(...children);
  return node;
}
