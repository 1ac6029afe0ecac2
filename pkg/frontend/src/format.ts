// Display formatting for API values. Purely cosmetic: numbers shown here
// are rendered verbatim from responses, never recomputed.

import type { PropertyValue } from "./api.js";

export function labelize(propertyName: string): string {
  return propertyName.replaceAll("_", " ");
}

/** Money renders with at least two fraction digits but never fewer digits
 * than the API sent (no information is dropped or recomputed). */
export function formatMoney(amount: number, currency: string): string {
  const text = amount.toLocaleString("en-US", {
    minimumFractionDigits: 2,
    maximumFractionDigits: 4,
    useGrouping: false,
  });
  return `${text} ${currency}`;
}

export function formatValue(value: PropertyValue | undefined): string {
  if (value === undefined) return "not specified";
  if (typeof value === "boolean") return value ? "yes" : "no";
  if (typeof value === "number") return String(value);
  if (typeof value === "string") return value;
  if (Array.isArray(value)) return value.join(", ");
  if ("currency" in value) return formatMoney(value.amount, value.currency);
  return `${value.magnitude} ${value.unit}`;
}

export function formatScore(score: number): string {
  return (Math.round(score * 1000) / 1000).toFixed(3);
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}
