// Price calculator: horizon plus per-metric monthly usage; the quote is
// re-fetched on every change and rendered verbatim (line items + total).

import type { QuoteResponse } from "../api.js";
import { el, formatMoney } from "../format.js";
import type { UsageDraft } from "../state.js";

export interface QuoteHandlers {
  onUsageChange(usage: UsageDraft): void;
}

/** Metric names referenced by per-unit price components of the variant. */
export function metricNames(prices: unknown[]): string[] {
  const names = new Set<string>();
  for (const price of prices) {
    if (
      typeof price === "object" &&
      price !== null &&
      (price as { kind?: string }).kind === "per_unit"
    ) {
      const metric = (price as { metric?: string }).metric;
      if (metric) names.add(metric);
    }
  }
  return [...names].sort();
}

export function renderUsageForm(
  usage: UsageDraft,
  metrics: string[],
  handlers: QuoteHandlers,
): HTMLElement {
  const form = el("div", "usage-form");

  const horizonLabel = el("label", "horizon");
  horizonLabel.append(el("span", undefined, "months"));
  const horizon = el("input", "horizon-input") as HTMLInputElement;
  horizon.type = "number";
  horizon.min = "1";
  horizon.step = "1";
  horizon.value = String(usage.horizon_months);
  horizon.addEventListener("change", () => {
    const months = Number(horizon.value);
    if (!Number.isInteger(months) || months < 1) {
      horizon.value = String(usage.horizon_months); // reject client-side
      return;
    }
    handlers.onUsageChange({ ...usage, horizon_months: months });
  });
  horizonLabel.append(horizon);
  form.append(horizonLabel);

  for (const metric of metrics) {
    const label = el("label", "metric");
    label.append(el("span", undefined, `${metric} per month`));
    const input = el("input", "metric-input") as HTMLInputElement;
    input.type = "number";
    input.min = "0";
    input.step = "any";
    input.dataset.metric = metric;
    input.value = String(usage.metrics[metric] ?? 0);
    input.addEventListener("change", () => {
      const quantity = Number(input.value);
      if (!(quantity >= 0)) {
        input.value = String(usage.metrics[metric] ?? 0); // negatives rejected
        return;
      }
      handlers.onUsageChange({
        ...usage,
        metrics: { ...usage.metrics, [metric]: quantity },
      });
    });
    label.append(input);
    form.append(label);
  }
  return form;
}

export function renderQuote(quote: QuoteResponse): HTMLElement {
  const view = el("div", "quote-result");
  const table = el("table", "quote-table");
  const header = el("tr");
  ["component", "billed quantity", "cost"].forEach((text) =>
    header.append(el("th", undefined, text)),
  );
  table.append(header);
  for (const item of quote.line_items) {
    const row = el("tr", "line-item");
    row.append(el("td", "component", item.component));
    row.append(el("td", "billed", String(item.billed_quantity)));
    row.append(
      el("td", "cost", formatMoney(item.cost.amount, item.cost.currency)),
    );
    table.append(row);
  }
  view.append(table);
  view.append(
    el(
      "p",
      "quote-total",
      `Total: ${formatMoney(quote.total.amount, quote.total.currency)}`,
    ),
  );
  return view;
}
