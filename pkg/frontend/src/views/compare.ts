// Side-by-side comparison: one column per basket service, one row per
// vocabulary property; rows whose values differ are visually highlighted.

import type { ServiceRecord, VocabularyDefinition } from "../api.js";
import { el, formatValue, labelize } from "../format.js";

export function renderComparison(
  records: ServiceRecord[],
  vocabulary: VocabularyDefinition,
): HTMLElement {
  const view = el("div", "compare-view");
  if (records.length === 0) {
    view.append(el("p", "empty", "Add services to the comparison basket."));
    return view;
  }
  const table = el("table", "compare-table");
  const header = el("tr");
  header.append(el("th", undefined, "property"));
  for (const record of records) {
    header.append(el("th", "compare-service", record.service_id));
  }
  table.append(header);

  for (const property of vocabulary.properties) {
    const row = el("tr", "compare-row");
    row.dataset.property = property.name;
    row.append(el("th", "property-name", labelize(property.name)));
    const rendered = records.map((record) =>
      formatValue(record.resolved.properties[property.name]),
    );
    const allEqual = rendered.every((text) => text === rendered[0]);
    if (!allEqual) {
      row.classList.add("diff");
    }
    for (const text of rendered) {
      row.append(el("td", "compare-value", text));
    }
    table.append(row);
  }
  view.append(table);
  return view;
}
