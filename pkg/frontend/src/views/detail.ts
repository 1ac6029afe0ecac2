// Assessment view: the whole description with the vocabulary's docs and
// relevance text per property, plus a variants overview table.

import type {
  OptionDoc,
  ServiceRecord,
  VocabularyDefinition,
} from "../api.js";
import { el, formatValue, labelize } from "../format.js";

interface VariantRow {
  variantId: string;
  optionIds: string[];
}

/** The non-excluded option combinations, in dimension declaration order. */
export function variantRows(record: ServiceRecord): VariantRow[] {
  const dimensions = record.resolved.dimensions;
  if (dimensions.length === 0) {
    return [{ variantId: "", optionIds: [] }];
  }
  const rows: VariantRow[] = [];
  const walk = (index: number, chosen: OptionDoc[]) => {
    if (index === dimensions.length) {
      const byDimension: Record<string, string> = {};
      dimensions.forEach((dimension, position) => {
        const option = chosen[position];
        if (option) byDimension[dimension.name] = option.id;
      });
      const excluded = record.resolved.exclusions.some((exclusion) =>
        Object.entries(exclusion).every(
          ([dimension, option]) => byDimension[dimension] === option,
        ),
      );
      if (!excluded) {
        const ids = chosen.map((option) => option.id);
        rows.push({ variantId: ids.join("/"), optionIds: ids });
      }
      return;
    }
    for (const option of dimensions[index]?.options ?? []) {
      walk(index + 1, [...chosen, option]);
    }
  };
  walk(0, []);
  return rows;
}

export interface DetailHandlers {
  onQuoteVariant(serviceId: string, variantId: string): void;
}

export function renderDetail(
  record: ServiceRecord,
  vocabulary: VocabularyDefinition,
  handlers: DetailHandlers,
): HTMLElement {
  const view = el("div", "detail-view");
  view.append(el("h2", "detail-title", record.service_id));
  view.append(
    el(
      "p",
      "detail-meta",
      `version ${record.version} · evaluated ${record.created_at}`,
    ),
  );

  const table = el("table", "property-table");
  for (const property of vocabulary.properties) {
    const row = el("tr", "property-row");
    row.dataset.property = property.name;
    row.append(el("th", "property-name", labelize(property.name)));
    const value = record.resolved.properties[property.name];
    row.append(el("td", "property-value", formatValue(value)));
    const docs = el("td", "property-docs");
    docs.append(el("p", "doc", property.doc));
    if (property.relevance) {
      docs.append(el("p", "relevance", property.relevance));
    }
    row.append(docs);
    table.append(row);
  }
  view.append(table);

  const variants = variantRows(record);
  const heading = el(
    "h3",
    "variants-heading",
    `Variants (${variants.length})`,
  );
  view.append(heading);
  const variantTable = el("table", "variant-table");
  const header = el("tr");
  for (const dimension of record.resolved.dimensions) {
    header.append(el("th", undefined, labelize(dimension.name)));
  }
  header.append(el("th", undefined, ""));
  variantTable.append(header);
  for (const row of variants) {
    const tr = el("tr", "variant-row");
    tr.dataset.variantId = row.variantId;
    for (const optionId of row.optionIds) {
      tr.append(el("td", undefined, optionId));
    }
    if (row.optionIds.length === 0) {
      tr.append(el("td", undefined, "(single configuration)"));
    }
    const actions = el("td");
    const quote = el("button", "quote-button", "Price this variant");
    quote.addEventListener("click", () =>
      handlers.onQuoteVariant(record.service_id, row.variantId),
    );
    actions.append(quote);
    tr.append(actions);
    variantTable.append(tr);
  }
  view.append(variantTable);
  return view;
}
