// Discovery view: service cards plus the faceted sidebar. Facet counts
// come from /facets verbatim; toggling a value re-queries both endpoints.

import type { FacetCounts, FacetSelection, ServiceSummary } from "../api.js";
import { el, labelize } from "../format.js";

export interface CatalogHandlers {
  onToggleFacet(property: string, value: string): void;
  onOpenService(id: string): void;
  onToggleBasket(id: string): void;
}

export function renderFacetSidebar(
  facets: FacetCounts,
  selected: FacetSelection,
  handlers: Pick<CatalogHandlers, "onToggleFacet">,
): HTMLElement {
  const sidebar = el("aside", "facets");
  for (const property of Object.keys(facets).sort()) {
    const group = el("section", "facet-group");
    group.dataset.property = property;
    group.append(el("h3", "facet-title", labelize(property)));
    const values = facets[property] ?? {};
    const list = el("ul", "facet-values");
    for (const value of Object.keys(values).sort()) {
      const item = el("li", "facet-value");
      const label = el("label");
      const checkbox = el("input") as HTMLInputElement;
      checkbox.type = "checkbox";
      checkbox.checked = (selected[property] ?? []).includes(value);
      checkbox.dataset.property = property;
      checkbox.dataset.value = value;
      checkbox.addEventListener("change", () =>
        handlers.onToggleFacet(property, value),
      );
      label.append(checkbox, el("span", "facet-name", value));
      label.append(el("span", "facet-count", String(values[value])));
      item.append(label);
      list.append(item);
    }
    group.append(list);
    sidebar.append(group);
  }
  return sidebar;
}

export function renderServiceList(
  services: ServiceSummary[],
  basket: string[],
  handlers: Pick<CatalogHandlers, "onOpenService" | "onToggleBasket">,
): HTMLElement {
  const list = el("div", "service-list");
  if (services.length === 0) {
    list.append(el("p", "empty", "No services match the current filters."));
    return list;
  }
  for (const service of services) {
    const card = el("article", "service-card");
    card.dataset.serviceId = service.id;
    const title = el("h2", "service-title", service.id);
    title.addEventListener("click", () => handlers.onOpenService(service.id));
    card.append(title);
    card.append(
      el(
        "p",
        "service-meta",
        `${service.vocabulary} · v${service.version} · ` +
          `${service.matching_variants} of ${service.variant_count} variants match`,
      ),
    );
    const compare = el("button", "compare-toggle");
    compare.textContent = basket.includes(service.id)
      ? "Remove from comparison"
      : "Compare";
    compare.addEventListener("click", () => handlers.onToggleBasket(service.id));
    card.append(compare);
    list.append(card);
  }
  return list;
}

export function renderCatalog(
  services: ServiceSummary[],
  facets: FacetCounts,
  selected: FacetSelection,
  basket: string[],
  handlers: CatalogHandlers,
): HTMLElement {
  const view = el("div", "catalog-view");
  view.append(renderFacetSidebar(facets, selected, handlers));
  view.append(renderServiceList(services, basket, handlers));
  return view;
}
