// Application shell: URL-encoded state, latest-wins request generations,
// view dispatch, and the error banner. All views are pure functions of
// (state, last API responses); this module owns the side effects.

import {
  ApiClient,
  type FacetCounts,
  type MatchResponse,
  type QuoteResponse,
  type ServiceRecord,
  type ServiceSummary,
  type VocabularyDefinition,
} from "./api.js";
import { toggleFacet } from "./api.js";
import { el } from "./format.js";
import {
  decodeState,
  encodeState,
  toggleBasket,
  type UiState,
  type UsageDraft,
} from "./state.js";
import { buildRequest, validateDraft, type WizardDraft } from "./wizard.js";
import { renderCatalog } from "./views/catalog.js";
import { renderComparison } from "./views/compare.js";
import { renderDetail } from "./views/detail.js";
import { metricNames, renderQuote, renderUsageForm } from "./views/quote.js";
import { renderResults, renderWizard } from "./views/wizard.js";

export interface HistoryLike {
  replace(query: string): void;
  onPop(handler: () => void): void;
  currentQuery(): string;
}

export const browserHistory: HistoryLike = {
  replace(query: string) {
    const url = query ? `?${query}` : location.pathname;
    history.replaceState(null, "", url);
  },
  onPop(handler: () => void) {
    window.addEventListener("popstate", handler);
  },
  currentQuery() {
    return location.search.replace(/^\?/, "");
  },
};

export class App {
  state: UiState;
  private generation = 0;
  private lastMatch: MatchResponse | null = null;
  private lastQuote: QuoteResponse | null = null;
  private vocabularies = new Map<string, VocabularyDefinition>();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly history: HistoryLike = browserHistory,
  ) {
    this.state = decodeState(new URLSearchParams(history.currentQuery()));
  }

  start(): Promise<void> {
    this.history.onPop(() => {
      this.state = decodeState(
        new URLSearchParams(this.history.currentQuery()),
      );
      void this.refresh();
    });
    return this.refresh();
  }

  setState(next: UiState): Promise<void> {
    this.state = next;
    this.history.replace(encodeState(next).toString());
    return this.refresh();
  }

  /** Re-query and re-render; stale responses lose to newer generations. */
  async refresh(): Promise<void> {
    const generation = ++this.generation;
    try {
      const content = await this.renderView();
      if (generation !== this.generation) return; // superseded
      this.root.replaceChildren(this.renderNav(), content);
    } catch (error) {
      if (generation !== this.generation) return;
      const banner = el(
        "div",
        "error-banner",
        `Request failed: ${error instanceof Error ? error.message : String(error)}`,
      );
      // state is preserved: keep whatever is on screen, prepend the banner
      this.root.querySelector(".error-banner")?.remove();
      this.root.prepend(banner);
    }
  }

  private renderNav(): HTMLElement {
    const nav = el("nav", "topnav");
    const views: [UiState["view"], string][] = [
      ["catalog", "Catalog"],
      ["compare", `Compare (${this.state.basket.length})`],
      ["wizard", "Matchmaker"],
    ];
    for (const [view, label] of views) {
      const button = el("button", view === this.state.view ? "active" : "");
      button.textContent = label;
      button.addEventListener("click", () =>
        void this.setState({ ...this.state, view }),
      );
      nav.append(button);
    }
    return nav;
  }

  private async vocabularyFor(id: string): Promise<VocabularyDefinition> {
    const cached = this.vocabularies.get(id);
    if (cached) return cached;
    const envelope = await this.api.getVocabulary(id);
    this.vocabularies.set(id, envelope.definition);
    return envelope.definition;
  }

  private async defaultVocabulary(
    services: ServiceSummary[],
  ): Promise<VocabularyDefinition | null> {
    const id =
      this.state.vocabulary ??
      (services.length > 0 ? services[0]?.vocabulary : undefined);
    if (!id) return null;
    return this.vocabularyFor(id);
  }

  private async renderView(): Promise<HTMLElement> {
    switch (this.state.view) {
      case "catalog":
        return this.catalogView();
      case "detail":
        return this.detailView();
      case "compare":
        return this.compareView();
      case "wizard":
        return this.wizardView();
      case "quote":
        return this.quoteView();
    }
  }

  private async catalogView(): Promise<HTMLElement> {
    const [services, facets]: [ServiceSummary[], FacetCounts] =
      await Promise.all([
        this.api.listServices(this.state.filters, this.state.vocabulary),
        this.api.facets(this.state.filters, this.state.vocabulary),
      ]);
    return renderCatalog(
      services,
      facets,
      this.state.filters,
      this.state.basket,
      {
        onToggleFacet: (property, value) =>
          void this.setState({
            ...this.state,
            filters: toggleFacet(this.state.filters, property, value),
          }),
        onOpenService: (id) =>
          void this.setState({ ...this.state, view: "detail", service: id }),
        onToggleBasket: (id) => void this.setState(toggleBasket(this.state, id)),
      },
    );
  }

  private async detailView(): Promise<HTMLElement> {
    if (!this.state.service) {
      return el("p", "empty", "No service selected.");
    }
    const record = await this.api.getService(this.state.service);
    const vocabulary = await this.vocabularyFor(record.resolved.vocabulary);
    return renderDetail(record, vocabulary, {
      onQuoteVariant: (serviceId, variantId) =>
        void this.setState({
          ...this.state,
          view: "quote",
          service: serviceId,
          variant: variantId,
        }),
    });
  }

  private async compareView(): Promise<HTMLElement> {
    const records = await Promise.all(
      this.state.basket.map((id) => this.api.getService(id)),
    );
    if (records.length === 0) {
      return renderComparison([], { id: "", properties: [], feature_sets: {} });
    }
    const vocabulary = await this.vocabularyFor(
      records[0]!.resolved.vocabulary,
    );
    return renderComparison(records, vocabulary);
  }

  private async wizardView(): Promise<HTMLElement> {
    const services = await this.api.listServices({}, this.state.vocabulary);
    const vocabulary = await this.defaultVocabulary(services);
    const container = el("div", "wizard-container");
    if (!vocabulary) {
      container.append(el("p", "empty", "No vocabulary available yet."));
      return container;
    }
    const errors = validateDraft(this.state.draft, vocabulary);
    container.append(
      renderWizard(this.state.draft, vocabulary, errors, {
        onDraftChange: (draft: WizardDraft) =>
          void this.setState({ ...this.state, draft }),
        onSubmit: () => void this.submitMatch(),
      }),
    );
    if (this.lastMatch) {
      container.append(
        renderResults(this.lastMatch, this.softLabels(this.state.draft)),
      );
    }
    return container;
  }

  private softLabels(draft: WizardDraft): string[] {
    return draft.soft.map((c) => `${c.goal.kind} ${c.goal.property}`);
  }

  async submitMatch(): Promise<void> {
    this.lastMatch = await this.api.match(buildRequest(this.state.draft));
    await this.refresh();
  }

  private async quoteView(): Promise<HTMLElement> {
    if (!this.state.service || this.state.variant === undefined) {
      return el("p", "empty", "No variant selected.");
    }
    const record = await this.api.getService(this.state.service);
    const container = el("div", "quote-view");
    container.append(
      el(
        "h2",
        undefined,
        `Price calculator: ${this.state.service}` +
          (this.state.variant ? ` / ${this.state.variant}` : ""),
      ),
    );

    const variantSelect = el("select", "variant-select") as HTMLSelectElement;
    const { variantRows } = await import("./views/detail.js");
    for (const row of variantRows(record)) {
      const option = el(
        "option",
        undefined,
        row.variantId || "(single configuration)",
      ) as HTMLOptionElement;
      option.value = row.variantId;
      if (row.variantId === this.state.variant) option.selected = true;
      variantSelect.append(option);
    }
    variantSelect.addEventListener("change", () =>
      void this.setState({ ...this.state, variant: variantSelect.value }),
    );
    container.append(variantSelect);

    const metrics = metricNames(this.collectPrices(record));
    container.append(
      renderUsageForm(this.state.usage, metrics, {
        onUsageChange: (usage: UsageDraft) =>
          void this.setState({ ...this.state, usage }),
      }),
    );

    this.lastQuote = await this.api.quote(
      this.state.service,
      this.state.variant,
      this.state.usage,
    );
    container.append(renderQuote(this.lastQuote));
    return container;
  }

  private collectPrices(record: ServiceRecord): unknown[] {
    const prices = [...record.resolved.prices];
    const parts = this.state.variant ? this.state.variant.split("/") : [];
    record.resolved.dimensions.forEach((dimension, index) => {
      const optionId = parts[index];
      const option = dimension.options.find((o) => o.id === optionId);
      if (option) prices.push(...option.prices);
    });
    return prices;
  }
}
