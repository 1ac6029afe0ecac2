// Deep-linkable UI state: facets, comparison basket, wizard draft, and the
// usage form all round-trip through the URL query string, so any selection
// session is shareable as a link.

import type { FacetSelection } from "./api.js";
import { EMPTY_DRAFT, type WizardDraft } from "./wizard.js";

export type View = "catalog" | "detail" | "compare" | "wizard" | "quote";

export const MAX_BASKET = 4;

export interface UsageDraft {
  horizon_months: number;
  metrics: Record<string, number>;
}

export interface UiState {
  view: View;
  vocabulary?: string;
  filters: FacetSelection;
  basket: string[]; // distinct service ids, at most MAX_BASKET
  service?: string; // detail / quote target
  variant?: string; // quote target
  draft: WizardDraft;
  usage: UsageDraft;
}

export const INITIAL_STATE: UiState = {
  view: "catalog",
  filters: {},
  basket: [],
  draft: EMPTY_DRAFT,
  usage: { horizon_months: 1, metrics: {} },
};

const VIEWS: View[] = ["catalog", "detail", "compare", "wizard", "quote"];

export function encodeState(state: UiState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.view !== "catalog") params.set("view", state.view);
  if (state.vocabulary) params.set("vocabulary", state.vocabulary);
  for (const property of Object.keys(state.filters).sort()) {
    for (const value of [...(state.filters[property] ?? [])].sort()) {
      params.append("f", `${property}:${value}`);
    }
  }
  if (state.basket.length > 0) params.set("basket", state.basket.join(","));
  if (state.service) params.set("service", state.service);
  if (state.variant !== undefined) params.set("variant", state.variant);
  if (state.draft.hard.length || state.draft.soft.length || state.draft.vocabulary) {
    params.set("draft", JSON.stringify(state.draft));
  }
  if (
    state.usage.horizon_months !== 1 ||
    Object.keys(state.usage.metrics).length > 0
  ) {
    params.set("usage", JSON.stringify(state.usage));
  }
  return params;
}

export function decodeState(params: URLSearchParams): UiState {
  const state: UiState = {
    ...INITIAL_STATE,
    filters: {},
    basket: [],
    draft: { hard: [], soft: [] },
    usage: { horizon_months: 1, metrics: {} },
  };
  const view = params.get("view");
  if (view && (VIEWS as string[]).includes(view)) state.view = view as View;
  const vocabulary = params.get("vocabulary");
  if (vocabulary) state.vocabulary = vocabulary;
  for (const raw of params.getAll("f")) {
    const separator = raw.indexOf(":");
    if (separator <= 0) continue;
    const property = raw.slice(0, separator);
    const value = raw.slice(separator + 1);
    (state.filters[property] ??= []).push(value);
  }
  for (const property of Object.keys(state.filters)) {
    state.filters[property] = [...new Set(state.filters[property])].sort();
  }
  const basket = params.get("basket");
  if (basket) {
    state.basket = [...new Set(basket.split(",").filter(Boolean))].slice(
      0,
      MAX_BASKET,
    );
  }
  const service = params.get("service");
  if (service) state.service = service;
  const variant = params.get("variant");
  if (variant !== null) state.variant = variant;
  const draft = params.get("draft");
  if (draft) {
    try {
      const parsed = JSON.parse(draft) as WizardDraft;
      if (Array.isArray(parsed.hard) && Array.isArray(parsed.soft)) {
        state.draft = parsed;
      }
    } catch {
      // malformed deep link: fall back to an empty draft
    }
  }
  const usage = params.get("usage");
  if (usage) {
    try {
      const parsed = JSON.parse(usage) as UsageDraft;
      if (
        typeof parsed.horizon_months === "number" &&
        parsed.horizon_months >= 1 &&
        parsed.metrics &&
        typeof parsed.metrics === "object"
      ) {
        state.usage = parsed;
      }
    } catch {
      // keep defaults
    }
  }
  return state;
}

export function toggleBasket(state: UiState, serviceId: string): UiState {
  const basket = state.basket.includes(serviceId)
    ? state.basket.filter((id) => id !== serviceId)
    : [...state.basket, serviceId].slice(0, MAX_BASKET);
  return { ...state, basket };
}
