// Typed client for the repository HTTP/JSON API. The UI never computes
// scores or prices itself; every displayed number originates from one of
// these responses.

export type MoneyValue = { amount: number; currency: string };
export type QuantityValue = { magnitude: number; unit: string };
export type PropertyValue =
  | string
  | number
  | boolean
  | string[]
  | MoneyValue
  | QuantityValue;

export interface ServiceSummary {
  id: string;
  vocabulary: string;
  version: number;
  variant_count: number;
  matching_variants: number;
}

export type FacetCounts = Record<string, Record<string, number>>;

export interface VocabularyProperty {
  name: string;
  type: string;
  doc: string;
  relevance: string;
  importance: number;
}

export interface VocabularyDefinition {
  id: string;
  properties: VocabularyProperty[];
  feature_sets: Record<string, string[]>;
}

export interface VocabularyEnvelope {
  id: string;
  source: string;
  definition: VocabularyDefinition;
}

export interface OptionDoc {
  id: string;
  properties: Record<string, PropertyValue>;
  prices: unknown[];
}

export interface DimensionDoc {
  name: string;
  options: OptionDoc[];
}

export interface ResolvedService {
  id: string;
  vocabulary: string;
  properties: Record<string, PropertyValue>;
  prices: unknown[];
  dimensions: DimensionDoc[];
  exclusions: Record<string, string>[];
  fetch_rules: unknown[];
}

export interface ServiceRecord {
  service_id: string;
  version: number;
  source: string;
  resolved: ResolvedService;
  content_hash: string;
  created_at: string;
}

export interface RankedEntry {
  service_id: string;
  variant_id: string;
  score: number;
  constraint_scores: number[];
}

export interface MatchResponse {
  ranked: RankedEntry[];
  excluded_count: number;
}

export interface QuoteLineItem {
  component: string;
  billed_quantity: number;
  cost: MoneyValue;
}

export interface QuoteResponse {
  total: MoneyValue;
  line_items: QuoteLineItem[];
}

export interface UsageProfileBody {
  horizon_months: number;
  metrics: Record<string, number>;
}

export interface ApiErrorBody {
  error: string;
  details: unknown[];
}

// property -> selected values; disjunctive within a property, conjunctive
// across properties (mirrors the repository's filter semantics)
export type FacetSelection = Record<string, string[]>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(body.error);
  }
}

/** Query parameters for /services and /facets: repeatable filter=prop:value
 * (sorted for stable, cache-friendly URLs) plus optional vocabulary. */
export function facetParams(
  filters: FacetSelection,
  vocabulary?: string,
): URLSearchParams {
  const params = new URLSearchParams();
  for (const property of Object.keys(filters).sort()) {
    for (const value of [...(filters[property] ?? [])].sort()) {
      params.append("filter", `${property}:${value}`);
    }
  }
  if (vocabulary) {
    params.set("vocabulary", vocabulary);
  }
  return params;
}

export function toggleFacet(
  filters: FacetSelection,
  property: string,
  value: string,
): FacetSelection {
  const current = new Set(filters[property] ?? []);
  if (current.has(value)) {
    current.delete(value);
  } else {
    current.add(value);
  }
  const next: FacetSelection = { ...filters };
  if (current.size === 0) {
    delete next[property];
  } else {
    next[property] = [...current].sort();
  }
  return next;
}

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body as ApiErrorBody);
    }
    return body as T;
  }

  listServices(
    filters: FacetSelection,
    vocabulary?: string,
  ): Promise<ServiceSummary[]> {
    const query = facetParams(filters, vocabulary).toString();
    return this.request(`/services${query ? "?" + query : ""}`);
  }

  facets(filters: FacetSelection, vocabulary?: string): Promise<FacetCounts> {
    const query = facetParams(filters, vocabulary).toString();
    return this.request(`/facets${query ? "?" + query : ""}`);
  }

  getService(id: string): Promise<ServiceRecord> {
    return this.request(`/services/${encodeURIComponent(id)}`);
  }

  getVocabulary(id: string): Promise<VocabularyEnvelope> {
    return this.request(`/vocabularies/${encodeURIComponent(id)}`);
  }

  match(request: unknown): Promise<MatchResponse> {
    return this.request("/match", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
  }

  quote(
    serviceId: string,
    variantId: string,
    usage: UsageProfileBody,
  ): Promise<QuoteResponse> {
    // variant ids contain slashes by construction (one option per dimension)
    return this.request(
      `/services/${encodeURIComponent(serviceId)}/variants/${variantId}/quote`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(usage),
      },
    );
  }
}
