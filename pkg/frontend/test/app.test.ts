import { describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { App, type HistoryLike } from "../src/app.js";
import { INITIAL_STATE } from "../src/state.js";
import { MATCH_GOLDEN, MockApi } from "./mock_api.js";

function fakeHistory(initial = ""): HistoryLike {
  let query = initial;
  return {
    replace(next: string) {
      query = next;
    },
    onPop() {},
    currentQuery() {
      return query;
    },
  };
}

async function bootApp(mock: MockApi = new MockApi(), query = "") {
  const root = document.createElement("div");
  document.body.append(root);
  const app = new App(root, new ApiClient("", mock.fetchFn), fakeHistory(query));
  await app.start();
  return { app, root, mock };
}

describe("catalog view", () => {
  it("renders one card per service with facet counts", async () => {
    const { root } = await bootApp();
    expect(root.querySelectorAll(".service-card")).toHaveLength(3);
    const group = root.querySelector(
      '.facet-group[data-property="company_jurisdiction"]',
    );
    expect(group).not.toBeNull();
    expect(group!.textContent).toContain("de");
    expect(group!.textContent).toContain("2"); // count shown next to value
  });

  it("shows the business-pertinent facet labels for the shipped vocabulary", async () => {
    const { root } = await bootApp();
    const titles = [...root.querySelectorAll(".facet-title")].map(
      (node) => node.textContent,
    );
    expect(titles).toContain("company jurisdiction");
    // the full shipped vocabulary also exposes payment options and
    // certifications; the mock trims facets to two properties, so assert
    // the labelization rule on them directly
    const { labelize } = await import("../src/format.js");
    expect(labelize("payment_options")).toBe("payment options");
    expect(labelize("certifications")).toBe("certifications");
  });

  it("toggling a facet issues the correct query parameters and re-renders", async () => {
    const { root, mock } = await bootApp();
    mock.requests.length = 0;

    const checkbox = root.querySelector(
      'input[data-property="company_jurisdiction"][data-value="de"]',
    ) as HTMLInputElement;
    checkbox.dispatchEvent(new Event("change"));
    await new Promise((resolve) => setTimeout(resolve, 0));

    const listRequests = mock.requests.filter((r) =>
      r.url.startsWith("/services"),
    );
    expect(listRequests).toHaveLength(1);
    const query = new URLSearchParams(listRequests[0]!.url.split("?")[1]);
    expect(query.getAll("filter")).toEqual(["company_jurisdiction:de"]);

    const facetRequests = mock.requests.filter((r) =>
      r.url.startsWith("/facets"),
    );
    expect(facetRequests).toHaveLength(1);
    const facetQuery = new URLSearchParams(facetRequests[0]!.url.split("?")[1]);
    expect(facetQuery.getAll("filter")).toEqual(["company_jurisdiction:de"]);

    // the mock narrows to the DE-only listing
    expect(root.querySelectorAll(".service-card")).toHaveLength(1);
    expect(root.querySelector(".service-card")!.textContent).toContain(
      "boxcloud",
    );

    // toggling off clears the parameter again
    mock.requests.length = 0;
    const again = root.querySelector(
      'input[data-property="company_jurisdiction"][data-value="de"]',
    ) as HTMLInputElement;
    again.dispatchEvent(new Event("change"));
    await new Promise((resolve) => setTimeout(resolve, 0));
    const cleared = mock.requests.find((r) => r.url.startsWith("/services"));
    expect(cleared!.url).toBe("/services");
  });
});

describe("matchmaker wizard", () => {
  it("renders rankings in the exact order of the API golden", async () => {
    const { app, root } = await bootApp();
    await app.setState({
      ...app.state,
      view: "wizard",
      draft: {
        hard: [
          {
            op: "equals_one_of",
            property: "company_jurisdiction",
            values: ["de", "eu"],
          },
        ],
        soft: [
          {
            weight: 2,
            goal: {
              kind: "tendency",
              property: "monthly_price",
              direction: "negative",
            },
          },
        ],
      },
    });
    await app.submitMatch();

    const rows = [...root.querySelectorAll(".result-row")].map((row) => [
      (row as HTMLElement).dataset.serviceId,
      (row as HTMLElement).dataset.variantId,
    ]);
    const goldenOrder = MATCH_GOLDEN.ranked.map(
      (entry: { service_id: string; variant_id: string }) => [
        entry.service_id,
        entry.variant_id,
      ],
    );
    expect(rows).toEqual(goldenOrder);
    expect(root.textContent).toContain(
      `${MATCH_GOLDEN.excluded_count} excluded`,
    );
  });

  it("sends the draft as the exact request JSON", async () => {
    const { app, mock } = await bootApp();
    await app.setState({
      ...app.state,
      view: "wizard",
      draft: {
        hard: [],
        soft: [
          {
            weight: 1,
            goal: {
              kind: "cover_features",
              property: "certifications",
              features: ["iso27001", "c5"],
            },
          },
        ],
      },
    });
    await app.submitMatch();
    const post = mock.requests.find((r) => r.url === "/match");
    expect(post).toBeDefined();
    expect(JSON.parse(post!.body!)).toEqual({
      hard: [],
      soft: [
        {
          weight: 1,
          goal: {
            kind: "cover_features",
            property: "certifications",
            features: ["iso27001", "c5"],
          },
        },
      ],
    });
  });

  it("keeps the submit button disabled while the draft is invalid", async () => {
    const { app, root } = await bootApp();
    await app.setState({
      ...app.state,
      view: "wizard",
      draft: {
        hard: [],
        soft: [
          {
            weight: 0,
            goal: {
              kind: "tendency",
              property: "monthly_price",
              direction: "negative",
            },
          },
        ],
      },
    });
    const submit = root.querySelector(".submit-match") as HTMLButtonElement;
    expect(submit.disabled).toBe(true);
    expect(root.querySelector(".wizard-errors")!.textContent).toContain(
      "weight must be greater than zero",
    );
  });
});

describe("price calculator", () => {
  it("displays the 13.50 EUR fixture quote", async () => {
    const { app, root, mock } = await bootApp();
    await app.setState({
      ...app.state,
      view: "quote",
      service: "boxcloud",
      variant: "free/de",
      usage: { horizon_months: 1, metrics: { extra_storage: 150 } },
    });

    const quotePost = mock.requests.find((r) => r.url.endsWith("/quote"));
    expect(quotePost).toBeDefined();
    expect(quotePost!.url).toBe(
      "/services/boxcloud/variants/free/de/quote",
    );
    expect(JSON.parse(quotePost!.body!)).toEqual({
      horizon_months: 1,
      metrics: { extra_storage: 150 },
    });
    expect(root.querySelector(".quote-total")!.textContent).toBe(
      "Total: 13.50 EUR",
    );
    expect(root.querySelectorAll(".line-item")).toHaveLength(1);
  });

  it("re-quotes when the usage form changes", async () => {
    const { app, root, mock } = await bootApp();
    await app.setState({
      ...app.state,
      view: "quote",
      service: "boxcloud",
      variant: "free/de",
    });
    mock.requests.length = 0;
    const input = root.querySelector(
      'input[data-metric="extra_storage"]',
    ) as HTMLInputElement;
    input.value = "150";
    input.dispatchEvent(new Event("change"));
    await new Promise((resolve) => setTimeout(resolve, 0));
    const quotePost = mock.requests.find((r) => r.url.endsWith("/quote"));
    expect(JSON.parse(quotePost!.body!).metrics.extra_storage).toBe(150);
  });

  it("rejects negative usage client-side without querying", async () => {
    const { app, root, mock } = await bootApp();
    await app.setState({
      ...app.state,
      view: "quote",
      service: "boxcloud",
      variant: "free/de",
    });
    mock.requests.length = 0;
    const input = root.querySelector(
      'input[data-metric="extra_storage"]',
    ) as HTMLInputElement;
    input.value = "-5";
    input.dispatchEvent(new Event("change"));
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(mock.requests.filter((r) => r.url.endsWith("/quote"))).toHaveLength(0);
    expect(input.value).toBe("0"); // reset to the last accepted value
  });
});

describe("resilience", () => {
  it("stale responses lose to newer generations (latest wins)", async () => {
    const mock = new MockApi();
    const stalled: (() => void)[] = [];
    let callCount = 0;
    const gated: FetchLike = async (url, init) => {
      callCount += 1;
      if (callCount <= 2) {
        // the first view's two catalog requests stall until released
        await new Promise<void>((resolve) => {
          stalled.push(resolve);
        });
      }
      return mock.fetchFn(url, init);
    };
    const root = document.createElement("div");
    const app = new App(root, new ApiClient("", gated), fakeHistory());
    const first = app.start(); // stalls
    await app.setState({ ...app.state, view: "wizard" }); // completes first
    expect(root.querySelector(".wizard-view")).not.toBeNull();

    for (const release of stalled) release();
    await first;
    // the stale catalog render must not replace the wizard
    expect(root.querySelector(".wizard-view")).not.toBeNull();
    expect(root.querySelector(".catalog-view")).toBeNull();
  });

  it("shows an error banner on API failure and preserves state", async () => {
    const failing: FetchLike = async () => {
      throw new Error("backend unreachable");
    };
    const root = document.createElement("div");
    const app = new App(root, new ApiClient("", failing), fakeHistory());
    const before = { ...INITIAL_STATE, filters: { support_level: ["business"] } };
    app.state = before;
    await app.refresh();
    expect(root.querySelector(".error-banner")!.textContent).toContain(
      "backend unreachable",
    );
    expect(app.state).toEqual(before); // state untouched by the failure
  });
});
