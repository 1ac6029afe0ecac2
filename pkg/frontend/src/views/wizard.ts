// Selection wizard: typed controls assemble a match request; submission
// renders the ranking with a per-constraint score breakdown. Editing a
// constraint and resubmitting updates the ranking.

import type { MatchResponse, VocabularyDefinition } from "../api.js";
import { el, formatScore, labelize } from "../format.js";
import {
  enumMembers,
  featuresOf,
  isNumericType,
  typeKind,
  type HardDraft,
  type SoftDraft,
  type WizardDraft,
} from "../wizard.js";

export interface WizardHandlers {
  onDraftChange(draft: WizardDraft): void;
  onSubmit(): void;
}

function describeHard(constraint: HardDraft): string {
  if (constraint.op === "equals_one_of") {
    return `${labelize(constraint.property)} is one of ${constraint.values.join(", ")}`;
  }
  if (constraint.op === "in_range") {
    const bounds = [
      constraint.min !== null ? `>= ${constraint.min}` : null,
      constraint.max !== null ? `<= ${constraint.max}` : null,
    ].filter(Boolean);
    return `${labelize(constraint.property)} ${bounds.join(" and ")}`;
  }
  return `${labelize(constraint.property)} offers all of ${constraint.features.join(", ")}`;
}

function describeSoft(constraint: SoftDraft): string {
  const goal = constraint.goal;
  const weight = `weight ${constraint.weight}`;
  if (goal.kind === "prefer_values") {
    return `prefer ${labelize(goal.property)} in ${goal.values.join(", ")} (${weight})`;
  }
  if (goal.kind === "tendency") {
    const direction = goal.direction === "negative" ? "lower" : "higher";
    return `${direction} ${labelize(goal.property)} is better (${weight})`;
  }
  return `cover ${goal.features.join(", ")} of ${labelize(goal.property)} (${weight})`;
}

function constraintList(
  draft: WizardDraft,
  handlers: WizardHandlers,
): HTMLElement {
  const list = el("ul", "constraint-list");
  draft.hard.forEach((constraint, index) => {
    const item = el("li", "constraint hard");
    item.append(el("span", "constraint-text", describeHard(constraint)));
    const remove = el("button", "remove", "remove");
    remove.addEventListener("click", () =>
      handlers.onDraftChange({
        ...draft,
        hard: draft.hard.filter((_, i) => i !== index),
      }),
    );
    item.append(remove);
    list.append(item);
  });
  draft.soft.forEach((constraint, index) => {
    const item = el("li", "constraint soft");
    item.append(el("span", "constraint-text", describeSoft(constraint)));
    const remove = el("button", "remove", "remove");
    remove.addEventListener("click", () =>
      handlers.onDraftChange({
        ...draft,
        soft: draft.soft.filter((_, i) => i !== index),
      }),
    );
    item.append(remove);
    list.append(item);
  });
  return list;
}

function addConstraintForm(
  draft: WizardDraft,
  vocabulary: VocabularyDefinition,
  handlers: WizardHandlers,
): HTMLElement {
  const form = el("div", "add-constraint");
  const propertySelect = el("select", "property-select") as HTMLSelectElement;
  for (const property of vocabulary.properties) {
    const option = el("option", undefined, labelize(property.name)) as HTMLOptionElement;
    option.value = property.name;
    propertySelect.append(option);
  }
  form.append(propertySelect);

  const kindSelect = el("select", "kind-select") as HTMLSelectElement;
  form.append(kindSelect);

  const valueHost = el("span", "value-host");
  form.append(valueHost);

  const weightInput = el("input", "weight-input") as HTMLInputElement;
  weightInput.type = "number";
  weightInput.min = "0.1";
  weightInput.step = "any";
  weightInput.value = "1";
  weightInput.title = "weight";

  const rebuildKinds = () => {
    const propertyName = propertySelect.value;
    const property = vocabulary.properties.find((p) => p.name === propertyName);
    kindSelect.replaceChildren();
    const kinds: string[] = [];
    if (!property) return;
    const kind = typeKind(property.type);
    if (kind === "features") {
      kinds.push("has_all_features", "cover_features");
    } else {
      kinds.push("equals_one_of", "prefer_values");
    }
    if (isNumericType(property.type)) {
      kinds.push("in_range", "tendency");
    }
    for (const value of kinds) {
      const option = el("option", undefined, value.replaceAll("_", " ")) as HTMLOptionElement;
      option.value = value;
      kindSelect.append(option);
    }
    rebuildValueHost();
  };

  const rebuildValueHost = () => {
    const propertyName = propertySelect.value;
    const property = vocabulary.properties.find((p) => p.name === propertyName);
    valueHost.replaceChildren();
    if (!property) return;
    const constraintKind = kindSelect.value;
    if (constraintKind === "in_range") {
      const min = el("input") as HTMLInputElement;
      min.type = "number";
      min.placeholder = "min";
      min.className = "range-min";
      const max = el("input") as HTMLInputElement;
      max.type = "number";
      max.placeholder = "max";
      max.className = "range-max";
      valueHost.append(min, max);
    } else if (constraintKind === "tendency") {
      const direction = el("select", "direction-select") as HTMLSelectElement;
      for (const value of ["negative", "positive"]) {
        const option = el(
          "option",
          undefined,
          value === "negative" ? "lower is better" : "higher is better",
        ) as HTMLOptionElement;
        option.value = value;
        direction.append(option);
      }
      valueHost.append(direction);
    } else if (
      constraintKind === "has_all_features" ||
      constraintKind === "cover_features"
    ) {
      for (const feature of featuresOf(vocabulary, property.name)) {
        const label = el("label", "feature-choice");
        const checkbox = el("input") as HTMLInputElement;
        checkbox.type = "checkbox";
        checkbox.value = feature;
        label.append(checkbox, el("span", undefined, feature));
        valueHost.append(label);
      }
    } else {
      const members = enumMembers(property.type);
      if (members.length > 0) {
        for (const member of members) {
          const label = el("label", "member-choice");
          const checkbox = el("input") as HTMLInputElement;
          checkbox.type = "checkbox";
          checkbox.value = member;
          label.append(checkbox, el("span", undefined, member));
          valueHost.append(label);
        }
      } else {
        const free = el("input", "free-value") as HTMLInputElement;
        free.type = "text";
        free.placeholder = "value";
        valueHost.append(free);
      }
    }
    const wantsWeight =
      kindSelect.value === "prefer_values" ||
      kindSelect.value === "tendency" ||
      kindSelect.value === "cover_features";
    weightInput.remove();
    if (wantsWeight) valueHost.append(weightInput);
  };

  propertySelect.addEventListener("change", rebuildKinds);
  kindSelect.addEventListener("change", rebuildValueHost);
  rebuildKinds();

  const add = el("button", "add-button", "Add constraint");
  add.addEventListener("click", () => {
    const propertyName = propertySelect.value;
    const constraintKind = kindSelect.value;
    const checked = [...valueHost.querySelectorAll("input:checked")].map(
      (node) => (node as HTMLInputElement).value,
    );
    const weight = Number(weightInput.value);
    if (
      ["prefer_values", "tendency", "cover_features"].includes(
        constraintKind,
      ) &&
      !(weight > 0)
    ) {
      return; // weight slider at or below zero is blocked client-side
    }
    let nextDraft = draft;
    if (constraintKind === "equals_one_of") {
      const free = valueHost.querySelector(".free-value") as
        | HTMLInputElement
        | null;
      const values = free && free.value ? [free.value] : checked;
      if (values.length === 0) return;
      nextDraft = {
        ...draft,
        hard: [...draft.hard, { op: "equals_one_of", property: propertyName, values }],
      };
    } else if (constraintKind === "in_range") {
      const min = valueHost.querySelector(".range-min") as HTMLInputElement;
      const max = valueHost.querySelector(".range-max") as HTMLInputElement;
      const lower = min.value === "" ? null : Number(min.value);
      const upper = max.value === "" ? null : Number(max.value);
      if (lower === null && upper === null) return;
      nextDraft = {
        ...draft,
        hard: [
          ...draft.hard,
          { op: "in_range", property: propertyName, min: lower, max: upper },
        ],
      };
    } else if (constraintKind === "has_all_features") {
      if (checked.length === 0) return;
      nextDraft = {
        ...draft,
        hard: [
          ...draft.hard,
          { op: "has_all_features", property: propertyName, features: checked },
        ],
      };
    } else if (constraintKind === "prefer_values") {
      const free = valueHost.querySelector(".free-value") as
        | HTMLInputElement
        | null;
      const values = free && free.value ? [free.value] : checked;
      if (values.length === 0) return;
      nextDraft = {
        ...draft,
        soft: [
          ...draft.soft,
          { weight, goal: { kind: "prefer_values", property: propertyName, values } },
        ],
      };
    } else if (constraintKind === "tendency") {
      const direction = (
        valueHost.querySelector(".direction-select") as HTMLSelectElement
      ).value as "positive" | "negative";
      nextDraft = {
        ...draft,
        soft: [
          ...draft.soft,
          { weight, goal: { kind: "tendency", property: propertyName, direction } },
        ],
      };
    } else if (constraintKind === "cover_features") {
      if (checked.length === 0) return;
      nextDraft = {
        ...draft,
        soft: [
          ...draft.soft,
          {
            weight,
            goal: { kind: "cover_features", property: propertyName, features: checked },
          },
        ],
      };
    }
    handlers.onDraftChange(nextDraft);
  });
  form.append(add);
  return form;
}

export function renderWizard(
  draft: WizardDraft,
  vocabulary: VocabularyDefinition,
  errors: string[],
  handlers: WizardHandlers,
): HTMLElement {
  const view = el("div", "wizard-view");
  view.append(el("h2", undefined, "Find matching services"));
  view.append(constraintList(draft, handlers));
  view.append(addConstraintForm(draft, vocabulary, handlers));
  if (errors.length > 0) {
    const list = el("ul", "wizard-errors");
    for (const message of errors) list.append(el("li", undefined, message));
    view.append(list);
  }
  const submit = el("button", "submit-match", "Rank services") as HTMLButtonElement;
  submit.disabled = errors.length > 0;
  submit.addEventListener("click", () => handlers.onSubmit());
  view.append(submit);
  return view;
}

export function renderResults(
  response: MatchResponse,
  softLabels: string[],
): HTMLElement {
  const view = el("div", "results-view");
  view.append(
    el(
      "p",
      "results-meta",
      `${response.ranked.length} variants ranked, ` +
        `${response.excluded_count} excluded by hard constraints`,
    ),
  );
  const table = el("table", "results-table");
  const header = el("tr");
  ["#", "service", "variant", "score", ...softLabels].forEach((text) =>
    header.append(el("th", undefined, text)),
  );
  table.append(header);
  response.ranked.forEach((entry, index) => {
    const row = el("tr", "result-row");
    row.dataset.serviceId = entry.service_id;
    row.dataset.variantId = entry.variant_id;
    row.append(el("td", "rank", String(index + 1)));
    row.append(el("td", "service", entry.service_id));
    row.append(el("td", "variant", entry.variant_id || "(base)"));
    row.append(el("td", "score", formatScore(entry.score)));
    for (const score of entry.constraint_scores) {
      row.append(el("td", "constraint-score", formatScore(score)));
    }
    table.append(row);
  });
  view.append(table);
  return view;
}
