// Match-request drafting: typed constraint rows that serialize to the exact
// wire schema the repository accepts. Validation mirrors the server rules
// so a draft never leaves the client in a shape the API would reject.

import type { VocabularyDefinition } from "./api.js";

export type HardDraft =
  | { op: "equals_one_of"; property: string; values: string[] }
  | { op: "in_range"; property: string; min: number | null; max: number | null }
  | { op: "has_all_features"; property: string; features: string[] };

export type SoftGoalDraft =
  | { kind: "prefer_values"; property: string; values: string[] }
  | { kind: "tendency"; property: string; direction: "positive" | "negative" }
  | { kind: "cover_features"; property: string; features: string[] };

export interface SoftDraft {
  weight: number;
  goal: SoftGoalDraft;
}

export interface WizardDraft {
  vocabulary?: string;
  hard: HardDraft[];
  soft: SoftDraft[];
}

export const EMPTY_DRAFT: WizardDraft = { hard: [], soft: [] };

const NUMERIC_PREFIXES = ["integer", "decimal", "money", "quantity"];

export function typeKind(typeString: string): string {
  const base = typeString.split(/[<(]/, 1)[0] ?? typeString;
  return base.trim();
}

export function isNumericType(typeString: string): boolean {
  return NUMERIC_PREFIXES.includes(typeKind(typeString));
}

export function enumMembers(typeString: string): string[] {
  const match = /^enum\((.*)\)$/.exec(typeString.trim());
  if (!match || !match[1]) return [];
  return match[1].split(",").map((member) => member.trim());
}

export function featureSetName(typeString: string): string | null {
  const match = /^features\((.*)\)$/.exec(typeString.trim());
  return match && match[1] ? match[1].trim() : null;
}

export function featuresOf(
  vocabulary: VocabularyDefinition,
  propertyName: string,
): string[] {
  const property = vocabulary.properties.find((p) => p.name === propertyName);
  if (!property) return [];
  const setName = featureSetName(property.type);
  if (!setName) return [];
  return vocabulary.feature_sets[setName] ?? [];
}

/** Client-side mirror of the server's request validation. */
export function validateDraft(
  draft: WizardDraft,
  vocabulary: VocabularyDefinition,
): string[] {
  const errors: string[] = [];
  const types = new Map(
    vocabulary.properties.map((p) => [p.name, p.type] as const),
  );
  const tendencySeen = new Set<string>();

  draft.hard.forEach((constraint, index) => {
    const path = `hard[${index}]`;
    const type = types.get(constraint.property);
    if (type === undefined) {
      errors.push(`${path}: unknown property '${constraint.property}'`);
      return;
    }
    if (constraint.op === "equals_one_of" && constraint.values.length === 0) {
      errors.push(`${path}: pick at least one value`);
    }
    if (constraint.op === "in_range") {
      if (constraint.min === null && constraint.max === null) {
        errors.push(`${path}: set a lower or upper bound`);
      }
      if (
        constraint.min !== null &&
        constraint.max !== null &&
        constraint.min > constraint.max
      ) {
        errors.push(`${path}: lower bound exceeds upper bound`);
      }
      if (!isNumericType(type)) {
        errors.push(`${path}: ranges need a numeric property`);
      }
    }
    if (constraint.op === "has_all_features") {
      if (constraint.features.length === 0) {
        errors.push(`${path}: pick at least one feature`);
      }
      if (typeKind(type) !== "features") {
        errors.push(`${path}: '${constraint.property}' has no feature list`);
      }
    }
  });

  draft.soft.forEach((constraint, index) => {
    const path = `soft[${index}]`;
    if (!(constraint.weight > 0)) {
      errors.push(`${path}: weight must be greater than zero`);
    }
    const type = types.get(constraint.goal.property);
    if (type === undefined) {
      errors.push(`${path}: unknown property '${constraint.goal.property}'`);
      return;
    }
    const goal = constraint.goal;
    if (goal.kind === "prefer_values" && goal.values.length === 0) {
      errors.push(`${path}: pick at least one preferred value`);
    }
    if (goal.kind === "tendency") {
      if (tendencySeen.has(goal.property)) {
        errors.push(`${path}: only one tendency per property`);
      }
      tendencySeen.add(goal.property);
      if (!isNumericType(type)) {
        errors.push(`${path}: tendencies need a numeric property`);
      }
    }
    if (goal.kind === "cover_features") {
      if (goal.features.length === 0) {
        errors.push(`${path}: pick at least one feature`);
      }
      if (typeKind(type) !== "features") {
        errors.push(`${path}: '${goal.property}' has no feature list`);
      }
    }
  });

  return errors;
}

/** The exact POST /match body; field names are the wire contract. */
export function buildRequest(draft: WizardDraft): Record<string, unknown> {
  const hard = draft.hard.map((constraint) => {
    if (constraint.op === "equals_one_of") {
      return {
        op: "equals_one_of",
        property: constraint.property,
        values: constraint.values,
      };
    }
    if (constraint.op === "in_range") {
      const body: Record<string, unknown> = {
        op: "in_range",
        property: constraint.property,
      };
      if (constraint.min !== null) body.min = constraint.min;
      if (constraint.max !== null) body.max = constraint.max;
      return body;
    }
    return {
      op: "has_all_features",
      property: constraint.property,
      features: constraint.features,
    };
  });
  const soft = draft.soft.map((constraint) => ({
    weight: constraint.weight,
    goal: { ...constraint.goal },
  }));
  const request: Record<string, unknown> = { hard, soft };
  if (draft.vocabulary) {
    request.vocabulary = draft.vocabulary;
  }
  return request;
}
