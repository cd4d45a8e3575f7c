/** Form state: answer defaults, section gating, and localStorage persistence.
 *
 * Answers are kept for every question, including those in disabled sections;
 * the service ignores gated-off items, so the client never has to prune.
 */

import type { AnswerMap, AnswerValue, Lang, QuestionDoc, SchemaDoc, SectionDoc } from "./types.js";

export type StorageLike = Pick<Storage, "getItem" | "setItem" | "removeItem">;

export const UNKNOWN = "unknown";
export const TRI_STATES = ["yes", "no", UNKNOWN] as const;

export function defaultAnswer(question: QuestionDoc): AnswerValue {
  switch (question.widget) {
    case "checkbox":
      return false;
    case "tri-state":
      return UNKNOWN;
    case "dropdown":
      return question.options![0]!.id;
    case "slider":
      return question.bounds!.lo;
  }
}

export function allQuestions(schema: SchemaDoc): QuestionDoc[] {
  return schema.sections.flatMap((section) => section.questions);
}

export function questionById(schema: SchemaDoc, questionId: string): QuestionDoc | undefined {
  return allQuestions(schema).find((q) => q.id === questionId);
}

export function defaultAnswers(schema: SchemaDoc): AnswerMap {
  const answers: AnswerMap = {};
  for (const question of allQuestions(schema)) {
    answers[question.id] = defaultAnswer(question);
  }
  return answers;
}

export function sectionEnabled(section: SectionDoc, answers: AnswerMap): boolean {
  if (!section.enabled_when) return true;
  return answers[section.enabled_when.question] === section.enabled_when.equals;
}

/** True iff `value` lies in the question's answer domain. */
export function valueValid(question: QuestionDoc, value: AnswerValue): boolean {
  switch (question.widget) {
    case "checkbox":
      return typeof value === "boolean";
    case "tri-state":
      return typeof value === "string" && (TRI_STATES as readonly string[]).includes(value);
    case "dropdown":
      return typeof value === "string" && question.options!.some((o) => o.id === value);
    case "slider":
      return (
        typeof value === "number" &&
        Number.isFinite(value) &&
        value >= question.bounds!.lo &&
        value <= question.bounds!.hi
      );
  }
}

// ----------------------------------------------------------- persistence

const answersKey = (schema: SchemaDoc) => `epirisk:answers:${schema.id}:v${schema.version}`;
const LANG_KEY = "epirisk:lang";
const SCHEMA_KEY = "epirisk:schema";

export function saveAnswers(storage: StorageLike, schema: SchemaDoc, answers: AnswerMap): void {
  storage.setItem(answersKey(schema), JSON.stringify(answers));
}

/** Defaults overlaid with whatever saved entries still validate against the
 * schema, so a refresh restores the form and a schema change never crashes. */
export function restoreAnswers(storage: StorageLike, schema: SchemaDoc): AnswerMap {
  const answers = defaultAnswers(schema);
  const raw = storage.getItem(answersKey(schema));
  if (!raw) return answers;
  let saved: unknown;
  try {
    saved = JSON.parse(raw);
  } catch {
    return answers;
  }
  if (typeof saved !== "object" || saved === null) return answers;
  for (const [questionId, value] of Object.entries(saved as Record<string, AnswerValue>)) {
    const question = questionById(schema, questionId);
    if (question && valueValid(question, value)) {
      answers[questionId] = value;
    }
  }
  return answers;
}

export function saveLang(storage: StorageLike, lang: Lang): void {
  storage.setItem(LANG_KEY, lang);
}

export function restoreLang(storage: StorageLike): Lang | null {
  const saved = storage.getItem(LANG_KEY);
  return saved === "pl" || saved === "en" ? saved : null;
}

export function saveSchemaChoice(storage: StorageLike, schemaId: string): void {
  storage.setItem(SCHEMA_KEY, schemaId);
}

export function restoreSchemaChoice(storage: StorageLike): string | null {
  return storage.getItem(SCHEMA_KEY);
}
