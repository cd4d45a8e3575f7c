/** Renders a questionnaire schema as sectioned groups of controls and keeps
 * gated sections in sync with the answers that enable them.
 */

import { label } from "./i18n.js";
import { sectionEnabled } from "./state.js";
import type { AnswerListener } from "./widgets.js";
import { createQuestionControl, syncControl } from "./widgets.js";
import type { AnswerMap, Lang, SchemaDoc } from "./types.js";

export function renderForm(
  schema: SchemaDoc,
  answers: AnswerMap,
  lang: Lang,
  onChange: AnswerListener,
): HTMLFormElement {
  const form = document.createElement("form");
  form.className = "questionnaire";
  form.addEventListener("submit", (event) => event.preventDefault());
  for (const section of schema.sections) {
    const fieldset = document.createElement("fieldset");
    fieldset.className = "section";
    fieldset.dataset.sectionId = section.id;
    const legend = document.createElement("legend");
    legend.textContent = label(section.title, lang);
    const grid = document.createElement("div");
    grid.className = "question-grid";
    for (const question of section.questions) {
      grid.append(createQuestionControl(question, answers[question.id]!, lang, onChange));
    }
    fieldset.append(legend, grid);
    fieldset.hidden = !sectionEnabled(section, answers);
    form.append(fieldset);
  }
  return form;
}

/** Show or hide gated sections after an answer change. */
export function updateGating(form: HTMLElement, schema: SchemaDoc, answers: AnswerMap): void {
  for (const section of schema.sections) {
    if (!section.enabled_when) continue;
    const fieldset = form.querySelector<HTMLFieldSetElement>(
      `[data-section-id="${section.id}"]`,
    );
    if (fieldset) fieldset.hidden = !sectionEnabled(section, answers);
  }
}

/** Push programmatic answer values (restore, what-if apply) into the form. */
export function syncAnswers(form: HTMLElement, schema: SchemaDoc, answers: AnswerMap): void {
  for (const section of schema.sections) {
    for (const question of section.questions) {
      syncControl(form, question, answers[question.id]!);
    }
  }
  updateGating(form, schema, answers);
}
