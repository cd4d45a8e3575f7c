/** One DOM control per question widget type. All controls are native form
 * elements, so keyboard operation and focus handling come for free.
 */

import { label, t } from "./i18n.js";
import { UNKNOWN } from "./state.js";
import type { AnswerValue, Lang, QuestionDoc } from "./types.js";

export type AnswerListener = (questionId: string, value: AnswerValue) => void;

const TRI_ORDER = ["yes", "no", UNKNOWN] as const;

function triStateText(state: (typeof TRI_ORDER)[number], lang: Lang): string {
  if (state === "yes") return t("yes", lang);
  if (state === "no") return t("no", lang);
  return t("doNotKnow", lang);
}

function sliderStep(lo: number, hi: number): number {
  const span = hi - lo;
  if (Number.isInteger(lo) && Number.isInteger(hi) && span >= 1) return 1;
  return span / 100;
}

export function createQuestionControl(
  question: QuestionDoc,
  value: AnswerValue,
  lang: Lang,
  onChange: AnswerListener,
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = `question question-${question.widget}`;
  wrap.dataset.questionId = question.id;

  switch (question.widget) {
    case "checkbox": {
      const holder = document.createElement("label");
      holder.className = "checkbox-row";
      const input = document.createElement("input");
      input.type = "checkbox";
      input.id = `q-${question.id}`;
      input.checked = value === true;
      input.addEventListener("change", () => onChange(question.id, input.checked));
      const text = document.createElement("span");
      text.textContent = label(question.label, lang);
      holder.append(input, text);
      wrap.append(holder);
      break;
    }
    case "dropdown": {
      const labelEl = document.createElement("label");
      labelEl.htmlFor = `q-${question.id}`;
      labelEl.textContent = label(question.label, lang);
      const select = document.createElement("select");
      select.id = `q-${question.id}`;
      for (const option of question.options!) {
        const optionEl = document.createElement("option");
        optionEl.value = option.id;
        optionEl.textContent = label(option.label, lang);
        optionEl.selected = option.id === value;
        select.append(optionEl);
      }
      select.addEventListener("change", () => onChange(question.id, select.value));
      wrap.append(labelEl, select);
      break;
    }
    case "slider": {
      const { lo, hi } = question.bounds!;
      const labelEl = document.createElement("label");
      labelEl.htmlFor = `q-${question.id}`;
      labelEl.textContent = label(question.label, lang);
      const input = document.createElement("input");
      input.type = "range";
      input.id = `q-${question.id}`;
      input.min = String(lo);
      input.max = String(hi);
      input.step = String(sliderStep(lo, hi));
      input.value = String(value);
      const echo = document.createElement("output");
      echo.htmlFor.add(input.id);
      echo.textContent = String(value);
      input.addEventListener("input", () => {
        echo.textContent = input.value;
        onChange(question.id, Number(input.value));
      });
      wrap.append(labelEl, input, echo);
      break;
    }
    case "tri-state": {
      const group = document.createElement("fieldset");
      group.className = "tri-state-group";
      const legend = document.createElement("legend");
      legend.textContent = label(question.label, lang);
      group.append(legend);
      for (const state of TRI_ORDER) {
        const holder = document.createElement("label");
        holder.className = "tri-state-choice";
        const input = document.createElement("input");
        input.type = "radio";
        input.name = `q-${question.id}`;
        input.value = state;
        input.checked = state === value;
        input.addEventListener("change", () => {
          if (input.checked) onChange(question.id, state);
        });
        const text = document.createElement("span");
        text.textContent = triStateText(state, lang);
        holder.append(input, text);
        group.append(holder);
      }
      wrap.append(group);
      break;
    }
  }
  return wrap;
}

/** Push a programmatic answer change (what-if apply, restore) into the DOM. */
export function syncControl(container: HTMLElement, question: QuestionDoc, value: AnswerValue): void {
  const wrap = container.querySelector<HTMLElement>(`[data-question-id="${question.id}"]`);
  if (!wrap) return;
  switch (question.widget) {
    case "checkbox": {
      const input = wrap.querySelector<HTMLInputElement>("input[type=checkbox]");
      if (input) input.checked = value === true;
      break;
    }
    case "dropdown": {
      const select = wrap.querySelector<HTMLSelectElement>("select");
      if (select) select.value = String(value);
      break;
    }
    case "slider": {
      const input = wrap.querySelector<HTMLInputElement>("input[type=range]");
      const echo = wrap.querySelector<HTMLOutputElement>("output");
      if (input) input.value = String(value);
      if (echo) echo.textContent = String(value);
      break;
    }
    case "tri-state": {
      for (const radio of wrap.querySelectorAll<HTMLInputElement>("input[type=radio]")) {
        radio.checked = radio.value === value;
      }
      break;
    }
  }
}
