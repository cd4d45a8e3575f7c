/** What-if factor panel: modifiable items with their signed deltas, in the
 * server's order. Focus or hover previews `probability + delta` (the additive
 * preview contract); activating a row asks the controller to commit the
 * protective value into the form.
 */

import { formatSignedPercent } from "./format.js";
import { label, t } from "./i18n.js";
import { questionById } from "./state.js";
import type { Assessment, Lang, SchemaDoc } from "./types.js";

export interface WhatIfHooks {
  /** Hypothetical probability to preview, or null to clear the preview. */
  onPreview(probability: number | null): void;
  onApply(questionId: string): void;
}

export function renderWhatIf(
  assessment: Assessment,
  schema: SchemaDoc,
  lang: Lang,
  hooks: WhatIfHooks,
): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "what-if";
  const heading = document.createElement("h2");
  heading.textContent = t("whatIfHeading", lang);
  panel.append(heading);

  const list = document.createElement("ol");
  list.className = "what-if-list";
  for (const [questionId, delta] of assessment.factor_deltas) {
    const question = questionById(schema, questionId);
    if (!question) continue;
    const item = document.createElement("li");
    const row = document.createElement("button");
    row.type = "button";
    row.className = "what-if-row";
    row.dataset.questionId = questionId;
    row.dataset.delta = String(delta);
    row.dataset.preview = String(assessment.probability + delta);
    row.textContent = `${formatSignedPercent(delta)} ${t("ifChanged", lang)} ${label(question.label, lang)}`;
    const preview = () => hooks.onPreview(assessment.probability + delta);
    const clear = () => hooks.onPreview(null);
    row.addEventListener("mouseenter", preview);
    row.addEventListener("focus", preview);
    row.addEventListener("mouseleave", clear);
    row.addEventListener("blur", clear);
    row.addEventListener("click", () => hooks.onApply(questionId));
    item.append(row);
    list.append(item);
  }
  panel.append(list);
  return panel;
}
