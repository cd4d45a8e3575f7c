/** Guess-the-risk game screens. While the game is active the controller
 * suppresses live assessment entirely, so nothing risk-shaped reaches the
 * client until the reveal document arrives.
 */

import { clamp, formatPercent } from "./format.js";
import { BAND_IDS, bandName, t } from "./i18n.js";
import type { GameDoc, GuessBody, Lang } from "./types.js";

export function renderGameBanner(lang: Lang, onLock: () => void): HTMLElement {
  const banner = document.createElement("section");
  banner.className = "game-banner";
  const intro = document.createElement("p");
  intro.textContent = t("gameIntro", lang);
  const lock = document.createElement("button");
  lock.type = "button";
  lock.className = "lock-answers";
  lock.textContent = t("lockAnswers", lang);
  lock.addEventListener("click", onLock);
  banner.append(intro, lock);
  return banner;
}

export function renderGuessPanel(lang: Lang, onSubmit: (guess: GuessBody) => void): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "guess-panel";
  const heading = document.createElement("h2");
  heading.textContent = t("guessHeading", lang);
  panel.append(heading);

  const form = document.createElement("form");

  // guess style: a percentage slider or a band pick, exactly one applies
  const modes = document.createElement("div");
  modes.className = "guess-modes";
  const modeInputs: Record<string, HTMLInputElement> = {};
  for (const mode of ["percent", "band"] as const) {
    const holder = document.createElement("label");
    const radio = document.createElement("input");
    radio.type = "radio";
    radio.name = "guess-mode";
    radio.value = mode;
    radio.checked = mode === "percent";
    const text = document.createElement("span");
    text.textContent = mode === "percent" ? t("guessByPercent", lang) : t("guessByBand", lang);
    holder.append(radio, text);
    modes.append(holder);
    modeInputs[mode] = radio;
  }

  const percentRow = document.createElement("div");
  percentRow.className = "guess-percent";
  const slider = document.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = "100";
  slider.step = "0.1";
  slider.value = "1";
  slider.id = "guess-percent";
  const echo = document.createElement("output");
  echo.htmlFor.add(slider.id);
  echo.textContent = formatPercent(Number(slider.value) / 100);
  slider.addEventListener("input", () => {
    // the range input clamps on its own; re-clamp for programmatic writes
    const value = clamp(Number(slider.value), 0, 100);
    slider.value = String(value);
    echo.textContent = formatPercent(value / 100);
  });
  percentRow.append(slider, echo);

  const bandRow = document.createElement("div");
  bandRow.className = "guess-band";
  bandRow.hidden = true;
  const bandSelect = document.createElement("select");
  for (const band of BAND_IDS) {
    const option = document.createElement("option");
    option.value = band;
    option.textContent = bandName(band, lang);
    bandSelect.append(option);
  }
  bandRow.append(bandSelect);

  const syncRows = () => {
    const percentMode = modeInputs["percent"]!.checked;
    percentRow.hidden = !percentMode;
    bandRow.hidden = percentMode;
  };
  for (const radio of Object.values(modeInputs)) {
    radio.addEventListener("change", syncRows);
  }

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.className = "submit-guess";
  submit.textContent = t("submitGuess", lang);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (modeInputs["percent"]!.checked) {
      const probability = clamp(Number(slider.value), 0, 100) / 100;
      onSubmit({ probability });
    } else {
      onSubmit({ band: bandSelect.value });
    }
  });

  form.append(modes, percentRow, bandRow, submit);
  panel.append(form);
  return panel;
}

export function renderReveal(doc: GameDoc, lang: Lang, onBack: () => void): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "reveal-panel";
  const actual = doc.actual!;

  const actualRow = document.createElement("p");
  actualRow.className = "reveal-actual";
  const actualLabel = document.createElement("span");
  actualLabel.textContent = `${t("actualRisk", lang)}: `;
  const actualValue = document.createElement("strong");
  actualValue.className = `risk-value band-${actual.band}`;
  actualValue.textContent = actual.display;
  const actualBand = document.createElement("span");
  actualBand.textContent = ` (${bandName(actual.band, lang)})`;
  actualRow.append(actualLabel, actualValue, actualBand);

  const guessRow = document.createElement("p");
  guessRow.className = "reveal-guess";
  const guess = doc.guess!;
  const guessText =
    guess.probability !== null && guess.probability !== undefined
      ? formatPercent(guess.probability)
      : bandName(guess.band ?? "", lang);
  guessRow.textContent = `${t("yourGuess", lang)}: ${guessText}`;

  const errorRow = document.createElement("p");
  errorRow.className = "reveal-error";
  if (doc.absolute_error !== null && doc.absolute_error !== undefined) {
    errorRow.textContent = `${t("absoluteError", lang)}: ${formatPercent(doc.absolute_error)}`;
  }

  const matchRow = document.createElement("p");
  matchRow.className = doc.band_match ? "reveal-match" : "reveal-miss";
  matchRow.textContent = doc.band_match ? t("bandMatch", lang) : t("bandMiss", lang);

  const back = document.createElement("button");
  back.type = "button";
  back.className = "back-to-live";
  back.textContent = t("backToLive", lang);
  back.addEventListener("click", onBack);

  panel.append(actualRow, guessRow, errorRow, matchRow, back);
  return panel;
}

export function renderExpired(lang: Lang, onRestart: () => void): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "game-expired";
  const note = document.createElement("p");
  note.textContent = t("sessionExpired", lang);
  const restart = document.createElement("button");
  restart.type = "button";
  restart.textContent = t("restart", lang);
  restart.addEventListener("click", onRestart);
  panel.append(note, restart);
  return panel;
}
