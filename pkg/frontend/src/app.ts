/** Top-level controller: wires the schema-driven form, debounced live
 * assessment, the what-if panel, and the guess-the-risk game.
 *
 * Concurrency: at most one assessment request is in flight (newer ones abort
 * it) and a sequence gate drops stale responses, so the shown risk always
 * belongs to the newest completed assessment. In game mode live assessment
 * is fully suppressed; no response carrying the actual risk is requested
 * until the reveal.
 */

import { ApiError, createApiClient, type ApiClient, type FetchLike } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import { formatPercent } from "./format.js";
import { renderForm, syncAnswers, updateGating } from "./form.js";
import { renderExpired, renderGameBanner, renderGuessPanel, renderReveal } from "./game.js";
import { DEFAULT_LANG, bandName, label, t } from "./i18n.js";
import { SequenceGate } from "./sequence.js";
import {
  defaultAnswers,
  questionById,
  restoreAnswers,
  restoreLang,
  restoreSchemaChoice,
  saveAnswers,
  saveLang,
  saveSchemaChoice,
  type StorageLike,
} from "./state.js";
import type { AnswerMap, AnswerValue, Assessment, GameDoc, Lang, QuestionDoc, SchemaDoc } from "./types.js";
import { renderWhatIf } from "./whatif.js";

export const DEBOUNCE_MS = 250;

export type Mode = "live" | "game-entry" | "game-guess" | "game-revealed" | "game-expired";

export interface AppConfig {
  apiBase: string;
  storage: StorageLike;
  fetchFn?: FetchLike;
  debounceMs?: number;
}

export interface AppState {
  mode: Mode;
  schemaId: string | null;
  answers: AnswerMap;
  lastAssessment: Assessment | null;
  pendingRequest: boolean;
  lang: Lang;
}

export interface App {
  start(): Promise<void>;
  getState(): AppState;
}

/** Same answer domain the service explores for protective values. */
export function protectiveCandidates(question: QuestionDoc): AnswerValue[] {
  switch (question.widget) {
    case "checkbox":
      return [false, true];
    case "tri-state":
      return ["no", "yes"];
    case "dropdown":
      return question.options!.map((o) => o.id);
    case "slider":
      return [question.bounds!.lo, question.bounds!.hi];
  }
}

export function createApp(root: HTMLElement, config: AppConfig): App {
  const api: ApiClient = createApiClient(config.apiBase, config.fetchFn);
  const storage = config.storage;
  const gate = new SequenceGate();

  let lang: Lang = restoreLang(storage) ?? DEFAULT_LANG;
  let schemas: SchemaDoc[] = [];
  let schema: SchemaDoc | null = null;
  let answers: AnswerMap = {};
  let mode: Mode = "live";
  let lastAssessment: Assessment | null = null;
  let pendingRequest = false;
  let stale = false;
  let gameDoc: GameDoc | null = null;
  let inFlight: AbortController | null = null;

  let formEl: HTMLFormElement | null = null;
  let sidePane: HTMLElement | null = null;

  const debouncedAssess: Debounced<[]> = debounce(() => {
    void runAssess();
  }, config.debounceMs ?? DEBOUNCE_MS);

  // ------------------------------------------------------------- network

  async function runAssess(): Promise<void> {
    if (!schema || mode !== "live") return;
    const seq = gate.issue();
    inFlight?.abort();
    const controller = new AbortController();
    inFlight = controller;
    try {
      const assessment = await api.assess(schema.id, answers, controller.signal);
      if (!gate.accept(seq)) return; // a newer request owns the display
      lastAssessment = assessment;
      pendingRequest = false;
      stale = false;
      renderSidePane();
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (!gate.accept(seq)) return;
      pendingRequest = false;
      stale = true;
      renderSidePane();
      if (!(err instanceof ApiError)) throw err;
    }
  }

  function scheduleAssess(): void {
    if (mode !== "live") return;
    pendingRequest = true;
    renderSidePane();
    debouncedAssess();
  }

  function assessNow(): void {
    scheduleAssess();
    debouncedAssess.flush();
  }

  function suppressLiveAssessment(): void {
    debouncedAssess.cancel();
    inFlight?.abort();
    inFlight = null;
    pendingRequest = false;
  }

  // ------------------------------------------------------------- answers

  function setAnswer(questionId: string, value: AnswerValue): void {
    if (!schema) return;
    answers[questionId] = value;
    saveAnswers(storage, schema, answers);
    if (formEl) updateGating(formEl, schema, answers);
  }

  function onWidgetChange(questionId: string, value: AnswerValue): void {
    setAnswer(questionId, value);
    if (mode === "live") scheduleAssess();
  }

  async function applyProtectiveValue(questionId: string): Promise<void> {
    if (!schema || !lastAssessment) return;
    const question = questionById(schema, questionId);
    if (!question) return;
    const current = answers[questionId];
    // probe the candidates server-side; the client never ranks risks itself
    let bestProbability = lastAssessment.probability;
    let bestValue: AnswerValue | null = null;
    for (const candidate of protectiveCandidates(question)) {
      if (candidate === current) continue;
      try {
        const probe = await api.assess(schema.id, { ...answers, [questionId]: candidate });
        if (probe.probability < bestProbability) {
          bestProbability = probe.probability;
          bestValue = candidate;
        }
      } catch {
        return; // leave the form untouched if any probe fails
      }
    }
    if (bestValue !== null) {
      setAnswer(questionId, bestValue);
      if (formEl) syncAnswers(formEl, schema, answers);
      assessNow();
    }
  }

  // -------------------------------------------------------------- render

  function riskValueLine(assessment: Assessment): HTMLElement {
    const line = document.createElement("p");
    line.className = "risk-line";
    const value = document.createElement("strong");
    value.className = `risk-value band-${assessment.band}`;
    value.dataset.probability = String(assessment.probability);
    value.textContent = assessment.display; // server string, verbatim
    const band = document.createElement("span");
    band.className = "risk-band";
    band.textContent = ` (${bandName(assessment.band, lang)})`;
    line.append(value, band);
    return line;
  }

  function renderRiskPanel(): HTMLElement {
    const panel = document.createElement("section");
    panel.className = "risk-panel";
    const heading = document.createElement("h2");
    heading.textContent = t("riskHeading", lang);
    panel.append(heading);

    if (lastAssessment) {
      panel.append(riskValueLine(lastAssessment));
      if (lastAssessment.interval) {
        const [lo, hi] = lastAssessment.interval;
        const interval = document.createElement("p");
        interval.className = "risk-interval";
        interval.textContent = `${t("intervalLabel", lang)}: ${formatPercent(lo)} – ${formatPercent(hi)}`;
        panel.append(interval);
      }
    }

    const preview = document.createElement("p");
    preview.className = "risk-preview";
    preview.hidden = true;
    panel.append(preview);

    if (pendingRequest) {
      const pending = document.createElement("p");
      pending.className = "pending-notice";
      pending.textContent = t("riskPending", lang);
      panel.append(pending);
    }

    if (stale) {
      panel.classList.add("stale");
      const notice = document.createElement("p");
      notice.className = "stale-notice";
      notice.textContent = t("staleNotice", lang);
      const retry = document.createElement("button");
      retry.type = "button";
      retry.className = "retry-assess";
      retry.textContent = t("retry", lang);
      retry.addEventListener("click", () => assessNow());
      notice.append(" ", retry);
      panel.append(notice);
    }
    return panel;
  }

  function showPreview(probability: number | null): void {
    const preview = sidePane?.querySelector<HTMLElement>(".risk-preview");
    if (!preview) return;
    if (probability === null) {
      preview.hidden = true;
      preview.textContent = "";
      delete preview.dataset.probability;
    } else {
      preview.hidden = false;
      preview.dataset.probability = String(probability);
      preview.textContent = `${t("previewLabel", lang)}: ${formatPercent(probability)}`;
    }
  }

  function renderSidePane(): void {
    if (!sidePane || !schema) return;
    sidePane.replaceChildren();
    switch (mode) {
      case "live": {
        sidePane.append(renderRiskPanel());
        if (lastAssessment) {
          sidePane.append(
            renderWhatIf(lastAssessment, schema, lang, {
              onPreview: showPreview,
              onApply: (questionId) => void applyProtectiveValue(questionId),
            }),
          );
        }
        break;
      }
      case "game-entry": {
        sidePane.append(renderGameBanner(lang, () => void lockAnswers()));
        break;
      }
      case "game-guess": {
        sidePane.append(renderGuessPanel(lang, (guess) => void submitGuess(guess)));
        break;
      }
      case "game-revealed": {
        sidePane.append(renderReveal(gameDoc!, lang, backToLive));
        break;
      }
      case "game-expired": {
        sidePane.append(renderExpired(lang, () => switchMode("game-entry")));
        break;
      }
    }
  }

  // ---------------------------------------------------------------- game

  function switchMode(next: Mode): void {
    mode = next;
    if (next !== "live") suppressLiveAssessment();
    renderSidePane();
  }

  async function lockAnswers(): Promise<void> {
    if (!schema) return;
    try {
      gameDoc = await api.createGame(schema.id, answers);
      switchMode("game-guess");
    } catch (err) {
      if (err instanceof ApiError) switchMode("game-expired");
      else throw err;
    }
  }

  async function submitGuess(guess: { probability: number } | { band: string }): Promise<void> {
    if (!gameDoc) return;
    try {
      gameDoc = await api.submitGuess(gameDoc.session_id, guess);
      switchMode("game-revealed");
    } catch (err) {
      if (err instanceof ApiError && (err.status === 404 || err.status === 409)) {
        gameDoc = null;
        switchMode("game-expired");
      } else if (!(err instanceof ApiError)) {
        throw err;
      }
    }
  }

  function backToLive(): void {
    gameDoc = null;
    mode = "live";
    renderSidePane();
    assessNow();
  }

  // -------------------------------------------------------------- chrome

  function renderChrome(): void {
    root.replaceChildren();
    const header = document.createElement("header");
    const title = document.createElement("h1");
    title.textContent = t("appTitle", lang);
    header.append(title);

    const controls = document.createElement("div");
    controls.className = "controls";

    const pickerLabel = document.createElement("label");
    pickerLabel.htmlFor = "schema-picker";
    pickerLabel.textContent = t("schemaPicker", lang);
    const picker = document.createElement("select");
    picker.id = "schema-picker";
    for (const doc of schemas) {
      const option = document.createElement("option");
      option.value = doc.id;
      option.textContent = label(doc.title, lang);
      option.selected = schema?.id === doc.id;
      picker.append(option);
    }
    picker.addEventListener("change", () => void selectSchema(picker.value));

    const langToggle = document.createElement("button");
    langToggle.type = "button";
    langToggle.className = "lang-toggle";
    langToggle.textContent = lang === "pl" ? "EN" : "PL";
    langToggle.setAttribute("aria-label", t("language", lang));
    langToggle.addEventListener("click", () => {
      lang = lang === "pl" ? "en" : "pl";
      saveLang(storage, lang);
      renderAll();
    });

    const gameToggle = document.createElement("button");
    gameToggle.type = "button";
    gameToggle.className = "game-toggle";
    gameToggle.textContent = t("playGame", lang);
    gameToggle.addEventListener("click", () => {
      if (mode === "live") switchMode("game-entry");
      else backToLive();
    });

    controls.append(pickerLabel, picker, langToggle, gameToggle);
    header.append(controls);

    const layout = document.createElement("main");
    layout.className = "layout";
    const formPane = document.createElement("div");
    formPane.className = "form-pane";
    sidePane = document.createElement("aside");
    sidePane.className = "side-pane";
    layout.append(formPane, sidePane);

    root.append(header, layout);

    if (schema) {
      formEl = renderForm(schema, answers, lang, onWidgetChange);
      formPane.append(formEl);
    }
    renderSidePane();
  }

  function renderAll(): void {
    renderChrome();
  }

  function renderLoadFailure(message: string): void {
    root.replaceChildren();
    const panel = document.createElement("section");
    panel.className = "load-failure";
    const note = document.createElement("p");
    note.textContent = `${t("fetchFailed", lang)} (${message})`;
    const retry = document.createElement("button");
    retry.type = "button";
    retry.className = "retry-load";
    retry.textContent = t("retry", lang);
    retry.addEventListener("click", () => void start());
    panel.append(note, retry);
    root.append(panel);
  }

  // ----------------------------------------------------------- lifecycle

  async function selectSchema(schemaId: string): Promise<void> {
    const doc = schemas.find((s) => s.id === schemaId);
    if (!doc) return;
    schema = doc;
    answers = restoreAnswers(storage, doc);
    saveSchemaChoice(storage, doc.id);
    lastAssessment = null;
    gameDoc = null;
    mode = "live";
    renderAll();
    assessNow();
  }

  async function start(): Promise<void> {
    root.replaceChildren();
    const loading = document.createElement("p");
    loading.className = "loading";
    loading.textContent = t("loading", lang);
    root.append(loading);
    try {
      schemas = await api.listSchemas();
    } catch (err) {
      renderLoadFailure(err instanceof Error ? err.message : String(err));
      return;
    }
    if (schemas.length === 0) {
      renderLoadFailure("no schemas");
      return;
    }
    const savedChoice = restoreSchemaChoice(storage);
    const first = schemas.find((s) => s.id === savedChoice) ?? schemas[0]!;
    await selectSchema(first.id);
  }

  return {
    start,
    getState: () => ({
      mode,
      schemaId: schema?.id ?? null,
      answers: { ...answers },
      lastAssessment,
      pendingRequest,
      lang,
    }),
  };
}
