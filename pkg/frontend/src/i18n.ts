/** UI chrome strings, Polish-primary with an English toggle. Question and
 * section labels come from the schema document itself. */

import type { Label, Lang } from "./types.js";

export const DEFAULT_LANG: Lang = "pl";

const STRINGS = {
  appTitle: { pl: "Kalkulator ryzyka zakażenia", en: "Infection risk calculator" },
  schemaPicker: { pl: "Kwestionariusz", en: "Questionnaire" },
  language: { pl: "Język", en: "Language" },
  loading: { pl: "Ładowanie…", en: "Loading…" },
  riskHeading: { pl: "Oszacowane ryzyko", en: "Estimated risk" },
  riskPending: { pl: "obliczanie…", en: "computing…" },
  intervalLabel: { pl: "95% przedział", en: "95% interval" },
  staleNotice: {
    pl: "Brak połączenia – wynik może być nieaktualny.",
    en: "Connection lost – the shown result may be out of date.",
  },
  retry: { pl: "Spróbuj ponownie", en: "Retry" },
  fetchFailed: { pl: "Nie udało się pobrać kwestionariusza.", en: "Could not load the questionnaire." },
  whatIfHeading: { pl: "Co by było, gdyby…", en: "What if…" },
  ifChanged: { pl: "jeśli:", en: "if:" },
  apply: { pl: "Zastosuj", en: "Apply" },
  previewLabel: { pl: "podgląd", en: "preview" },
  playGame: { pl: "Ile ryzykujesz? (gra)", en: "How much do you risk? (game)" },
  gameIntro: {
    pl: "Wypełnij formularz, a następnie zgadnij swoje ryzyko zanim je pokażemy.",
    en: "Fill in the form, then guess your risk before we reveal it.",
  },
  lockAnswers: { pl: "Zgaduję!", en: "Make my guess!" },
  guessHeading: { pl: "Jakie jest Twoje ryzyko?", en: "What is your risk?" },
  guessByPercent: { pl: "Zgadnij procent", en: "Guess a percentage" },
  guessByBand: { pl: "Zgadnij przedział", en: "Guess a band" },
  submitGuess: { pl: "Pokaż wynik", en: "Reveal" },
  yourGuess: { pl: "Twoja odpowiedź", en: "Your guess" },
  actualRisk: { pl: "Rzeczywiste ryzyko", en: "Actual risk" },
  absoluteError: { pl: "Błąd bezwzględny", en: "Absolute error" },
  bandMatch: { pl: "Trafiony przedział", en: "Band matched" },
  bandMiss: { pl: "Inny przedział", en: "Different band" },
  playAgain: { pl: "Zagraj jeszcze raz", en: "Play again" },
  backToLive: { pl: "Wróć do kalkulatora", en: "Back to the calculator" },
  sessionExpired: {
    pl: "Sesja gry wygasła. Zacznij od nowa.",
    en: "The game session expired. Start over.",
  },
  restart: { pl: "Zacznij od nowa", en: "Start over" },
  yes: { pl: "Tak", en: "Yes" },
  no: { pl: "Nie", en: "No" },
  doNotKnow: { pl: "Nie wiem", en: "Do not know" },
  bandLow: { pl: "niskie", en: "low" },
  bandModerate: { pl: "umiarkowane", en: "moderate" },
  bandHigh: { pl: "wysokie", en: "high" },
  bandVeryHigh: { pl: "bardzo wysokie", en: "very high" },
} satisfies Record<string, Label>;

export type StringKey = keyof typeof STRINGS;

export function t(key: StringKey, lang: Lang): string {
  return STRINGS[key][lang];
}

/** Schema-provided label in the active language. */
export function label(l: Label, lang: Lang): string {
  return l[lang];
}

const BAND_KEYS: Record<string, StringKey> = {
  low: "bandLow",
  moderate: "bandModerate",
  high: "bandHigh",
  "very-high": "bandVeryHigh",
};

/** Localized name for a risk band id (falls back to the id itself). */
export function bandName(band: string, lang: Lang): string {
  const key = BAND_KEYS[band];
  return key ? t(key, lang) : band;
}

export const BAND_IDS = ["low", "moderate", "high", "very-high"] as const;
