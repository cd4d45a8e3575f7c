/** Wire types mirroring the service's JSON documents. */

export type Lang = "pl" | "en";

export type Label = Record<Lang, string>;

export type Widget = "checkbox" | "dropdown" | "slider" | "tri-state";

export interface OptionDoc {
  id: string;
  label: Label;
  feature: string | null;
}

export interface QuestionDoc {
  id: string;
  widget: Widget;
  label: Label;
  modifiable: boolean;
  allow_unknown: boolean;
  feature: string | null;
  options?: OptionDoc[];
  bounds?: { lo: number; hi: number };
}

export interface SectionDoc {
  id: string;
  title: Label;
  enabled_when: { question: string; equals: AnswerValue } | null;
  questions: QuestionDoc[];
}

export interface SchemaDoc {
  format_version: number;
  id: string;
  version: number;
  audience: string;
  title: Label;
  band_thresholds: { low: number; moderate: number; high: number };
  sections: SectionDoc[];
  priors: Record<string, number>;
  interaction_pairs: [string, string][];
}

export type AnswerValue = boolean | string | number;

export type AnswerMap = Record<string, AnswerValue>;

/** [question-id, signed probability delta], ascending (largest reduction first). */
export type FactorDelta = [string, number];

export interface Assessment {
  probability: number;
  display: string;
  band: string;
  factor_deltas: FactorDelta[];
  interval: [number, number] | null;
}

export type GameState = "awaiting-guess" | "revealed";

export interface GameDoc {
  session_id: string;
  schema_id: string;
  state: GameState;
  actual?: Assessment;
  guess?: { probability: number | null; band: string | null };
  absolute_error?: number | null;
  band_match?: boolean;
}

export type GuessBody = { probability: number } | { band: string };

export interface ErrorDoc {
  code: string;
  message: string;
  details: string[];
}
