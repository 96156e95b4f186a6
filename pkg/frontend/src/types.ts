/** JSON shapes of the modalsim HTTP service, mirrored field for field.
 *
 * The dashboard never derives model numbers from these documents; it only
 * formats the fields for display. Anything rendered as a figure carries the
 * raw field value alongside the formatted text.
 */

export const MODES = ["Bicycle", "Car", "Bus", "Walk"] as const;
export type ModeName = (typeof MODES)[number];

export const CRITERIA = [
  "Ecology",
  "Comfort",
  "Finance",
  "Practicality",
  "Time",
  "Safety",
] as const;
export type CriterionName = (typeof CRITERIA)[number];

export const BUILTIN_SCENARIOS = [
  { alias: "free-pt", label: "Free public transport" },
  { alias: "safe-lanes", label: "Safe cycling lanes" },
  { alias: "city-15", label: "15-minute city" },
] as const;
export type BuiltinAlias = (typeof BUILTIN_SCENARIOS)[number]["alias"];

export type SplitDocument = Record<ModeName, number>;

export interface OverrideDocument {
  mode: ModeName;
  criterion: CriterionName;
  value: number;
}

export interface ScenarioDocument {
  name: string;
  overrides: OverrideDocument[];
}

export interface BiasDocument {
  choice_supportive: boolean;
  halo: boolean;
  halo_comparison?: string;
  reactance: boolean;
  reactance_delta?: number;
  reactance_scope?: string;
}

export interface RationalityEntry {
  count: number;
  rational_pct?: number;
  irrational_pct?: number;
  constrained_pct?: number;
}

export interface RationalityReport {
  by_mode: Record<ModeName, RationalityEntry>;
  eval_source: string;
  mask: string | string[];
}

export interface ScenarioResultDocument {
  scenario: string;
  before_split: SplitDocument;
  after_split: SplitDocument;
  transfer: number[][];
  rationality: RationalityReport;
  emissions_index: number;
  metadata: {
    eval_source: string;
    bias: BiasDocument;
    overrides: OverrideDocument[];
    promoted: [string, string][];
    skipped?: string[];
  };
}

export interface PopulationSummary {
  count: number;
  provenance: Record<string, unknown>;
  modal_split?: SplitDocument;
}

export interface PopulationCreated {
  population_id: string;
  summary: PopulationSummary;
}

export interface GameCreated {
  game_id: string;
}

export interface TurnResponse {
  turn: number;
  result: ScenarioResultDocument;
}

export interface HistoryEntry {
  scenario: ScenarioDocument;
  result: ScenarioResultDocument;
}

export interface GameStateDocument {
  game_id: string;
  population_id: string;
  turn: number;
  population_size: number;
  current_split?: SplitDocument;
  emissions_index?: number;
  history: HistoryEntry[];
}
