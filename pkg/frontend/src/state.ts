/** Dashboard view state and its reducer.
 *
 * The reducer is pure: every user interaction and API response is an action,
 * and rendering is a function of the resulting state alone. API calls happen
 * outside (see main.ts); their outcomes come back as actions.
 */

import type {
  BiasDocument,
  BuiltinAlias,
  CriterionName,
  GameStateDocument,
  HistoryEntry,
  ModeName,
  PopulationCreated,
  ScenarioDocument,
  TurnResponse,
} from "./types.js";
import { BUILTIN_SCENARIOS } from "./types.js";

export type Screen = "setup" | "play" | "history";

export type CellKey = `${ModeName}|${CriterionName}`;

export function cellKey(mode: ModeName, criterion: CriterionName): CellKey {
  return `${mode}|${criterion}`;
}

export interface BiasToggles {
  choiceSupportive: boolean;
  halo: boolean;
  reactance: boolean;
  /** Penalty depth, slider range 0 to 3. */
  reactanceDelta: number;
}

export interface PendingScenario {
  kind: "builtin" | "custom";
  alias: BuiltinAlias;
  customName: string;
  /** At most one override per cell by construction. */
  overrides: Partial<Record<CellKey, number>>;
}

export interface ErrorBanner {
  message: string;
  /** Action to replay when the user hits retry, if the failure is retryable. */
  retry: Action | null;
}

export interface ViewState {
  screen: Screen;
  populationId: string | null;
  populationCount: number | null;
  gameId: string | null;
  turn: number;
  biases: BiasToggles;
  scenario: PendingScenario;
  history: HistoryEntry[];
  /** Single in-flight turn; Enact stays disabled while true. */
  turnPending: boolean;
  error: ErrorBanner | null;
}

export const DELTA_MIN = 0;
export const DELTA_MAX = 3;

export function initialState(): ViewState {
  return {
    screen: "setup",
    populationId: null,
    populationCount: null,
    gameId: null,
    turn: 0,
    biases: {
      choiceSupportive: true,
      halo: false,
      reactance: false,
      reactanceDelta: 1,
    },
    scenario: {
      kind: "builtin",
      alias: "free-pt",
      customName: "Custom scenario",
      overrides: {},
    },
    history: [],
    turnPending: false,
    error: null,
  };
}

export type Action =
  | { type: "population_created"; response: PopulationCreated }
  | { type: "game_created"; gameId: string }
  | { type: "game_loaded"; state: GameStateDocument }
  | { type: "show_screen"; screen: Screen }
  | { type: "toggle_bias"; bias: "choiceSupportive" | "halo" | "reactance" }
  | { type: "set_delta"; value: number }
  | { type: "pick_builtin"; alias: BuiltinAlias }
  | { type: "pick_custom" }
  | { type: "set_custom_name"; name: string }
  | { type: "edit_override"; mode: ModeName; criterion: CriterionName; value: number | null }
  | { type: "enact_started" }
  | { type: "turn_resolved"; response: TurnResponse; scenario: ScenarioDocument }
  | { type: "turn_failed"; message: string; retry: Action | null }
  | { type: "stale_game" }
  | { type: "dismiss_error" };

function isValidOverride(value: number): boolean {
  return Number.isInteger(value) && value >= 0 && value <= 10;
}

export function reduce(state: ViewState, action: Action): ViewState {
  switch (action.type) {
    case "population_created":
      return {
        ...initialState(),
        populationId: action.response.population_id,
        populationCount: action.response.summary.count,
        biases: state.biases,
      };
    case "game_created":
      return {
        ...state,
        gameId: action.gameId,
        turn: 0,
        history: [],
        screen: "play",
        turnPending: false,
        error: null,
      };
    case "game_loaded":
      return {
        ...state,
        gameId: action.state.game_id,
        populationId: action.state.population_id,
        populationCount: action.state.population_size,
        turn: action.state.turn,
        history: action.state.history,
        screen: "play",
        turnPending: false,
      };
    case "show_screen":
      return { ...state, screen: action.screen };
    case "toggle_bias":
      return {
        ...state,
        biases: { ...state.biases, [action.bias]: !state.biases[action.bias] },
      };
    case "set_delta": {
      const clamped = Math.min(DELTA_MAX, Math.max(DELTA_MIN, action.value));
      if (!Number.isFinite(clamped)) {
        return state;
      }
      return { ...state, biases: { ...state.biases, reactanceDelta: clamped } };
    }
    case "pick_builtin":
      return { ...state, scenario: { ...state.scenario, kind: "builtin", alias: action.alias } };
    case "pick_custom":
      return { ...state, scenario: { ...state.scenario, kind: "custom" } };
    case "set_custom_name":
      return { ...state, scenario: { ...state.scenario, customName: action.name } };
    case "edit_override": {
      const key = cellKey(action.mode, action.criterion);
      const overrides = { ...state.scenario.overrides };
      if (action.value === null) {
        delete overrides[key];
      } else if (isValidOverride(action.value)) {
        overrides[key] = action.value;
      } else {
        return state;
      }
      return { ...state, scenario: { ...state.scenario, overrides } };
    }
    case "enact_started":
      if (state.turnPending) {
        return state;
      }
      return { ...state, turnPending: true, error: null };
    case "turn_resolved":
      return {
        ...state,
        turnPending: false,
        turn: action.response.turn,
        history: [
          ...state.history,
          { scenario: action.scenario, result: action.response.result },
        ],
      };
    case "turn_failed":
      return {
        ...state,
        turnPending: false,
        error: { message: action.message, retry: action.retry },
      };
    case "stale_game":
      return {
        ...initialState(),
        biases: state.biases,
        error: {
          message: "This game no longer exists on the server; start a new one.",
          retry: null,
        },
      };
    case "dismiss_error":
      return { ...state, error: null };
  }
}

/** The bias document the next turn will be posted with. */
export function biasDocument(biases: BiasToggles): BiasDocument {
  return {
    choice_supportive: biases.choiceSupportive,
    halo: biases.halo,
    reactance: biases.reactance,
    reactance_delta: biases.reactanceDelta,
  };
}

/** The scenario payload the next turn will be posted with: a builtin alias
 * string, or a full document for the custom grid.
 */
export function scenarioPayload(scenario: PendingScenario): string | ScenarioDocument {
  if (scenario.kind === "builtin") {
    return scenario.alias;
  }
  const overrides = Object.entries(scenario.overrides).map(([key, value]) => {
    const [mode, criterion] = key.split("|") as [ModeName, CriterionName];
    return { mode, criterion, value: value as number };
  });
  return { name: scenario.customName, overrides };
}

/** Document form of what a pending scenario would post, for the history diff
 * and the play-screen summary.
 */
export function scenarioLabel(scenario: PendingScenario): string {
  if (scenario.kind === "builtin") {
    const builtin = BUILTIN_SCENARIOS.find((b) => b.alias === scenario.alias);
    return builtin ? builtin.label : scenario.alias;
  }
  return scenario.customName;
}

export interface OverrideChange {
  mode: string;
  criterion: string;
  before: number | null;
  after: number | null;
}

/** What changed between two consecutive turns' override sets. */
export function overrideDiff(
  previous: ScenarioDocument | null,
  current: ScenarioDocument,
): OverrideChange[] {
  const before = new Map<string, number>();
  for (const o of previous ? previous.overrides : []) {
    before.set(`${o.mode}|${o.criterion}`, o.value);
  }
  const after = new Map<string, number>();
  for (const o of current.overrides) {
    after.set(`${o.mode}|${o.criterion}`, o.value);
  }
  const keys = [...new Set([...before.keys(), ...after.keys()])].sort();
  const changes: OverrideChange[] = [];
  for (const key of keys) {
    const b = before.has(key) ? (before.get(key) as number) : null;
    const a = after.has(key) ? (after.get(key) as number) : null;
    if (b !== a) {
      const [mode, criterion] = key.split("|") as [string, string];
      changes.push({ mode, criterion, before: b, after: a });
    }
  }
  return changes;
}
