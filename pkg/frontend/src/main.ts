/** Browser entry point: owns the state, wires DOM events to actions, and
 * repaints on every dispatch. All logic lives in state.ts and render.ts;
 * this file only reads inputs, calls the API, and feeds outcomes back in.
 */

import { ApiClient, isStaleGame } from "./api.js";
import { render } from "./render.js";
import type { Action, ViewState } from "./state.js";
import {
  biasDocument,
  initialState,
  reduce,
  scenarioPayload,
} from "./state.js";
import type {
  BuiltinAlias,
  CriterionName,
  ModeName,
  ScenarioDocument,
} from "./types.js";

declare global {
  interface Window {
    MODALSIM_API?: string;
  }
}

const API_BASE = window.MODALSIM_API ?? "http://127.0.0.1:8000";

function newKey(): string {
  if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
    return crypto.randomUUID();
  }
  return `key-${Date.now()}-${Math.random().toString(16).slice(2)}`;
}

function start(root: HTMLElement): void {
  const api = new ApiClient(API_BASE);
  let state: ViewState = initialState();
  // Replaying the last failed call with its original idempotency key makes
  // the retry button safe even if the first attempt did land.
  let lastAttempt: (() => Promise<void>) | null = null;

  const dispatch = (action: Action): void => {
    state = reduce(state, action);
    root.innerHTML = render(state);
  };

  const fail = (error: unknown, retryable: boolean): void => {
    if (isStaleGame(error)) {
      lastAttempt = null;
      dispatch({ type: "stale_game" });
      return;
    }
    const message = error instanceof Error ? error.message : String(error);
    dispatch({
      type: "turn_failed",
      message,
      retry: retryable ? { type: "enact_started" } : null,
    });
  };

  const createPopulationFlow = async (create: () => Promise<void>): Promise<void> => {
    try {
      await create();
    } catch (error) {
      lastAttempt = null;
      fail(error, false);
    }
  };

  const startGame = async (populationId: string): Promise<void> => {
    const game = await api.createGame(populationId);
    dispatch({ type: "game_created", gameId: game.game_id });
  };

  const synthesizeFlow = async (): Promise<void> => {
    const profile = (root.querySelector("[data-role=profile]") as HTMLSelectElement).value as
      | "our-sample"
      | "france";
    const n = Number((root.querySelector("[data-role=size]") as HTMLInputElement).value);
    const seed = Number((root.querySelector("[data-role=seed]") as HTMLInputElement).value);
    await createPopulationFlow(async () => {
      const created = await api.createPopulationSynth({ profile, n, seed });
      dispatch({ type: "population_created", response: created });
      await startGame(created.population_id);
    });
  };

  const uploadFlow = async (): Promise<void> => {
    const csv = (root.querySelector("[data-role=csv]") as HTMLTextAreaElement).value;
    await createPopulationFlow(async () => {
      const created = await api.createPopulationUpload(csv);
      dispatch({ type: "population_created", response: created });
      await startGame(created.population_id);
    });
  };

  const enactFlow = (): void => {
    if (state.turnPending || !state.gameId) {
      return;
    }
    const gameId = state.gameId;
    const scenario = scenarioPayload(state.scenario);
    const bias = biasDocument(state.biases);
    const key = newKey();
    const attempt = async (): Promise<void> => {
      dispatch({ type: "enact_started" });
      try {
        const response = await api.postTurn(gameId, scenario, bias, key);
        const played: ScenarioDocument = {
          name: response.result.scenario,
          overrides: response.result.metadata.overrides,
        };
        lastAttempt = null;
        dispatch({ type: "turn_resolved", response, scenario: played });
      } catch (error) {
        fail(error, true);
      }
    };
    lastAttempt = attempt;
    void attempt();
  };

  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-action]");
    if (!target) {
      return;
    }
    const action = target.getAttribute("data-action");
    switch (action) {
      case "show-setup":
        dispatch({ type: "show_screen", screen: "setup" });
        break;
      case "show-play":
        dispatch({ type: "show_screen", screen: "play" });
        break;
      case "show-history":
        dispatch({ type: "show_screen", screen: "history" });
        break;
      case "synthesize":
        void synthesizeFlow();
        break;
      case "upload":
        void uploadFlow();
        break;
      case "enact":
        enactFlow();
        break;
      case "retry":
        dispatch({ type: "dismiss_error" });
        if (lastAttempt) {
          void lastAttempt();
        }
        break;
      case "dismiss-error":
        dispatch({ type: "dismiss_error" });
        break;
    }
  });

  root.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    const role = target.getAttribute("data-role");
    if (role === "bias-choice-supportive") {
      dispatch({ type: "toggle_bias", bias: "choiceSupportive" });
    } else if (role === "bias-halo") {
      dispatch({ type: "toggle_bias", bias: "halo" });
    } else if (role === "bias-reactance") {
      dispatch({ type: "toggle_bias", bias: "reactance" });
    } else if (role === "reactance-delta") {
      dispatch({ type: "set_delta", value: Number((target as HTMLInputElement).value) });
    } else if (role === "builtin") {
      dispatch({
        type: "pick_builtin",
        alias: (target as HTMLInputElement).value as BuiltinAlias,
      });
    } else if (role === "custom") {
      dispatch({ type: "pick_custom" });
    } else if (role === "custom-name") {
      dispatch({ type: "set_custom_name", name: (target as HTMLInputElement).value });
    } else if (target.hasAttribute("data-cell")) {
      const [mode, criterion] = (target.getAttribute("data-cell") as string).split("|") as [
        ModeName,
        CriterionName,
      ];
      const raw = (target as HTMLInputElement).value.trim();
      dispatch({
        type: "edit_override",
        mode,
        criterion,
        value: raw === "" ? null : Number(raw),
      });
    }
  });

  root.innerHTML = render(state);
}

const mount = document.getElementById("app");
if (mount) {
  start(mount);
}
