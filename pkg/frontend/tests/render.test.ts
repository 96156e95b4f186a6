/** Render parity: every figure in the markup carries the raw payload value
 * it was formatted from, so the suite resolves each data-field path back
 * into the fixture document and demands exact equality. A view that invents,
 * drops, or mislabels a number fails here.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { formatCount, formatEmissions, formatPct, formatShare } from "../src/format.js";
import { render } from "../src/render.js";
import { initialState, type ViewState } from "../src/state.js";
import type { HistoryEntry, ScenarioResultDocument } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));

const RESULT: ScenarioResultDocument = JSON.parse(
  readFileSync(join(HERE, "fixtures", "scenario_result.json"), "utf8"),
);

const ENTRY: HistoryEntry = {
  scenario: {
    name: RESULT.scenario,
    overrides: RESULT.metadata.overrides,
  },
  result: RESULT,
};

function playState(history: HistoryEntry[] = [ENTRY]): ViewState {
  return {
    ...initialState(),
    screen: "play",
    populationId: "pop-1",
    populationCount: 36,
    gameId: "game-1",
    turn: history.length,
    history,
  };
}

function unescapeAttr(text: string): string {
  return text
    .replace(/&quot;/g, '"')
    .replace(/&lt;/g, "<")
    .replace(/&gt;/g, ">")
    .replace(/&amp;/g, "&");
}

interface Figure {
  field: string;
  value: unknown;
}

function extractFigures(html: string): Figure[] {
  const figures: Figure[] = [];
  const pattern = /data-field="([^"]*)" data-value="([^"]*)"/g;
  for (const match of html.matchAll(pattern)) {
    figures.push({
      field: unescapeAttr(match[1] as string),
      value: JSON.parse(unescapeAttr(match[2] as string)),
    });
  }
  return figures;
}

function resolve(root: unknown, path: string): unknown {
  let node: unknown = root;
  for (const segment of path.split(".")) {
    if (node === null || typeof node !== "object") {
      throw new Error(`path ${path} leaves the document at ${segment}`);
    }
    node = (node as Record<string, unknown>)[segment];
  }
  return node;
}

describe("figure parity with the payload", () => {
  const state = playState();
  const html = render(state);
  const figures = extractFigures(html);
  const root = { history: state.history };

  it("finds figures to check", () => {
    expect(figures.length).toBeGreaterThan(25);
  });

  it("resolves every data-field to exactly the attached data-value", () => {
    for (const figure of figures) {
      expect(resolve(root, figure.field), figure.field).toEqual(figure.value);
    }
  });

  it("shows all sixteen transfer cells", () => {
    const cells = figures.filter((f) => /^history\.0\.result\.transfer\.\d\.\d$/.test(f.field));
    expect(cells).toHaveLength(16);
    const total = cells.reduce((sum, f) => sum + (f.value as number), 0);
    expect(total).toBe(36);
  });

  it("shows four before and four after split bars", () => {
    const before = figures.filter((f) => f.field.includes(".before_split."));
    const after = figures.filter((f) => f.field.includes(".after_split."));
    expect(before).toHaveLength(4);
    expect(after).toHaveLength(4);
  });

  it("shows a rationality gauge per mode", () => {
    const gauges = figures.filter((f) => f.field.endsWith(".rational_pct"));
    expect(gauges.map((f) => f.field).sort()).toEqual([
      "history.0.result.rationality.by_mode.Bicycle.rational_pct",
      "history.0.result.rationality.by_mode.Bus.rational_pct",
      "history.0.result.rationality.by_mode.Car.rational_pct",
      "history.0.result.rationality.by_mode.Walk.rational_pct",
    ]);
  });

  it("plots the emissions index in the headline and the trend", () => {
    const points = figures.filter((f) => f.field === "history.0.result.emissions_index");
    expect(points).toHaveLength(2);
  });
});

describe("visible text matches the formatted raw value", () => {
  const html = render(playState());
  const spans = [
    ...html.matchAll(/<span class="val" data-field="([^"]*)" data-value="([^"]*)">([^<]*)<\/span>/g),
  ].map((m) => ({
    field: unescapeAttr(m[1] as string),
    value: JSON.parse(unescapeAttr(m[2] as string)),
    text: unescapeAttr(m[3] as string),
  }));

  it("covers splits, transfers, gauges, and the emissions headline", () => {
    expect(spans.length).toBeGreaterThan(25);
  });

  it("formats each figure from its own raw value", () => {
    for (const span of spans) {
      const { field, value, text } = span;
      if (/\.(before_split|after_split)\./.test(field)) {
        expect(text, field).toBe(formatShare(value as number));
      } else if (/\.transfer\.\d\.\d$/.test(field)) {
        expect(text, field).toBe(formatCount(value as number));
      } else if (field.endsWith(".rational_pct")) {
        expect(text, field).toBe(formatPct(value as number));
      } else if (field.endsWith(".emissions_index")) {
        expect(text, field).toBe(formatEmissions(value as number));
      } else if (field.endsWith(".scenario") || field.endsWith(".name")) {
        expect(text, field).toBe(value);
      } else {
        throw new Error(`unexpected figure field ${field}`);
      }
    }
  });
});

describe("play screen controls", () => {
  it("disables Enact and the inputs while a turn is in flight", () => {
    const pending = { ...playState(), turnPending: true };
    const html = render(pending);
    expect(html).toMatch(/data-action="enact" disabled/);
    expect(html).toContain("Enacting...");
  });

  it("keeps Enact live otherwise", () => {
    const html = render(playState());
    expect(html).toMatch(/data-action="enact">/);
  });

  it("marks the promoted cell from the payload", () => {
    const html = render(playState());
    expect(html).toContain("Promoted: Bus / Finance");
  });

  it("prompts for a population when none is loaded", () => {
    const html = render({ ...initialState(), screen: "play" });
    expect(html).toContain("Load a population first");
  });
});

describe("error banner", () => {
  it("shows the message with a retry button when the failure is retryable", () => {
    const state: ViewState = {
      ...playState(),
      error: { message: "HTTP 422: bad scenario", retry: { type: "enact_started" } },
    };
    const html = render(state);
    expect(html).toContain("HTTP 422: bad scenario");
    expect(html).toContain('data-action="retry"');
  });

  it("offers no retry for dead ends", () => {
    const state: ViewState = {
      ...playState(),
      error: { message: "game is gone", retry: null },
    };
    const html = render(state);
    expect(html).toContain("game is gone");
    expect(html).not.toContain('data-action="retry"');
  });

  it("escapes markup in error text", () => {
    const state: ViewState = {
      ...playState(),
      error: { message: `<script>alert("x")</script>`, retry: null },
    };
    const html = render(state);
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("history screen", () => {
  it("diffs each turn's overrides against the previous turn", () => {
    const second: HistoryEntry = {
      scenario: {
        name: "Safe cycling lanes",
        overrides: [{ mode: "Bicycle", criterion: "Safety", value: 10 }],
      },
      result: RESULT,
    };
    const state: ViewState = { ...playState([ENTRY, second]), screen: "history" };
    const html = render(state);
    expect(html).toContain("Turn 1:");
    expect(html).toContain("Turn 2:");
    expect(html).toContain("Bus / Finance: survey answers to 10");
    expect(html).toContain("Bicycle / Safety: survey answers to 10");
    expect(html).toContain("Bus / Finance: 10 to survey answers");

    const figures = extractFigures(html);
    const names = figures.filter((f) => f.field.endsWith(".scenario.name"));
    expect(names.map((f) => f.value)).toEqual(["Free public transport", "Safe cycling lanes"]);
    for (const figure of figures) {
      expect(resolve({ history: state.history }, figure.field), figure.field).toEqual(figure.value);
    }
  });

  it("says so when a turn repeats the previous overrides", () => {
    const state: ViewState = { ...playState([ENTRY, ENTRY]), screen: "history" };
    const html = render(state);
    expect(html).toContain("Same overrides as the previous turn");
  });
});

describe("setup screen", () => {
  it("offers both synthetic profiles and a CSV upload", () => {
    const html = render(initialState());
    expect(html).toContain('value="our-sample"');
    expect(html).toContain('value="france"');
    expect(html).toContain('data-role="csv"');
    expect(html).toContain('data-action="synthesize"');
    expect(html).toContain('data-action="upload"');
  });
});
