/** Pure view: render(state) returns the full app markup as a string.
 *
 * Every displayed figure carries two attributes next to its formatted text:
 * data-field, a dot path into { history: state.history }, and data-value,
 * the raw field value as JSON. Tests resolve each path and compare exactly,
 * so the view cannot silently drift from the service payloads it shows.
 */

import {
  escapeHtml,
  formatCount,
  formatEmissions,
  formatPct,
  formatShare,
  rawValue,
} from "./format.js";
import type {
  BiasToggles,
  PendingScenario,
  ViewState,
} from "./state.js";
import { cellKey, overrideDiff, DELTA_MAX, DELTA_MIN } from "./state.js";
import type { HistoryEntry, ModeName, ScenarioResultDocument } from "./types.js";
import { BUILTIN_SCENARIOS, CRITERIA, MODES } from "./types.js";

function dataAttrs(field: string, value: number | string): string {
  return ` data-field="${escapeHtml(field)}" data-value="${escapeHtml(rawValue(value))}"`;
}

function metric(field: string, value: number | string, text: string): string {
  return `<span class="val"${dataAttrs(field, value)}>${escapeHtml(text)}</span>`;
}

function errorBanner(state: ViewState): string {
  if (!state.error) {
    return "";
  }
  const retry = state.error.retry
    ? `<button type="button" data-action="retry">Retry</button>`
    : "";
  return `<div class="banner error" role="alert">
    <span class="message">${escapeHtml(state.error.message)}</span>
    ${retry}
    <button type="button" data-action="dismiss-error">Dismiss</button>
  </div>`;
}

function nav(state: ViewState): string {
  const tabs: Array<[ViewState["screen"], string]> = [
    ["setup", "Population"],
    ["play", "Play"],
    ["history", "History"],
  ];
  const items = tabs
    .map(([screen, label]) => {
      const current = state.screen === screen ? ` aria-current="page"` : "";
      return `<button type="button" data-action="show-${screen}"${current}>${label}</button>`;
    })
    .join("");
  return `<nav class="tabs">${items}</nav>`;
}

function setupScreen(state: ViewState): string {
  const loaded = state.populationId
    ? `<p class="loaded">Loaded population <code>${escapeHtml(state.populationId)}</code>` +
      ` (${formatCount(state.populationCount ?? 0)} travellers).</p>`
    : `<p class="loaded">No population loaded yet.</p>`;
  return `<section class="setup">
    <h2>Population</h2>
    ${loaded}
    <fieldset class="synth">
      <legend>Generate a synthetic population</legend>
      <label>Profile
        <select data-role="profile">
          <option value="our-sample">Our Sample</option>
          <option value="france">France</option>
        </select>
      </label>
      <label>Size <input data-role="size" type="number" min="1" value="650"></label>
      <label>Seed <input data-role="seed" type="number" value="42"></label>
      <button type="button" data-action="synthesize">Generate</button>
    </fieldset>
    <fieldset class="upload">
      <legend>Or paste survey rows (CSV)</legend>
      <textarea data-role="csv" rows="8" placeholder="id,gender,usual_mode,..."></textarea>
      <button type="button" data-action="upload">Upload</button>
    </fieldset>
  </section>`;
}

function biasControls(biases: BiasToggles, disabled: boolean): string {
  const dis = disabled ? " disabled" : "";
  const check = (role: string, on: boolean, label: string) =>
    `<label><input type="checkbox" data-role="${role}"${on ? " checked" : ""}${dis}> ${label}</label>`;
  return `<fieldset class="biases">
    <legend>Biases for the next turn</legend>
    ${check("bias-choice-supportive", biases.choiceSupportive, "Choice-supportive (stick with a familiar favourite)")}
    ${check("bias-halo", biases.halo, "Halo (ignore a favourite's weakest points)")}
    ${check("bias-reactance", biases.reactance, "Reactance (push back against the promotion)")}
    <label class="delta">Pushback depth
      <input type="range" data-role="reactance-delta" min="${DELTA_MIN}" max="${DELTA_MAX}" step="0.5"
        value="${biases.reactanceDelta}"${biases.reactance && !disabled ? "" : " disabled"}>
      <span class="delta-value">${biases.reactanceDelta.toFixed(1)}</span>
    </label>
  </fieldset>`;
}

function overrideGrid(scenario: PendingScenario, disabled: boolean): string {
  const dis = disabled ? " disabled" : "";
  const head = CRITERIA.map((c) => `<th scope="col">${c}</th>`).join("");
  const rows = MODES.map((mode) => {
    const cells = CRITERIA.map((criterion) => {
      const key = cellKey(mode, criterion);
      const value = scenario.overrides[key];
      const shown = value === undefined ? "" : String(value);
      return `<td><input type="number" min="0" max="10" step="1" data-cell="${key}" value="${shown}"${dis}></td>`;
    }).join("");
    return `<tr><th scope="row">${mode}</th>${cells}</tr>`;
  }).join("");
  return `<table class="override-grid">
    <thead><tr><th></th>${head}</tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

function scenarioControls(state: ViewState): string {
  const s = state.scenario;
  const dis = state.turnPending ? " disabled" : "";
  const builtins = BUILTIN_SCENARIOS.map(
    (b) =>
      `<label><input type="radio" name="scenario" data-role="builtin" value="${b.alias}"` +
      `${s.kind === "builtin" && s.alias === b.alias ? " checked" : ""}${dis}> ${b.label}</label>`,
  ).join("");
  const customChecked = s.kind === "custom" ? " checked" : "";
  const customPanel =
    s.kind === "custom"
      ? `<div class="custom-panel">
          <label>Name <input type="text" data-role="custom-name" value="${escapeHtml(s.customName)}"${dis}></label>
          <p class="hint">Set a cell to pin that evaluation for everyone (0 to 10); leave blank to keep survey answers.</p>
          ${overrideGrid(s, state.turnPending)}
        </div>`
      : "";
  return `<fieldset class="scenario">
    <legend>Policy to enact</legend>
    ${builtins}
    <label><input type="radio" name="scenario" data-role="custom" value="custom"${customChecked}${dis}> Custom</label>
    ${customPanel}
  </fieldset>`;
}

function splitBars(prefix: string, split: Record<string, number>, title: string): string {
  const bars = MODES.map((mode) => {
    const share = split[mode] ?? 0;
    const width = Math.round(share * 1000) / 10;
    return `<div class="bar-row">
      <span class="bar-label">${mode}</span>
      <div class="bar"><div class="bar-fill mode-${mode.toLowerCase()}" style="width:${width}%"></div></div>
      ${metric(`${prefix}.${mode}`, share, formatShare(share))}
    </div>`;
  }).join("");
  return `<figure class="split"><figcaption>${escapeHtml(title)}</figcaption>${bars}</figure>`;
}

function transferGrid(prefix: string, transfer: number[][]): string {
  let max = 0;
  for (const row of transfer) {
    for (const n of row) {
      if (n > max) {
        max = n;
      }
    }
  }
  const head = MODES.map((m) => `<th scope="col">to ${m}</th>`).join("");
  const rows = MODES.map((fromMode, i) => {
    const cells = MODES.map((_, j) => {
      const count = transfer[i]?.[j] ?? 0;
      const heat = max > 0 ? (count / max).toFixed(2) : "0.00";
      return `<td class="heat" style="--heat:${heat}">${metric(
        `${prefix}.${i}.${j}`,
        count,
        formatCount(count),
      )}</td>`;
    }).join("");
    return `<tr><th scope="row">from ${fromMode}</th>${cells}</tr>`;
  }).join("");
  return `<figure class="transfer">
    <figcaption>Who moved where</figcaption>
    <table><thead><tr><th></th>${head}</tr></thead><tbody>${rows}</tbody></table>
  </figure>`;
}

function gauges(prefix: string, result: ScenarioResultDocument): string {
  const items = MODES.map((mode) => {
    const entry = result.rationality.by_mode[mode];
    const pct = entry?.rational_pct;
    const reading =
      pct === undefined
        ? `<span class="val-missing">n/a</span>`
        : metric(`${prefix}.rationality.by_mode.${mode}.rational_pct`, pct, formatPct(pct));
    return `<div class="gauge">
      <span class="gauge-label">${mode}</span>
      <div class="gauge-track"><div class="gauge-fill" style="width:${(pct ?? 0).toFixed(1)}%"></div></div>
      ${reading}
    </div>`;
  }).join("");
  return `<figure class="gauges"><figcaption>Choosing their own best option, by mode</figcaption>${items}</figure>`;
}

function emissionsTrend(history: HistoryEntry[]): string {
  const width = 320;
  const height = 90;
  let max = 0;
  for (const entry of history) {
    if (entry.result.emissions_index > max) {
      max = entry.result.emissions_index;
    }
  }
  const scaleY = (e: number) => (height - 15 - (max > 0 ? (e / max) * (height - 30) : 0)).toFixed(1);
  const scaleX = (i: number) =>
    history.length === 1 ? (width / 2).toFixed(1) : (10 + (i * (width - 20)) / (history.length - 1)).toFixed(1);
  const points = history
    .map((entry, i) => `${scaleX(i)},${scaleY(entry.result.emissions_index)}`)
    .join(" ");
  const dots = history
    .map(
      (entry, i) =>
        `<circle cx="${scaleX(i)}" cy="${scaleY(entry.result.emissions_index)}" r="3"` +
        `${dataAttrs(`history.${i}.result.emissions_index`, entry.result.emissions_index)}>` +
        `<title>Turn ${i + 1}: ${formatEmissions(entry.result.emissions_index)}</title></circle>`,
    )
    .join("");
  return `<figure class="trend">
    <figcaption>Car-use emissions index by turn</figcaption>
    <svg viewBox="0 0 ${width} ${height}" role="img" aria-label="Emissions index trend">
      ${history.length > 1 ? `<polyline fill="none" points="${points}"></polyline>` : ""}
      ${dots}
    </svg>
  </figure>`;
}

function latestResult(state: ViewState): string {
  if (state.history.length === 0) {
    return `<section class="results empty"><p>No turns yet. Pick a policy and enact it.</p></section>`;
  }
  const index = state.history.length - 1;
  const entry = state.history[index] as HistoryEntry;
  const result = entry.result;
  const prefix = `history.${index}.result`;
  const promoted = result.metadata.promoted
    .map(([mode, criterion]) => `${mode} / ${criterion}`)
    .join(", ");
  const skipped = result.metadata.skipped ?? [];
  const skippedLine =
    skipped.length > 0
      ? `<p class="skipped">Overrides not applied: ${escapeHtml(skipped.join(", "))}</p>`
      : "";
  return `<section class="results">
    <h3>Turn ${state.turn}: ${metric(`${prefix}.scenario`, result.scenario, result.scenario)}</h3>
    <p class="headline">Emissions index ${metric(`${prefix}.emissions_index`, result.emissions_index, formatEmissions(result.emissions_index))}
      <span class="promoted">${promoted ? `Promoted: ${escapeHtml(promoted)}` : "No promoted cells"}</span></p>
    ${skippedLine}
    <div class="splits">
      ${splitBars(`${prefix}.before_split`, result.before_split, "Before")}
      ${splitBars(`${prefix}.after_split`, result.after_split, "After")}
    </div>
    ${transferGrid(`${prefix}.transfer`, result.transfer)}
    ${gauges(prefix, result)}
    ${emissionsTrend(state.history)}
  </section>`;
}

function playScreen(state: ViewState): string {
  if (!state.populationId) {
    return `<section class="play empty"><p>Load a population first.</p>
      <button type="button" data-action="show-setup">Go to setup</button></section>`;
  }
  const enactLabel = state.turnPending ? "Enacting..." : "Enact policy";
  return `<section class="play">
    <h2>Turn ${state.turn + 1} of game <code>${escapeHtml(state.gameId ?? "")}</code></h2>
    ${biasControls(state.biases, state.turnPending)}
    ${scenarioControls(state)}
    <button type="button" class="enact" data-action="enact"${state.turnPending ? " disabled" : ""}>${enactLabel}</button>
    ${latestResult(state)}
  </section>`;
}

function historyScreen(state: ViewState): string {
  if (state.history.length === 0) {
    return `<section class="history empty"><p>No turns played yet.</p></section>`;
  }
  const cards = state.history
    .map((entry, i) => {
      const previous = i > 0 ? (state.history[i - 1] as HistoryEntry).scenario : null;
      const changes = overrideDiff(previous, entry.scenario);
      const diffItems =
        changes.length === 0
          ? `<li class="no-change">Same overrides as the previous turn</li>`
          : changes
              .map((c) => {
                const before = c.before === null ? "survey answers" : String(c.before);
                const after = c.after === null ? "survey answers" : String(c.after);
                return `<li>${escapeHtml(c.mode)} / ${escapeHtml(c.criterion)}: ${escapeHtml(before)} to ${escapeHtml(after)}</li>`;
              })
              .join("");
      return `<article class="turn-card">
        <h3>Turn ${i + 1}: ${metric(`history.${i}.scenario.name`, entry.scenario.name, entry.scenario.name)}</h3>
        <p>Emissions index ${metric(`history.${i}.result.emissions_index`, entry.result.emissions_index, formatEmissions(entry.result.emissions_index))}</p>
        <ul class="diff">${diffItems}</ul>
      </article>`;
    })
    .join("");
  return `<section class="history"><h2>What changed, turn by turn</h2>${cards}</section>`;
}

export function render(state: ViewState): string {
  let body: string;
  switch (state.screen) {
    case "setup":
      body = setupScreen(state);
      break;
    case "play":
      body = playScreen(state);
      break;
    case "history":
      body = historyScreen(state);
      break;
  }
  return `<main class="app">
    <header><h1>Modal choice dashboard</h1>${nav(state)}</header>
    ${errorBanner(state)}
    ${body}
  </main>`;
}
