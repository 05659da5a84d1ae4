// HTML-string renderers: pure functions of UiState. Interactive elements
// carry data-action attributes; the bootstrap code wires delegation.

import type { CardView, UiState } from "./state.js";
import { canSubmit, judgedIds } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export const money = (value: number): string => `$${value.toFixed(2)}`;
export const num = (value: number): string => value.toFixed(4);

function renderError(state: UiState): string {
  if (!state.error) return "";
  const retry = state.retry
    ? `<button data-action="retry" data-retry="${state.retry}">retry</button>`
    : "";
  return `<div class="error" role="alert">${escapeHtml(state.error)} ${retry}</div>`;
}

function renderChips(state: UiState): string {
  const groups = state.clusters
    .map((cluster) => {
      const chips = cluster.keywords
        .map((word) => {
          const on = state.selected.includes(word);
          return `<button class="chip${on ? " on" : ""}" data-action="toggle" data-word="${escapeHtml(word)}"${state.pending ? " disabled" : ""}>${escapeHtml(word)}</button>`;
        })
        .join("");
      return `<div class="chip-group">${chips}</div>`;
    })
    .join("");
  const disabled = canSubmit(state) ? "" : " disabled";
  return `
    <section class="questionnaire">
      <h2>Pick the flavors of your ideal wine</h2>
      ${groups}
      <button class="submit" data-action="submit"${disabled}>Get recommendations</button>
    </section>`;
}

function renderCard(card: CardView, state: UiState): string {
  const judged = judgedIds(state).has(card.wine_id);
  const vintage = card.vintage === null ? "NV" : String(card.vintage);
  const buttons = judged
    ? `<span class="judged">rated</span>`
    : `<button data-action="judge" data-wine="${card.wine_id}" data-verdict="liked"${state.pending ? " disabled" : ""}>like</button>
       <button data-action="judge" data-wine="${card.wine_id}" data-verdict="disliked"${state.pending ? " disabled" : ""}>dislike</button>`;
  return `
    <article class="card ${card.tag}" data-wine-id="${card.wine_id}">
      <span class="tag">${card.tag}</span>
      <h3>${escapeHtml(card.name)}</h3>
      <p class="meta">${escapeHtml(card.winery)} · ${escapeHtml(card.region)}, ${escapeHtml(card.country)} · ${escapeHtml(vintage)}</p>
      <p class="meta">${money(card.price)} · ${card.score} pts</p>
      <dl class="breakdown">
        <dt>cost</dt><dd>${num(card.cost)}</dd>
        <dt>value (price/quality)</dt><dd>${num(card.value_term)}</dd>
        <dt>similarity penalty</dt><dd>${num(card.distance_term)}</dd>
      </dl>
      <p class="clusters">palate ${card.source_clusters.join(", ")}</p>
      <div class="actions">${buttons}</div>
    </article>`;
}

function renderCards(state: UiState): string {
  const cards = state.cards.map((c) => renderCard(c, state)).join("");
  return `
    <section class="round">
      <h2>Round ${state.round}</h2>
      <div class="cards">${cards}</div>
    </section>`;
}

function renderHistory(state: UiState): string {
  if (state.history.length === 0) return "";
  const items = state.history
    .map(
      (h) =>
        `<li class="${h.verdict}">${escapeHtml(h.name)} · ${h.verdict}</li>`,
    )
    .join("");
  return `<aside class="history"><h2>Your ratings</h2><ul>${items}</ul></aside>`;
}

export function renderApp(state: UiState): string {
  if (state.phase === "loading") {
    return `${renderError(state)}<p class="loading">Loading…</p>`;
  }
  if (state.phase === "questionnaire") {
    return `${renderError(state)}${renderChips(state)}`;
  }
  return `${renderError(state)}${renderCards(state)}${renderHistory(state)}`;
}
