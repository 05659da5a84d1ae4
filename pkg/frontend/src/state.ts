// UI state and its pure transitions. Everything rendered lives here, and
// everything here came out of an API response untouched.

import type { Card, KeywordCluster } from "./api.js";

export type Verdict = "liked" | "disliked";

export interface CardView extends Card {
  tag: "bet" | "wildcard";
}

export interface HistoryEntry {
  wine_id: number;
  name: string;
  verdict: Verdict;
}

export type Phase = "loading" | "questionnaire" | "cards";

export interface UiState {
  phase: Phase;
  sessionId: string | null;
  clusters: KeywordCluster[];
  selected: string[];
  cards: CardView[];
  round: number | null;
  history: HistoryEntry[];
  pending: boolean;
  error: string | null;
  // what a rendered "retry" button should redo
  retry: "start" | "submit" | "refresh" | null;
}

export function initialState(): UiState {
  return {
    phase: "loading",
    sessionId: null,
    clusters: [],
    selected: [],
    cards: [],
    round: null,
    history: [],
    pending: false,
    error: null,
    retry: null,
  };
}

export function sessionReady(
  state: UiState,
  sessionId: string,
  clusters: KeywordCluster[],
): UiState {
  return {
    ...state,
    phase: "questionnaire",
    sessionId,
    clusters,
    pending: false,
    error: null,
    retry: null,
  };
}

const available = (state: UiState): Set<string> =>
  new Set(state.clusters.flatMap((c) => c.keywords));

export function toggleKeyword(state: UiState, word: string): UiState {
  if (state.pending || !available(state).has(word)) return state;
  const selected = state.selected.includes(word)
    ? state.selected.filter((w) => w !== word)
    : [...state.selected, word];
  return { ...state, selected };
}

export function requestStarted(state: UiState): UiState {
  return { ...state, pending: true, error: null, retry: null };
}

export function requestFailed(
  state: UiState,
  message: string,
  retry: UiState["retry"],
): UiState {
  return { ...state, pending: false, error: message, retry };
}

export function roundReceived(
  state: UiState,
  bets: Card[],
  wildcard: Card,
  round: number,
): UiState {
  const cards: CardView[] = [
    ...bets.map((c): CardView => ({ ...c, tag: "bet" })),
    { ...wildcard, tag: "wildcard" },
  ];
  return {
    ...state,
    phase: "cards",
    cards,
    round,
    pending: false,
    error: null,
    retry: null,
  };
}

// Feedback is recorded only after the server accepted it; a failed call
// leaves the history panel untouched.
export function verdictAccepted(
  state: UiState,
  wineId: number,
  verdict: Verdict,
): UiState {
  const card = state.cards.find((c) => c.wine_id === wineId);
  if (!card) return state;
  return {
    ...state,
    pending: false,
    history: [...state.history, { wine_id: wineId, name: card.name, verdict }],
  };
}

export function judgedIds(state: UiState): Set<number> {
  return new Set(state.history.map((h) => h.wine_id));
}

export function allCardsJudged(state: UiState): boolean {
  const judged = judgedIds(state);
  return state.cards.length > 0 && state.cards.every((c) => judged.has(c.wine_id));
}

export function canSubmit(state: UiState): boolean {
  return (
    state.phase === "questionnaire" &&
    state.selected.length > 0 &&
    !state.pending
  );
}
