// Controller: owns the state, talks to the API, emits rendered HTML.
// One API call in flight at a time; every transition re-renders.

import { ApiClient, ApiError } from "./api.js";
import { renderApp } from "./render.js";
import {
  UiState,
  Verdict,
  allCardsJudged,
  initialState,
  requestFailed,
  requestStarted,
  roundReceived,
  sessionReady,
  toggleKeyword,
  verdictAccepted,
} from "./state.js";

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  return "unexpected error";
}

export class Controller {
  state: UiState = initialState();

  constructor(
    private api: ApiClient,
    private onRender: (html: string, state: UiState) => void,
  ) {}

  private emit(): void {
    this.onRender(renderApp(this.state), this.state);
  }

  async start(): Promise<void> {
    if (this.state.pending) return;
    this.state = requestStarted(this.state);
    this.emit();
    try {
      const { session_id } = await this.api.createSession();
      const { clusters } = await this.api.keywords();
      this.state = sessionReady(this.state, session_id, clusters);
    } catch (err) {
      this.state = requestFailed(this.state, describe(err), "start");
    }
    this.emit();
  }

  toggle(word: string): void {
    this.state = toggleKeyword(this.state, word);
    this.emit();
  }

  async submit(): Promise<void> {
    const { sessionId } = this.state;
    if (this.state.pending || !sessionId || this.state.selected.length === 0)
      return;
    this.state = requestStarted(this.state);
    this.emit();
    try {
      await this.api.questionnaire(sessionId, this.state.selected);
      const round = await this.api.recommendations(sessionId);
      this.state = roundReceived(
        this.state,
        round.bets,
        round.wildcard,
        round.round,
      );
    } catch (err) {
      this.state = requestFailed(this.state, describe(err), "submit");
    }
    this.emit();
  }

  async judge(wineId: number, verdict: Verdict): Promise<void> {
    const { sessionId } = this.state;
    if (this.state.pending || !sessionId) return;
    this.state = requestStarted(this.state);
    this.emit();
    try {
      await this.api.feedback(sessionId, wineId, verdict);
      this.state = verdictAccepted(this.state, wineId, verdict);
    } catch (err) {
      this.state = requestFailed(this.state, describe(err), null);
      this.emit();
      return;
    }
    this.emit();
    if (allCardsJudged(this.state)) {
      await this.refresh();
    }
  }

  async refresh(): Promise<void> {
    const { sessionId } = this.state;
    if (this.state.pending || !sessionId) return;
    this.state = requestStarted(this.state);
    this.emit();
    try {
      const round = await this.api.recommendations(sessionId);
      this.state = roundReceived(
        this.state,
        round.bets,
        round.wildcard,
        round.round,
      );
    } catch (err) {
      this.state = requestFailed(this.state, describe(err), "refresh");
    }
    this.emit();
  }

  async retry(kind: string): Promise<void> {
    if (kind === "start") return this.start();
    if (kind === "submit") return this.submit();
    if (kind === "refresh") return this.refresh();
  }
}
