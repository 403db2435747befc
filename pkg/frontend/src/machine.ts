/**
 * Client-side session state machine.
 *
 * The server is the single source of truth: every transition here either
 * reads state from the API or posts a verdict and then re-reads.  Nothing
 * is marked judged locally before the server acknowledges it, so a refresh
 * (or a second tab) can never diverge from the log.
 */

import {
  ApiError,
  ClientConfig,
  Decision,
  NextPayload,
  Progress,
  QueueItem,
  VerifyApi,
} from "./api.js";

export type Phase = "loading" | "judging" | "done";

export interface ViewState {
  phase: Phase;
  item: QueueItem | null;
  overlay: Record<string, unknown>;
  progress: Progress | null;
  /** wall-clock ms when the current item appeared; drives the measured duration */
  shownAt: number;
}

/** Outcome of a judge/hotkey attempt, mostly for tests and status lines. */
export type JudgeResult = "acknowledged" | "conflict-resynced" | "ignored";

export class SessionMachine {
  readonly state: ViewState = {
    phase: "loading",
    item: null,
    overlay: {},
    progress: null,
    shownAt: 0,
  };
  config: ClientConfig | null = null;

  private listeners: Array<(state: ViewState) => void> = [];
  private inflight: Promise<JudgeResult> | null = null;

  constructor(
    private readonly api: VerifyApi,
    readonly sessionId: string,
    private readonly clock: () => number = () => Date.now(),
  ) {}

  onChange(listener: (state: ViewState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private apply(payload: NextPayload): void {
    const previous = this.state.item?.index;
    this.state.overlay = payload.overlay;
    this.state.progress = payload.progress;
    if (payload.done) {
      this.state.phase = "done";
      this.state.item = null;
    } else {
      this.state.phase = "judging";
      this.state.item = payload.item ?? null;
      if (this.state.item?.index !== previous) {
        this.state.shownAt = this.clock();
      }
    }
    this.emit();
  }

  /** Load config and current server state; safe to call at any time. */
  async start(): Promise<void> {
    this.config = await this.api.config();
    await this.refresh();
  }

  /** Re-read the authoritative state from the server. */
  async refresh(): Promise<void> {
    this.apply(await this.api.next(this.sessionId));
  }

  /**
   * Judge the displayed item.  Ignored when nothing is displayed or a
   * verdict is already in flight (one active item per session).  On a
   * conflict the server state is refetched and nothing is recorded locally.
   */
  judge(decision: Decision): Promise<JudgeResult> {
    if (this.inflight) {
      return Promise.resolve("ignored");
    }
    const item = this.state.item;
    if (this.state.phase !== "judging" || item === null) {
      return Promise.resolve("ignored");
    }
    const duration = Math.max(0, (this.clock() - this.state.shownAt) / 1000);
    this.inflight = (async (): Promise<JudgeResult> => {
      try {
        await this.api.postVerdict(this.sessionId, item.index, decision, duration);
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          await this.refresh();
          return "conflict-resynced";
        }
        throw err;
      }
      // acknowledged; only now advance, by asking the server what is next
      await this.refresh();
      return "acknowledged";
    })();
    return this.inflight.finally(() => {
      this.inflight = null;
    });
  }

  /** Map a pressed key through the configured hotkeys; unknown keys are ignored. */
  hotkey(key: string): Promise<JudgeResult> {
    const hotkeys = this.config?.hotkeys;
    if (!hotkeys) {
      return Promise.resolve("ignored");
    }
    const lower = key.toLowerCase();
    for (const decision of Object.keys(hotkeys) as Decision[]) {
      if (hotkeys[decision] === lower) {
        return this.judge(decision);
      }
    }
    return Promise.resolve("ignored");
  }

  /** Resolves once no verdict is in flight; for tests and shutdown. */
  async idle(): Promise<void> {
    while (this.inflight) {
      await this.inflight.catch(() => undefined);
    }
  }
}
