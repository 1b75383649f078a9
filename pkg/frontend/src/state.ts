// View state: slider-driven solve requests with debounce, monotone sequence
// numbers for stale-response discard, and a pinnable comparison response.
//
// The scheduler is injectable so tests can drive time by hand.

import type { SolveResponse, TariffParams } from "./types.js";
import { DEFAULT_PARAMS } from "./types.js";

export type Scheduler = (fn: () => void, ms: number) => () => void;

const defaultScheduler: Scheduler = (fn, ms) => {
  const handle = setTimeout(fn, ms);
  return () => clearTimeout(handle);
};

export interface StoreOptions {
  solve: (params: TariffParams, seq: number) => Promise<SolveResponse>;
  debounceMs?: number;
  schedule?: Scheduler;
  onRender?: (state: Store) => void;
}

export class Store {
  params: TariffParams = { ...DEFAULT_PARAMS };
  scenarioId: string | null = null;
  response: SolveResponse | null = null;
  pinned: SolveResponse | null = null;
  overlays: { label: string; response: SolveResponse }[] = [];
  errorBanner: string | null = null;

  /** Sequence number of the most recently issued request. */
  issuedSeq = 0;
  /** Sequence number of the response currently rendered. */
  appliedSeq = 0;
  requestsSent = 0;

  private readonly solveFn: StoreOptions["solve"];
  private readonly debounceMs: number;
  private readonly schedule: Scheduler;
  private readonly onRender: (state: Store) => void;
  private cancelPending: (() => void) | null = null;
  private lastRequestedKey: string | null = null;

  constructor(opts: StoreOptions) {
    this.solveFn = opts.solve;
    this.debounceMs = opts.debounceMs ?? 150;
    this.schedule = opts.schedule ?? defaultScheduler;
    this.onRender = opts.onRender ?? (() => {});
  }

  setScenario(id: string): void {
    this.scenarioId = id;
    this.lastRequestedKey = null;
    this.commit();
  }

  /** Continuous slider movement: debounced. */
  dragChange(param: string, value: number): void {
    this.params = { ...this.params, [param]: value };
    this.cancelPending?.();
    this.cancelPending = this.schedule(() => {
      this.cancelPending = null;
      this.issueRequest();
    }, this.debounceMs);
  }

  /** Slider release or direct entry: immediate, supersedes pending drags. */
  commit(param?: string, value?: number): void {
    if (param !== undefined && value !== undefined) {
      this.params = { ...this.params, [param]: value };
    }
    this.cancelPending?.();
    this.cancelPending = null;
    this.issueRequest();
  }

  /** Freeze the current response for A/B overlay rendering. */
  pin(): void {
    if (this.response) {
      this.pinned = this.response;
      this.onRender(this);
    }
  }

  unpin(): void {
    this.pinned = null;
    this.onRender(this);
  }

  private requestKey(): string {
    return JSON.stringify([this.scenarioId, this.params]);
  }

  private issueRequest(): void {
    if (this.scenarioId === null) return;
    const key = this.requestKey();
    if (key === this.lastRequestedKey) return; // unchanged commit: no request
    this.lastRequestedKey = key;
    const seq = ++this.issuedSeq;
    this.requestsSent += 1;
    this.solveFn(this.params, seq).then(
      (response) => this.accept(seq, response),
      (err: unknown) => {
        // Stale failures are as discardable as stale successes.
        if (seq !== this.issuedSeq) return;
        this.errorBanner = err instanceof Error ? err.message : String(err);
        this.onRender(this);
      },
    );
  }

  private accept(seq: number, response: SolveResponse): void {
    // A response superseded by a newer commit never renders; appliedSeq is
    // therefore monotone.
    if (seq !== this.issuedSeq) return;
    this.appliedSeq = seq;
    this.response = response;
    this.errorBanner = null;
    this.onRender(this);
  }
}
