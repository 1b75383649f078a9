// Store behavior: debounce, stale-response discard, sequence monotonicity.

import { describe, expect, it } from "vitest";

import { Store, type Scheduler } from "../src/state.js";
import type { SolveResponse } from "../src/types.js";
import { stubResponse } from "./stub.js";

/** Hand-cranked scheduler: pending callbacks fire only on flush(). */
class FakeScheduler {
  private pending = new Map<number, () => void>();
  private nextId = 0;

  schedule: Scheduler = (fn) => {
    const id = this.nextId++;
    this.pending.set(id, fn);
    return () => this.pending.delete(id);
  };

  flush(): void {
    const fns = [...this.pending.values()];
    this.pending.clear();
    fns.forEach((fn) => fn());
  }

  get size(): number {
    return this.pending.size;
  }
}

interface Deferred {
  seq: number;
  resolve: (r: SolveResponse) => void;
  reject: (e: Error) => void;
}

function makeStore(opts: { debounceMs?: number } = {}) {
  const scheduler = new FakeScheduler();
  const calls: Deferred[] = [];
  const store = new Store({
    solve: (_params, seq) =>
      new Promise<SolveResponse>((resolve, reject) => {
        calls.push({ seq, resolve, reject });
      }),
    schedule: scheduler.schedule,
    debounceMs: opts.debounceMs ?? 150,
  });
  store.scenarioId = "s1";
  return { store, scheduler, calls };
}

const tick = () => new Promise<void>((r) => setTimeout(r, 0));

describe("debounce", () => {
  it("coalesces rapid drags into exactly one request at the final value", () => {
    const { store, scheduler, calls } = makeStore();
    store.dragChange("p_buy", 27);
    store.dragChange("p_buy", 28);
    store.dragChange("p_buy", 29);
    expect(calls).toHaveLength(0); // nothing fires inside the window
    expect(scheduler.size).toBe(1); // earlier timers were cancelled
    scheduler.flush();
    expect(calls).toHaveLength(1);
    expect(store.params.p_buy).toBe(29);
  });

  it("commit fires immediately and cancels the pending drag", () => {
    const { store, scheduler, calls } = makeStore();
    store.dragChange("p_buy", 27);
    store.commit("p_buy", 30);
    expect(calls).toHaveLength(1);
    scheduler.flush(); // the cancelled drag never fires
    expect(calls).toHaveLength(1);
  });

  it("an unchanged commit issues no request", () => {
    const { store, scheduler, calls } = makeStore();
    store.commit("p_buy", 30);
    expect(calls).toHaveLength(1);
    store.commit("p_buy", 30);
    store.commit();
    scheduler.flush();
    expect(calls).toHaveLength(1);
  });

  it("one request per committed value across a drag session", () => {
    const { store, scheduler, calls } = makeStore();
    for (const v of [27, 28, 29]) store.dragChange("p_buy", v);
    store.commit("p_buy", 29); // release
    expect(calls).toHaveLength(1);
    for (const v of [30, 31]) store.dragChange("p_buy", v);
    store.commit("p_buy", 31);
    expect(calls).toHaveLength(2);
    scheduler.flush();
    expect(calls).toHaveLength(2);
  });
});

describe("stale-response discard", () => {
  it("a delayed older response never overwrites a newer one", async () => {
    const { store, calls } = makeStore();
    store.commit("p_buy", 27); // request 1 (slow)
    store.commit("p_buy", 28); // request 2 (fast)
    expect(calls).toHaveLength(2);

    const late = stubResponse({ annual_cost: 111 });
    const fresh = stubResponse({ annual_cost: 222 });
    calls[1].resolve(fresh);
    await tick();
    expect(store.response?.annual_cost).toBe(222);
    expect(store.appliedSeq).toBe(2);

    calls[0].resolve(late); // delayed response arrives afterwards
    await tick();
    expect(store.response?.annual_cost).toBe(222); // discarded
    expect(store.appliedSeq).toBe(2);
  });

  it("a superseded response is discarded even if it arrives first", async () => {
    const { store, calls } = makeStore();
    store.commit("p_buy", 27);
    store.commit("p_buy", 28);
    calls[0].resolve(stubResponse({ annual_cost: 111 }));
    await tick();
    expect(store.response).toBeNull(); // waits for the newest commit
    calls[1].resolve(stubResponse({ annual_cost: 222 }));
    await tick();
    expect(store.response?.annual_cost).toBe(222);
  });

  it("applied sequence numbers are monotone", async () => {
    const { store, calls } = makeStore();
    const seen: number[] = [];
    store.commit("p_buy", 27);
    calls[0].resolve(stubResponse());
    await tick();
    seen.push(store.appliedSeq);
    store.commit("p_buy", 28);
    store.commit("p_buy", 29);
    calls[2].resolve(stubResponse());
    await tick();
    seen.push(store.appliedSeq);
    calls[1].resolve(stubResponse());
    await tick();
    seen.push(store.appliedSeq);
    expect(seen).toEqual([1, 3, 3]);
  });

  it("stale failures are also discarded; fresh failures surface verbatim", async () => {
    const { store, calls } = makeStore();
    store.commit("p_buy", 27);
    store.commit("p_buy", 28);
    calls[0].reject(new Error("old failure"));
    await tick();
    expect(store.errorBanner).toBeNull();
    calls[1].reject(new Error("invalid params: e_chg must be in (0, 1]"));
    await tick();
    expect(store.errorBanner).toBe("invalid params: e_chg must be in (0, 1]");
  });
});

describe("pinning", () => {
  it("freezes the current response for overlay", async () => {
    const { store, calls } = makeStore();
    store.commit("p_buy", 27);
    calls[0].resolve(stubResponse({ annual_cost: 111 }));
    await tick();
    store.pin();
    store.commit("p_buy", 28);
    calls[1].resolve(stubResponse({ annual_cost: 222 }));
    await tick();
    expect(store.pinned?.annual_cost).toBe(111);
    expect(store.response?.annual_cost).toBe(222);
    store.unpin();
    expect(store.pinned).toBeNull();
  });
});
