// DOM glue: wires sliders, scenario upload, pin and LP buttons to the store.
// All economics arrive via the API; this file only moves strings around.

import { ApiClient } from "./api.js";
import { renderCurves } from "./chart.js";
import { sizingReadout } from "./format.js";
import { Store } from "./state.js";
import type { SolveResponse } from "./types.js";

interface SliderSpec {
  param: string;
  label: string;
  min: number;
  max: number;
  step: number;
  unit: string;
}

const SLIDERS: SliderSpec[] = [
  { param: "c_pv_fixed", label: "PV fixed cost", min: 2000, max: 30000, step: 100, unit: "currency/(kW yr)" },
  { param: "c_bat_fixed", label: "Battery fixed cost", min: 0, max: 12000, step: 50, unit: "currency/(kWh yr)" },
  { param: "p_buy", label: "Buy price", min: 1, max: 60, step: 0.5, unit: "currency/kWh" },
  { param: "p_sell", label: "Sell price", min: 0, max: 30, step: 0.5, unit: "currency/kWh" },
  { param: "delta_p", label: "Slice width", min: 0.005, max: 0.1, step: 0.005, unit: "kW" },
];

export function mount(root: HTMLElement, api = new ApiClient()): Store {
  root.innerHTML = `
    <div class="layout">
      <aside class="controls">
        <h1>PV + battery what-if explorer</h1>
        <div class="scenario-box">
          <button id="btn-synthetic">Generate synthetic household</button>
          <label class="upload">Upload CSV
            <input id="csv-input" type="file" accept=".csv,text/csv"/>
          </label>
          <div id="scenario-info" class="muted">no scenario loaded</div>
        </div>
        <div id="sliders"></div>
        <div class="actions">
          <button id="btn-pin">Pin for comparison</button>
          <button id="btn-unpin" disabled>Clear pin</button>
          <button id="btn-lp">Run exact LP check</button>
        </div>
        <div id="lp-result" class="muted"></div>
        <div id="banner" class="banner" hidden></div>
      </aside>
      <main>
        <div id="readout" class="readout"></div>
        <div id="chart"></div>
      </main>
    </div>`;

  const chartEl = root.querySelector<HTMLElement>("#chart")!;
  const readoutEl = root.querySelector<HTMLElement>("#readout")!;
  const bannerEl = root.querySelector<HTMLElement>("#banner")!;
  const infoEl = root.querySelector<HTMLElement>("#scenario-info")!;
  const lpEl = root.querySelector<HTMLElement>("#lp-result")!;

  const store: Store = new Store({
    solve: (params): Promise<SolveResponse> => {
      if (!store.scenarioId) return Promise.reject(new Error("no scenario"));
      return api.solve(store.scenarioId, params as never);
    },
    onRender: (s) => {
      bannerEl.hidden = s.errorBanner === null;
      bannerEl.textContent = s.errorBanner ?? "";
      chartEl.innerHTML = renderCurves(s.response, { pinned: s.pinned });
      readoutEl.innerHTML = sizingReadout(s.response)
        .map(
          (r) =>
            `<div class="cell"><span class="k">${r.label}</span>` +
            `<span class="v">${r.value}</span><span class="u">${r.unit}</span></div>`,
        )
        .join("");
      root.querySelector<HTMLButtonElement>("#btn-unpin")!.disabled =
        s.pinned === null;
    },
  });
  chartEl.innerHTML = renderCurves(null);

  const slidersEl = root.querySelector<HTMLElement>("#sliders")!;
  for (const spec of SLIDERS) {
    const row = document.createElement("label");
    row.className = "slider-row";
    row.innerHTML =
      `<span>${spec.label} <em id="val-${spec.param}">${store.params[spec.param]}</em> ${spec.unit}</span>` +
      `<input type="range" id="sl-${spec.param}" min="${spec.min}" max="${spec.max}" ` +
      `step="${spec.step}" value="${store.params[spec.param]}"/>`;
    slidersEl.appendChild(row);
    const input = row.querySelector<HTMLInputElement>("input")!;
    const valEl = row.querySelector<HTMLElement>(`#val-${spec.param}`)!;
    input.addEventListener("input", () => {
      valEl.textContent = input.value;
      store.dragChange(spec.param, Number(input.value));
    });
    input.addEventListener("change", () =>
      store.commit(spec.param, Number(input.value)),
    );
  }

  root.querySelector("#btn-synthetic")!.addEventListener("click", async () => {
    try {
      const info = await api.uploadSynthetic({});
      infoEl.textContent = `synthetic scenario: ${info.n_d} days, ${info.n_t} steps`;
      store.setScenario(info.scenario_id);
    } catch (err) {
      bannerEl.hidden = false;
      bannerEl.textContent = err instanceof Error ? err.message : String(err);
    }
  });

  root
    .querySelector<HTMLInputElement>("#csv-input")!
    .addEventListener("change", async (ev) => {
      const file = (ev.target as HTMLInputElement).files?.[0];
      if (!file) return;
      try {
        const info = await api.uploadCsv(await file.text());
        infoEl.textContent = `${file.name}: ${info.n_d} days, ${info.n_t} steps`;
        store.setScenario(info.scenario_id);
      } catch (err) {
        bannerEl.hidden = false;
        bannerEl.textContent = err instanceof Error ? err.message : String(err);
      }
    });

  root.querySelector("#btn-pin")!.addEventListener("click", () => store.pin());
  root.querySelector("#btn-unpin")!.addEventListener("click", () => store.unpin());

  // The LP is an explicit button with its own progress line, never wired to
  // slider movement: it is orders of magnitude slower than the estimator.
  root.querySelector("#btn-lp")!.addEventListener("click", async () => {
    if (!store.scenarioId) return;
    lpEl.textContent = "solving exact LP…";
    try {
      const res: SolveResponse = await api.solve(
        store.scenarioId,
        store.params as never,
        true,
        30,
      );
      if (res.lp_timeout) {
        lpEl.textContent = "LP timed out; estimator results unaffected.";
      } else if (res.lp && res.lp.status === "optimal") {
        lpEl.textContent =
          `LP optimum: ${res.lp.v_pv_kw} kW PV, ${res.lp.v_bat_kwh} kWh battery, ` +
          `objective ${res.lp.objective}`;
      } else {
        lpEl.textContent = `LP status: ${res.lp?.status ?? "unknown"}`;
      }
    } catch (err) {
      lpEl.textContent = err instanceof Error ? err.message : String(err);
    }
  });

  return store;
}

declare global {
  interface Window {
    pvscmStore?: Store;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.pvscmStore = mount(document.getElementById("app")!);
}
