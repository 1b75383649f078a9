// Readout formatting: unit labels only, no arithmetic on response values
// beyond locale-free string conversion.

import type { SolveResponse } from "./types.js";

export function fmtNumber(v: number | null | undefined): string {
  if (v === null || v === undefined || Number.isNaN(v)) return "–";
  return String(v);
}

export interface Readout {
  label: string;
  value: string;
  unit: string;
}

export function sizingReadout(response: SolveResponse | null): Readout[] {
  if (!response) return [];
  const rows: Readout[] = [
    { label: "PV capacity", value: fmtNumber(response.v_pv_kw), unit: "kW" },
    { label: "Battery capacity", value: fmtNumber(response.v_bat_kwh), unit: "kWh" },
    { label: "Annual cost", value: fmtNumber(response.annual_cost), unit: "currency/yr" },
    { label: "Benefit-positive days J", value: fmtNumber(response.j_star), unit: "days" },
  ];
  if (response.lp && response.lp.status === "optimal") {
    rows.push(
      { label: "LP PV", value: fmtNumber(response.lp.v_pv_kw), unit: "kW" },
      { label: "LP battery", value: fmtNumber(response.lp.v_bat_kwh), unit: "kWh" },
      { label: "LP objective", value: fmtNumber(response.lp.objective), unit: "currency/yr" },
    );
  }
  return rows;
}
