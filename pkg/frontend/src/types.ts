// Wire types for the sizing service. The UI renders these verbatim: every
// number shown on screen is a field of an API response, never derived
// client-side (unit labels are the only decoration).

export interface TariffParams {
  c_pv_fixed: number;
  c_bat_fixed: number;
  p_buy: number;
  p_sell: number;
  delta_p: number;
  [key: string]: number;
}

export const DEFAULT_PARAMS: TariffParams = {
  c_pv_fixed: 12000,
  c_bat_fixed: 4400,
  p_buy: 26,
  p_sell: 6,
  delta_p: 0.01,
};

export interface CurveArrays {
  slice_level_kw: number[];
  c_grid_per_kw: number[];
  c_pv_per_kw: number[];
  c_pvbat_per_kw: number[];
  cumulative_battery_kwh: number[];
}

export interface LpResult {
  status: string;
  v_pv_kw?: number;
  v_bat_kwh?: number;
  objective?: number;
  message?: string;
}

export interface SolveResponse {
  v_pv_kw: number;
  v_bat_kwh: number;
  annual_cost: number;
  j_star: number;
  first_crossing_kw: number | null;
  curves: CurveArrays;
  per_day: { sold_kwh: number[]; charged_kwh: number[] };
  lp?: LpResult;
  lp_timeout?: boolean;
}

export interface ScenarioInfo {
  scenario_id: string;
  n_t: number;
  n_d: number;
}

export interface ApiErrorBody {
  error: string;
  detail?: unknown;
}
