// Thin typed client for the game-advisor HTTP API. Every number shown in
// the UI comes from these response payloads; no game math happens here.

export interface SessionState {
  id: string;
  n: number;
  support: number[];
  rewards: number[];
  mode: "simulated" | "manual";
  seed: number;
  version: number;
  remaining: number[];
  history: { value: number; slot: number }[];
  pending_roll: number | null;
  banked: number;
  finished: boolean;
  optimal_remaining_value: number;
}

export interface WhatIf {
  slot: number;
  reward: number;
  total: number;
}

export interface Advice {
  pending_roll: number;
  banked: number;
  recommended_slot: number;
  recommended_rank: number;
  whatif: WhatIf[];
  thresholds: number[];
  version: number;
}

export interface RollResult {
  value: number;
  version: number;
}

export interface CreateRequest {
  dist: "dice" | { support: number[]; probs: number[] };
  n: number;
  rewards?: "linear";
  mode: "simulated" | "manual";
  seed: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body.code ?? "Unknown", body.message ?? "request failed");
  }
  return body as T;
}

function post<T>(url: string, payload?: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload ?? {}),
  });
}

export class Client {
  constructor(readonly base: string = "") {}

  createSession(req: CreateRequest): Promise<SessionState> {
    return post(`${this.base}/api/session`, req);
  }

  getState(id: string): Promise<SessionState> {
    return request(`${this.base}/api/session/${id}`);
  }

  roll(id: string): Promise<RollResult> {
    return post(`${this.base}/api/session/${id}/roll`);
  }

  enterRoll(id: string, value: number): Promise<RollResult> {
    return post(`${this.base}/api/session/${id}/enter-roll`, { value });
  }

  getAdvice(id: string): Promise<Advice> {
    return request(`${this.base}/api/session/${id}/advice`);
  }

  place(id: string, slot: number, version: number): Promise<SessionState> {
    return post(`${this.base}/api/session/${id}/place`, { slot, version });
  }
}
