/** Typed client for the game server's /v1 JSON API.
 *
 * The client is rule-free: every legal move comes from the server, and the
 * only thing the browser ever adds is a user-typed term for an open slot.
 */

export type AttackContent = {
  kind: "and1" | "and2" | "or" | "forall" | "exists" | "formula";
  term?: string;
  formula?: string;
};

export type MoveContent = string | AttackContent;

export type MoveJson = {
  polarity: "?" | "!";
  content: MoveContent;
  enabler: number | null;
};

export type GameJson = { formula: string; moves: MoveJson[] };

export type SessionView = {
  id: string;
  status: "awaiting_human" | "awaiting_machine" | "finished_p_win" | "finished_o_win";
  formula: string;
  machine_strategy_found: boolean;
  game: GameJson;
};

export type MoveOption = {
  move: MoveJson;
  open_term: boolean;
  description: string;
};

export class ApiError extends Error {
  status: number;
  reason: string;

  constructor(status: number, message: string, reason: string) {
    super(message);
    this.status = status;
    this.reason = reason;
  }
}

type FetchLike = typeof fetch;

export class ArenaApi {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(
        response.status,
        (body as { error?: string }).error ?? `HTTP ${response.status}`,
        (body as { reason?: string }).reason ?? "unknown",
      );
    }
    return body as T;
  }

  createSession(formula: string): Promise<SessionView> {
    return this.request("/v1/sessions", {
      method: "POST",
      body: JSON.stringify({ formula }),
    });
  }

  getSession(id: string): Promise<SessionView> {
    return this.request(`/v1/sessions/${id}`);
  }

  async listMoves(id: string): Promise<MoveOption[]> {
    const body = await this.request<{ moves: MoveOption[] }>(
      `/v1/sessions/${id}/moves`,
    );
    return body.moves;
  }

  playMove(id: string, move: MoveJson): Promise<SessionView> {
    return this.request(`/v1/sessions/${id}/moves`, {
      method: "POST",
      body: JSON.stringify({ move }),
    });
  }
}

/** Splice a user-typed term into an open universal-attack slot. */
export function withTerm(move: MoveJson, term: string): MoveJson {
  if (typeof move.content === "string") {
    return move;
  }
  return { ...move, content: { ...move.content, term } };
}
