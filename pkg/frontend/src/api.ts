/** Thin typed client for the dialogue service HTTP API. */

export interface SessionStart {
  sessionId: string;
  greeting: string;
}

export type DialogueStatus = "active" | "awaiting_questionnaire" | "closed";

export interface TurnReply {
  systemText: string;
  status: DialogueStatus;
}

export interface Questionnaire {
  success: boolean;
  askIfNec: number; // 1-5
  overall: number; // 1-5
}

export interface PolicySummary {
  sessions: number;
  [stat: string]: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function post(
  fetchFn: FetchLike,
  url: string,
  body: unknown,
): Promise<unknown> {
  const response = await fetchFn(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const parsed = (await response.json()) as { detail?: string };
      if (parsed.detail) detail = String(parsed.detail);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response.json();
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) =>
      fetch(input, init),
  ) {}

  async createSession(policy: string): Promise<SessionStart> {
    const data = (await post(this.fetchFn, `${this.baseUrl}/api/session`, {
      policy,
    })) as { session_id: string; greeting: string };
    return { sessionId: data.session_id, greeting: data.greeting };
  }

  async sendTurn(sessionId: string, text: string): Promise<TurnReply> {
    const data = (await post(
      this.fetchFn,
      `${this.baseUrl}/api/session/${sessionId}/turn`,
      { text },
    )) as { system_text: string; status: DialogueStatus };
    return { systemText: data.system_text, status: data.status };
  }

  async submitQuestionnaire(
    sessionId: string,
    q: Questionnaire,
  ): Promise<void> {
    await post(
      this.fetchFn,
      `${this.baseUrl}/api/session/${sessionId}/questionnaire`,
      { success: q.success, ask_if_nec: q.askIfNec, overall: q.overall },
    );
  }

  async summary(): Promise<Record<string, PolicySummary>> {
    const response = await this.fetchFn(`${this.baseUrl}/api/summary`);
    if (!response.ok) {
      throw new ApiError(response.status, response.statusText);
    }
    return (await response.json()) as Record<string, PolicySummary>;
  }

  async policies(): Promise<string[]> {
    const response = await this.fetchFn(`${this.baseUrl}/healthz`);
    if (!response.ok) {
      throw new ApiError(response.status, response.statusText);
    }
    const data = (await response.json()) as { policies: string[] };
    return data.policies;
  }
}
