import type { AgentResponse, CreateSessionResponse } from './types.js';

/** Thin client for the session API; throws ApiError on any failure. */

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
    this.name = 'ApiError';
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = '') {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`);
    }
    if (!response.ok) {
      throw new ApiError(`request failed with status ${response.status}`, response.status);
    }
    return (await response.json()) as T;
  }

  createSession(language?: string): Promise<CreateSessionResponse> {
    return this.post<CreateSessionResponse>('/sessions', language ? { language } : {});
  }

  sendUtterance(sessionId: string, text: string): Promise<AgentResponse> {
    return this.post<AgentResponse>(`/sessions/${encodeURIComponent(sessionId)}/utterance`, {
      text,
    });
  }
}
