import type {
  ContextsPayload,
  NeighborhoodPayload,
  StepDirection,
  StrategyEntry,
} from './types'

export class ApiError extends Error {
  code: string
  status: number

  constructor(status: number, code: string, message: string) {
    super(message)
    this.code = code
    this.status = status
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => null)
  if (!response.ok) {
    const error = body?.error ?? {}
    throw new ApiError(
      response.status,
      error.code ?? 'unknown',
      error.message ?? `request failed with status ${response.status}`,
    )
  }
  return body as T
}

/** Thin typed client for the /v1 exploration API; all math stays server-side. */
export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private post<T>(path: string, body: string): Promise<T> {
    return this.fetchImpl(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body,
    }).then((r) => unwrap<T>(r))
  }

  loadRcf(documentText: string): Promise<{ rcf_id: string; contexts: string[] }> {
    return this.post('/v1/rcf', documentText)
  }

  contexts(rcfId: string): Promise<ContextsPayload> {
    return this.fetchImpl(`${this.baseUrl}/v1/rcf/${rcfId}/contexts`).then((r) =>
      unwrap<ContextsPayload>(r),
    )
  }

  createSession(
    rcfId: string,
    context: string,
    strategy: StrategyEntry[],
  ): Promise<{ session_id: string; context: string }> {
    return this.post(
      '/v1/sessions',
      JSON.stringify({ rcf_id: rcfId, context, strategy }),
    )
  }

  query(sessionId: string, attributes: string[]): Promise<NeighborhoodPayload> {
    return this.post(
      `/v1/sessions/${sessionId}/query`,
      JSON.stringify({ attributes }),
    )
  }

  step(
    sessionId: string,
    direction: StepDirection,
    target: string,
  ): Promise<NeighborhoodPayload> {
    return this.post(
      `/v1/sessions/${sessionId}/step`,
      JSON.stringify({ direction, target }),
    )
  }
}
