/** Thin typed client for /api/v1. The base URL is configurable at runtime
 * (window.UXREC_API_BASE) so the build can be served from any static host. */

import type {
  GraphView,
  IndexValues,
  MetricDiff,
  OutcomeItem,
  Recommendation,
  RiskItem,
  SessionSnapshot,
} from './types.js';

declare global {
  interface Window {
    UXREC_API_BASE?: string;
  }
}

export class ApiRequestError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly stage?: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = (typeof window !== 'undefined' && window.UXREC_API_BASE) || '',
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.base}/api/v1${path}`, {
      method,
      headers: body === undefined ? {} : { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let code = `http_${resp.status}`;
      let message = resp.statusText;
      let stage: string | undefined;
      try {
        const err = await resp.json();
        code = err.code ?? code;
        message = err.message ?? message;
        stage = err.stage;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiRequestError(code, message, stage);
    }
    return resp.json() as Promise<T>;
  }

  createProject(body: {
    name: string;
    statuses: string[];
    description: string;
    initial_plan: string;
    initial_outcome: string;
  }): Promise<SessionSnapshot> {
    return this.request('POST', '/projects', body);
  }

  getProject(id: string): Promise<SessionSnapshot> {
    return this.request('GET', `/projects/${id}`);
  }

  suggestions(id: string): Promise<{ suggestions: IndexValues }> {
    return this.request('GET', `/projects/${id}/indexes/suggestions`);
  }

  putIndexes(id: string, indexes: IndexValues): Promise<SessionSnapshot> {
    return this.request('PUT', `/projects/${id}/indexes`, { indexes });
  }

  regenerate(id: string): Promise<{ recommendation: Recommendation; diff: MetricDiff; revision: number }> {
    return this.request('POST', `/projects/${id}/regenerate`);
  }

  graphView(id: string): Promise<GraphView> {
    return this.request('GET', `/projects/${id}/metrics/graphview`);
  }

  cartAdd(id: string, metric: string): Promise<{ cart: string[]; revision: number }> {
    return this.request('POST', `/projects/${id}/cart/${encodeURIComponent(metric)}`);
  }

  cartRemove(id: string, metric: string): Promise<{ cart: string[]; revision: number }> {
    return this.request('DELETE', `/projects/${id}/cart/${encodeURIComponent(metric)}`);
  }

  outcomes(id: string): Promise<{ outcomes: OutcomeItem[]; selected: string[] }> {
    return this.request('GET', `/projects/${id}/outcomes`);
  }

  selectOutcomes(id: string, refs: string[]): Promise<{ selected: string[]; revision: number }> {
    return this.request('POST', `/projects/${id}/outcomes/select`, { refs });
  }

  risks(id: string): Promise<{ risks: RiskItem[]; accepted: string[] }> {
    return this.request('GET', `/projects/${id}/risks`);
  }

  acceptRisks(id: string, refs: string[]): Promise<{ accepted: string[]; revision: number }> {
    return this.request('POST', `/projects/${id}/risks/accept`, { refs });
  }

  generate(id: string): Promise<{ plan: string; plan_warnings: string[]; ux_outcome: unknown; revision: number }> {
    return this.request('POST', `/projects/${id}/generate`);
  }

  /** Raw bytes so a download is byte-identical to the API response. */
  async exportRaw(id: string, format: 'json' | 'markdown'): Promise<Uint8Array> {
    const resp = await this.fetchFn(`${this.base}/api/v1/projects/${id}/export?format=${format}`, {
      method: 'GET',
    });
    if (!resp.ok) {
      throw new ApiRequestError(`http_${resp.status}`, resp.statusText);
    }
    return new Uint8Array(await resp.arrayBuffer());
  }
}
