/** Typed fetch client for the triage service. The only place the UI talks
 * to the backend; all mutations go through these documented endpoints. */

import type {
  ConceptsResponse,
  EvidenceItem,
  HypothesisInfo,
  LayoutResponse,
  Report,
  ReportsPage,
  SearchResultItem,
  ValiditySummary,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
  }
}

export class ApiClient {
  constructor(private baseUrl: string = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    const body = response.status === 204 ? null : await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, (body as { detail?: unknown })?.detail ?? body);
    }
    return body as T;
  }

  private json(method: string, payload: unknown): RequestInit {
    return {
      method,
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    };
  }

  getLayout(): Promise<LayoutResponse> {
    return this.request('/api/layout');
  }

  getConcepts(query = ''): Promise<ConceptsResponse> {
    return this.request(`/api/concepts?query=${encodeURIComponent(query)}`);
  }

  addCustomKeyword(phrase: string): Promise<{ concept: unknown; point: [number, number] | null }> {
    return this.request('/api/concepts/custom', this.json('POST', { phrase }));
  }

  getReports(params: { query?: string; concept?: string; page?: number; page_size?: number }): Promise<ReportsPage> {
    const search = new URLSearchParams();
    if (params.query) search.set('query', params.query);
    if (params.concept) search.set('concept', params.concept);
    if (params.page !== undefined) search.set('page', String(params.page));
    if (params.page_size !== undefined) search.set('page_size', String(params.page_size));
    return this.request(`/api/reports?${search.toString()}`);
  }

  addReport(draft: {
    instance_ref: string;
    model_output: string;
    text: string;
    source?: string;
    ground_truth?: string | null;
  }): Promise<Report> {
    return this.request('/api/reports', this.json('POST', draft));
  }

  listHypotheses(): Promise<{ hypotheses: HypothesisInfo[] }> {
    return this.request('/api/hypotheses');
  }

  createHypothesis(name: string): Promise<HypothesisInfo> {
    return this.request('/api/hypotheses', this.json('POST', { name }));
  }

  renameHypothesis(id: string, name: string): Promise<HypothesisInfo> {
    return this.request(`/api/hypotheses/${id}`, this.json('PATCH', { name }));
  }

  attachReport(hypothesisId: string, reportId: string): Promise<HypothesisInfo> {
    return this.request(`/api/hypotheses/${hypothesisId}/reports`, this.json('POST', { report_id: reportId }));
  }

  detachReport(hypothesisId: string, reportId: string): Promise<HypothesisInfo> {
    return this.request(`/api/hypotheses/${hypothesisId}/reports`, this.json('DELETE', { report_id: reportId }));
  }

  relatedConcepts(hypothesisId: string, reportId: string): Promise<{ concept_ids: string[] }> {
    return this.request(`/api/hypotheses/${hypothesisId}/reports/${reportId}/concepts`);
  }

  getSummary(hypothesisId: string): Promise<ValiditySummary> {
    return this.request(`/api/hypotheses/${hypothesisId}/summary`);
  }

  addAdditionalEvidence(hypothesisId: string, instanceId: string, origin: string): Promise<EvidenceItem> {
    return this.request(
      `/api/hypotheses/${hypothesisId}/evidence/additional`,
      this.json('POST', { instance_id: instanceId, origin }),
    );
  }

  setAdditionalVerdict(hypothesisId: string, itemId: string, verdict: string): Promise<EvidenceItem> {
    return this.request(
      `/api/hypotheses/${hypothesisId}/evidence/additional/${itemId}/verdict`,
      this.json('PATCH', { verdict }),
    );
  }

  addModifiedPair(hypothesisId: string, originalId: string, modifiedId: string): Promise<EvidenceItem> {
    return this.request(
      `/api/hypotheses/${hypothesisId}/evidence/modified`,
      this.json('POST', { original_id: originalId, modified_id: modifiedId }),
    );
  }

  setModifiedVerdict(hypothesisId: string, pairId: string, verdict: string): Promise<EvidenceItem> {
    return this.request(
      `/api/hypotheses/${hypothesisId}/evidence/modified/${pairId}/verdict`,
      this.json('PATCH', { verdict }),
    );
  }

  searchImages(query: string, limit = 12): Promise<{ results: SearchResultItem[] }> {
    return this.request(`/api/search/images?q=${encodeURIComponent(query)}&limit=${limit}`);
  }

  fetchSearchResult(result: SearchResultItem): Promise<{ id: string }> {
    return this.request(
      '/api/search/images/fetch',
      this.json('POST', { provider_id: result.provider_id, remote_url: result.remote_url }),
    );
  }

  async uploadInstance(data: Blob | ArrayBuffer, mediaType: string): Promise<{ id: string }> {
    const response = await fetch(this.baseUrl + '/api/instances', {
      method: 'POST',
      headers: { 'Content-Type': mediaType },
      body: data,
    });
    const body = await response.json();
    if (!response.ok) throw new ApiError(response.status, body?.detail ?? body);
    return body as { id: string };
  }

  exportUrl(ids?: string[]): string {
    const query = ids && ids.length ? `?ids=${ids.join(',')}` : '';
    return `${this.baseUrl}/api/export${query}`;
  }
}
